import random

import pytest
from hypothesis import given, strategies as st

from fragsat.errors import DuplicateEntry, ParseError, SplitTooSmall
from fragsat.vocab import Vocabulary, default_vocabulary, load_vocabulary, split_vocabulary


def test_minimal_file():
    v = load_vocabulary("[nouns]\nartist\nbeekeeper\n[verbs]\nchases/chase\n")
    assert v.nouns == ("artist", "beekeeper")
    assert v.verbs == (("chases", "chase"),)


def test_comments_and_blank_lines():
    v = load_vocabulary("# lexicon\n[nouns]\nartist  # a painter\n\nbeekeeper\n")
    assert v.n == 2 and v.v == 0


def test_duplicate_noun():
    with pytest.raises(DuplicateEntry):
        load_vocabulary("[nouns]\nartist\nartist\n")


def test_noun_and_verb_overlap():
    with pytest.raises(DuplicateEntry):
        load_vocabulary("[nouns]\nchases\n[verbs]\nchases/chase\n")


def test_uppercase_rejected_with_line_number():
    with pytest.raises(ParseError, match="line 3"):
        load_vocabulary("[nouns]\nartist\nArtist\n")


def test_malformed_verb_line():
    with pytest.raises(ParseError):
        load_vocabulary("[verbs]\nchases\n")


def test_serializer_round_trip(train_vocab):
    assert load_vocabulary(train_vocab.dumps()) == train_vocab


def test_bundled_lists_are_large_and_disjoint(train_vocab, eval_vocab):
    for v in (train_vocab, eval_vocab):
        assert v.n >= 40 and v.v >= 10
    assert not set(train_vocab.nouns) & set(eval_vocab.nouns)
    assert not set(train_vocab.verbs) & set(eval_vocab.verbs)


def test_split_cardinality_and_determinism():
    v = Vocabulary(tuple(f"noun{c}" for c in "abcdefghij"))
    a = split_vocabulary(v, 0.5, 7)
    assert (a[0].n, a[1].n) == (5, 5)
    assert not set(a[0].nouns) & set(a[1].nouns)
    assert split_vocabulary(v, 0.5, 7) == a


def test_split_too_small():
    with pytest.raises(SplitTooSmall):
        split_vocabulary(Vocabulary(("artist",)), 0.5, 1)


@given(st.integers(2, 30), st.integers(0, 8), st.integers(0, 2**64 - 1))
def test_split_is_a_partition(n, v, seed):
    words = [f"w{chr(97 + i // 26)}{chr(97 + i % 26)}" for i in range(n + 2 * v)]
    vocab = Vocabulary(tuple(words[:n]), tuple((words[n + 2 * k], words[n + 2 * k + 1]) for k in range(v)))
    if v == 1:
        with pytest.raises(SplitTooSmall):
            split_vocabulary(vocab, 0.5, seed)
        return
    train, ev = split_vocabulary(vocab, 0.5, seed)
    assert set(train.nouns).isdisjoint(ev.nouns)
    assert set(train.nouns) | set(ev.nouns) == set(vocab.nouns)
    assert set(train.verbs) | set(ev.verbs) == set(vocab.verbs)


def test_sample_is_seeded(train_vocab):
    a = train_vocab.sample(random.Random(3), 10, 2)
    b = train_vocab.sample(random.Random(3), 10, 2)
    assert a == b and a.n == 10 and a.v == 2
