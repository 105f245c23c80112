"""Noun and verb dictionaries, their text format, and the train/eval split."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import DuplicateEntry, ParseError, SplitTooSmall, UnknownWord, VocabTooSmall

WORD_RE = re.compile(r"[a-z][a-z-]*\Z")

# Words that would make a realized sentence ambiguous if used as nouns or verbs.
RESERVED = frozenset(
    "a an any does every is no non not some who".split()
)


@dataclass(frozen=True)
class Vocabulary:
    """Ordered nouns plus verbs stored as (third person singular, infinitive) pairs."""

    nouns: tuple[str, ...]
    verbs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nouns", tuple(self.nouns))
        object.__setattr__(self, "verbs", tuple(tuple(v) for v in self.verbs))
        for word in self.nouns:
            _check_word(word)
        for pair in self.verbs:
            for word in pair:
                _check_word(word)
        _check_distinct(self.nouns, "noun")
        _check_distinct([third for third, _ in self.verbs], "verb")
        _check_distinct([inf for _, inf in self.verbs], "verb infinitive")
        clash = set(self.nouns) & {w for pair in self.verbs for w in pair}
        if clash:
            raise DuplicateEntry(f"word used as both noun and verb: {sorted(clash)[0]}")

    @property
    def n(self) -> int:
        return len(self.nouns)

    @property
    def v(self) -> int:
        return len(self.verbs)

    def noun(self, i: int) -> str:
        if not 0 <= i < len(self.nouns):
            raise UnknownWord(f"noun index {i} out of range for {len(self.nouns)} nouns")
        return self.nouns[i]

    def verb(self, i: int) -> tuple[str, str]:
        if not 0 <= i < len(self.verbs):
            raise UnknownWord(f"verb index {i} out of range for {len(self.verbs)} verbs")
        return self.verbs[i]

    def noun_index(self, word: str) -> int:
        try:
            return self._noun_lookup()[word]
        except KeyError:
            raise UnknownWord(f"unknown noun {word!r}") from None

    def verb_index(self, word: str) -> int:
        """Index of a verb given either its third-person or infinitive form."""
        try:
            return self._verb_lookup()[word]
        except KeyError:
            raise UnknownWord(f"unknown verb {word!r}") from None

    def _noun_lookup(self):
        cache = self.__dict__.get("_nl")
        if cache is None:
            cache = {w: i for i, w in enumerate(self.nouns)}
            object.__setattr__(self, "_nl", cache)
        return cache

    def _verb_lookup(self):
        cache = self.__dict__.get("_vl")
        if cache is None:
            cache = {}
            for i, (third, inf) in enumerate(self.verbs):
                cache[third] = i
                cache[inf] = i
            object.__setattr__(self, "_vl", cache)
        return cache

    def head(self, n: int, v: int = 0) -> "Vocabulary":
        """The first ``n`` nouns and ``v`` verbs."""
        if n > len(self.nouns) or v > len(self.verbs):
            raise VocabTooSmall(
                f"need {n} nouns and {v} verbs, vocabulary has {len(self.nouns)} and {len(self.verbs)}"
            )
        return Vocabulary(self.nouns[:n], self.verbs[:v])

    def sample(self, rng: random.Random, n: int, v: int = 0) -> "Vocabulary":
        """A random lexicon of ``n`` nouns and ``v`` verbs drawn without replacement."""
        if n > len(self.nouns) or v > len(self.verbs):
            raise VocabTooSmall(
                f"need {n} nouns and {v} verbs, vocabulary has {len(self.nouns)} and {len(self.verbs)}"
            )
        return Vocabulary(tuple(rng.sample(self.nouns, n)), tuple(rng.sample(self.verbs, v)))

    def dumps(self) -> str:
        lines = ["[nouns]", *self.nouns, "[verbs]"]
        lines += [f"{third}/{inf}" for third, inf in self.verbs]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.nouns == other.nouns and self.verbs == other.verbs

    def __hash__(self):
        return hash((self.nouns, self.verbs))


def _check_word(word):
    if not WORD_RE.match(word):
        raise ParseError(f"malformed word {word!r}")
    if word in RESERVED or word.startswith("non-"):
        raise ParseError(f"reserved word {word!r}")


def _check_distinct(words, kind):
    seen = set()
    for w in words:
        if w in seen:
            raise DuplicateEntry(f"duplicate {kind} {w!r}")
        seen.add(w)


def load_vocabulary(source: str) -> Vocabulary:
    """Parse the ``[nouns]``/``[verbs]`` text format.

    Noun lines are bare words, verb lines are ``chases/chase``; ``#`` starts a
    comment. Lines before any section header are an error.
    """
    nouns, verbs = [], []
    section = None
    seen = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("[nouns]", "[verbs]"):
            section = line[1:-1]
            continue
        if section is None:
            raise ParseError("entry before any [nouns]/[verbs] header", lineno)
        if section == "nouns":
            words = [line]
        else:
            if line.count("/") != 1:
                raise ParseError(f"verb entry must be third-person/infinitive, got {line!r}", lineno)
            words = line.split("/")
        for w in words:
            if not WORD_RE.match(w):
                raise ParseError(f"malformed word {w!r}", lineno)
            if w in RESERVED or w.startswith("non-"):
                raise ParseError(f"reserved word {w!r}", lineno)
            if w in seen:
                raise DuplicateEntry(f"line {lineno}: {w!r} already listed on line {seen[w]}")
            seen[w] = lineno
        if section == "nouns":
            nouns.append(line)
        else:
            verbs.append(tuple(words))
    return Vocabulary(tuple(nouns), tuple(verbs))


def read_vocabulary(path) -> Vocabulary:
    return load_vocabulary(Path(path).read_text(encoding="utf-8"))


def default_vocabulary(split: str = "train") -> Vocabulary:
    """One of the two bundled lexicons, ``"train"`` or ``"eval"``; they share no words."""
    if split not in ("train", "eval"):
        raise ValueError(f"split must be 'train' or 'eval', not {split!r}")
    text = resources.files("fragsat").joinpath("data").joinpath(f"{split}.txt").read_text(encoding="utf-8")
    return load_vocabulary(text)


def _half_up(x: Fraction) -> int:
    return int(x + Fraction(1, 2)) if x >= 0 else -int(-x + Fraction(1, 2))


def split_vocabulary(v: Vocabulary, eval_fraction, seed: int):
    """Partition ``v`` into disjoint (train, eval) vocabularies.

    Nouns and verbs are shuffled independently with ``random.Random(seed)``;
    the eval share of each is ``round(len * eval_fraction)`` (half up). Both
    halves keep the original relative order.
    """
    frac = Fraction(str(eval_fraction)) if isinstance(eval_fraction, float) else Fraction(eval_fraction)
    if not 0 < frac < 1:
        raise SplitTooSmall(f"eval_fraction must lie strictly between 0 and 1, got {eval_fraction}")
    rng = random.Random(seed)

    def part(items):
        k = _half_up(len(items) * frac)
        if items and (k == 0 or k == len(items)):
            raise SplitTooSmall(f"fraction {eval_fraction} leaves an empty half of {len(items)} entries")
        order = list(range(len(items)))
        rng.shuffle(order)
        picked = set(order[:k])
        train = tuple(x for i, x in enumerate(items) if i not in picked)
        held = tuple(x for i, x in enumerate(items) if i in picked)
        return train, held

    if not v.nouns:
        raise SplitTooSmall("vocabulary has no nouns")
    train_n, eval_n = part(v.nouns)
    train_v, eval_v = part(v.verbs)
    return Vocabulary(train_n, train_v), Vocabulary(eval_n, eval_v)
