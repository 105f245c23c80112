import hashlib
import random
from dataclasses import replace

import pytest

from fragsat.atp import ProofStats
from fragsat.decide import SAT, UNKNOWN, UNSAT, Verdict, bounded_model_search
from fragsat.errors import EmptyHardSet, GenerationStuck, NoProofFound
from fragsat.gen import (
    GenParams, Instance, check_params, default_params, filter_hard, generate_corpus, generate_instance,
    in_fragment, instance_seed, label_instance, literal_params, sample_sentence,
)
from fragsat.syntax import ALL, Fragment, Relational, Syllogistic, fragment_contains, is_self_inconsistent


def test_published_constants():
    p = literal_params(Fragment.SDag, 20)
    assert (p.p_u, p.p_sbar, p.p_obar, p.n) == (0.8, 0.5, 0.5, 16)
    p = literal_params(Fragment.R, 20)
    assert (p.p_r, p.p_sbar, p.p_obar, p.p_vbar, p.p_u, p.p_uu, p.n, p.v) == (0.2, 0, 0, 0.5, 0.8, 0.8, 12, 3)
    assert literal_params(Fragment.SRel, 30).n == 18
    assert literal_params(Fragment.RDag, 25).n == 16
    assert literal_params(Fragment.SRelNeg, 15).p_rbar == 0.5


def test_calibrated_defaults():
    assert default_params(Fragment.SDag, 20).n == 17
    assert default_params(Fragment.SRel, 30).n == 15
    assert default_params(Fragment.SRelNeg, 30).n == 13
    r = default_params(Fragment.R, 20)
    assert (r.n, r.v, r.p_pbar) == (12, 3, 0.14)
    assert default_params(Fragment.RDag, 20).p_pbar == 0.25
    assert default_params(Fragment.S, 20) == literal_params(Fragment.S, 20)


def test_params_validation():
    with pytest.raises(ValueError):
        GenParams(p_u=1.5)
    with pytest.raises(ValueError):
        GenParams(p_r=0.2, v=0)
    with pytest.raises(ValueError):
        check_params(Fragment.R, replace(default_params(Fragment.R, 20), p_sbar=0.5))
    with pytest.raises(ValueError):
        check_params(Fragment.SRel, replace(default_params(Fragment.SRel, 20), p_rbar=0.5))


def test_forced_branch():
    p = GenParams(p_u=1, n=5, s=1)
    rng = random.Random(0)
    for _ in range(200):
        s = sample_sentence(Fragment.SDag, p, rng)
        assert s.q is ALL and s.subject.positive and s.predicate.positive


def test_relational_nouns_never_negated():
    p = default_params(Fragment.R, 20)
    rng = random.Random(1)
    for _ in range(2000):
        s = sample_sentence(Fragment.R, p, rng)
        assert s.subject.positive
        if isinstance(s, Relational):
            assert s.object.positive


def test_generation_stuck():
    with pytest.raises(GenerationStuck):
        sample_sentence(Fragment.SDag, GenParams(p_u=0, p_obar=1, n=1, s=1), random.Random(0))
    # universals are always fine with one noun
    sample_sentence(Fragment.SDag, GenParams(p_u=1, n=1, s=1), random.Random(0))


def test_instance_defaults_and_determinism():
    a = generate_instance(Fragment.SDag, literal_params(Fragment.SDag, 15), 1)
    assert a.s == 15 and a.lexicon.n == 12
    assert all(isinstance(s, Syllogistic) for s in a.sentences)
    assert generate_instance(Fragment.SDag, literal_params(Fragment.SDag, 15), 1) == a


def test_universal_rate():
    p = default_params(Fragment.SDag, 20)
    rng = random.Random(2)
    draws = [sample_sentence(Fragment.SDag, p, rng) for _ in range(100_000)]
    # rejection of ∃(p, ¬p) draws slightly raises the universal share
    assert abs(sum(s.q is ALL for s in draws) / len(draws) - 0.8) < 0.01


def test_seed_scheme():
    key = "42:sdag:20:3"
    want = int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "big")
    assert instance_seed(42, Fragment.SDag, 20, 3) == want
    assert instance_seed(42, Fragment.SDag, 20, 3, 1) != want


@pytest.mark.parametrize("f", list(Fragment))
def test_closure_and_consistency(f):
    for seed in range(40):
        inst = generate_instance(f, default_params(f, 25), seed)
        assert in_fragment(inst)
        assert all(fragment_contains(f, s) and not is_self_inconsistent(s) for s in inst.sentences)


def test_corpus_shape_and_determinism():
    a = generate_corpus(Fragment.SDag, (15, 18), 5, "graph", 7)
    assert len(a) == 20 and [x.s for x in a] == sorted(x.s for x in a)
    assert all(x.label in (SAT, UNSAT) for x in a)
    assert generate_corpus(Fragment.SDag, (15, 18), 5, "graph", 7) == a
    assert generate_corpus(Fragment.SDag, (15, 18), 5, "graph", 8) != a


def test_monadic_labels_match_oracle():
    corpus = generate_corpus(Fragment.SRel, (15, 30), 10, "monadic", 3, overrides={"n": 4})
    for inst in corpus:
        k = max(1, sum(s.q is not ALL for s in inst.sentences))
        assert bounded_model_search(inst.sentences, k).status is inst.label


def test_timeouts_are_regenerated(monkeypatch):
    import fragsat.atp as atp

    calls = []

    def flaky(ss, cfg=None, stats=True):
        calls.append(1)
        return Verdict(UNKNOWN) if len(calls) % 2 else Verdict(SAT)

    monkeypatch.setattr(atp, "prove", flaky)
    corpus = generate_corpus(Fragment.R, (15, 15), 3, "atp", 0, prover=atp.ProverConfig())
    assert len(corpus) == 3 and all(x.label is SAT and x.meta["retries"] == 1 for x in corpus)


def test_label_with_prover(worked):
    inst = label_instance(Instance(Fragment.SDag, tuple(worked)), "atp")
    assert inst.label is UNSAT and inst.proof == ProofStats(17, 4)


def _fake_corpus(n_sat, ls):
    out = [Instance(Fragment.SDag, (), label=SAT, seed=i) for i in range(n_sat)]
    out += [Instance(Fragment.SDag, (), label=UNSAT, proof=ProofStats(l, 1), seed=100 + i) for i, l in enumerate(ls)]
    return out


def test_filter_hard():
    corpus = _fake_corpus(100, [5] * 50 + [30] * 50)
    assert filter_hard(corpus, 0) == corpus
    hard = filter_hard(corpus, 22, random.Random(0))
    unsat = [x for x in hard if x.label is UNSAT]
    assert len(unsat) == 50 and all(x.proof.l >= 22 for x in unsat)
    assert abs(sum(x.label is SAT for x in hard) / len(hard) - 0.5) <= 0.01
    assert all(x.construction == "hard-filtered" for x in hard)
    with pytest.raises(EmptyHardSet):
        filter_hard(corpus, 42)
    with pytest.raises(NoProofFound):
        filter_hard([Instance(Fragment.SDag, (), label=UNSAT)], 10)
