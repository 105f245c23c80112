import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from conftest import argument_one, random_sentences
from fragsat.decide import (
    SAT, UNKNOWN, UNSAT, Model, bounded_model_search, build_literal_graph, decide, decide_graph,
    decide_monadic, dpll, forbidden_configs, minimal_config_size, satisfies, search_space,
)
from fragsat.errors import BudgetExceeded, WrongFragment
from fragsat.gen import default_params, generate_instance
from fragsat.syntax import ALL, EXISTS, Fragment, Literal, Relative, Syllogistic, negate, neg, pos

A, B, C, D = range(4)


def test_graph_edges():
    g = build_literal_graph([Syllogistic(ALL, pos(A), pos(B))])
    assert g.edges == {(pos(A), pos(B)), (neg(B), neg(A))}
    g = build_literal_graph([Syllogistic(ALL, pos(A), neg(B))])
    assert g.edges == {(pos(A), neg(B)), (pos(B), neg(A))}
    g = build_literal_graph([], nouns=[A])
    assert g.vertices == {pos(A), neg(A)} and not g.edges


def test_worked_example(worked):
    v = decide_graph(worked)
    assert v.status is UNSAT
    c = v.config
    assert (c.kind, c.condition, c.size, c.sentence) == ("path", "iii", 3, 3)
    assert c.paths == ((pos(A), pos(B), pos(C), neg(D)),)
    assert decide_monadic(worked).status is UNSAT
    assert bounded_model_search(worked, 1).status is UNSAT


def test_single_existential():
    s = [Syllogistic(EXISTS, pos(A), pos(B))]
    assert decide_graph(s).status is SAT
    v = bounded_model_search(s, 1)
    assert v.status is SAT and v.witness.size == 1
    assert v.witness.unary[A] == {0} and v.witness.unary[B] == {0}


def test_mutual_universal():
    ss = [Syllogistic(ALL, neg(A), pos(A)), Syllogistic(ALL, pos(A), neg(A))]
    v = decide_graph(ss)
    assert v.status is UNSAT and v.config.kind == "mutual" and v.config.literal.noun == A
    assert bounded_model_search(ss, 1).status is UNSAT


def test_monadic_examples():
    ss = [Relative(ALL, A, pos(B), pos(C)), Relative(EXISTS, A, pos(B), neg(C))]
    assert decide_monadic(ss).status is UNSAT
    assert decide_monadic([]).status is SAT


def test_argument_one_needs_the_prover():
    premises, conclusion = argument_one()
    phi = premises + [negate(conclusion)]
    assert bounded_model_search(phi, 2).status is UNKNOWN
    assert bounded_model_search(premises, 2).status is SAT


def test_wrong_fragment():
    premises, _ = argument_one()
    with pytest.raises(WrongFragment):
        decide_graph(premises)
    with pytest.raises(WrongFragment):
        decide_monadic(premises)
    with pytest.raises(WrongFragment):
        decide(premises, "graph")


def test_budget():
    premises, _ = argument_one()
    with pytest.raises(BudgetExceeded):
        bounded_model_search(premises, 5)
    with pytest.raises(BudgetExceeded):
        bounded_model_search(premises, 4, budget=10)


def test_dpll():
    assert dpll([(1, 2), (-1,), (-2, 3)]) == {1: False, 2: True, 3: True}
    assert dpll([(1,), (-1,)]) is None
    assert dpll([]) == {}
    assert dpll([(1, 2)], assumptions=(-1, -2)) is None


def test_dispatch_agrees_on_sdag():
    rng = random.Random(5)
    for _ in range(50):
        ss = random_sentences(Fragment.SDag, 8, 4, 0, rng)
        assert decide(ss, "graph").status is decide(ss, "monadic").status


@given(st.integers(0, 2**32))
def test_contrapositive_symmetry(seed):
    ss = random_sentences(Fragment.SDag, 12, 5, 0, random.Random(seed))
    edges = build_literal_graph(ss).edges
    assert all((b.bar, a.bar) in edges for a, b in edges)


def _all_pairs(ss):
    """Floyd-Warshall distances over the literal graph, independent of the BFS in the decider."""
    g = build_literal_graph(ss)
    vs = sorted(g.vertices)
    inf = float("inf")
    dist = {(a, b): (0 if a == b else inf) for a in vs for b in vs}
    for a, b in g.edges:
        dist[a, b] = min(dist[a, b], 1)
    for k in vs:
        for a in vs:
            for b in vs:
                if dist[a, k] + dist[k, b] < dist[a, b]:
                    dist[a, b] = dist[a, k] + dist[k, b]
    return dist


@settings(max_examples=150)
@given(st.integers(0, 2**32))
def test_reported_configuration_is_minimal(seed):
    ss = random_sentences(Fragment.SDag, 10, 5, 0, random.Random(seed))
    dist = _all_pairs(ss)
    sizes = []
    for s in ss:
        if s.q is EXISTS:
            l, m = s.subject, s.predicate
            sizes += [dist[l, l.bar], dist[m, m.bar], dist[l, m.bar]]
    for n in {x for s in ss for x in (s.subject.noun, s.predicate.noun)}:
        o = Literal(n, True)
        sizes.append(max(dist[o, o.bar], dist[o.bar, o]))
    best = min(sizes, default=float("inf"))
    got = minimal_config_size(ss)
    assert (got is None) == (best == float("inf"))
    if got is not None:
        assert got == best
        cfg = forbidden_configs(ss)[0]
        g = build_literal_graph(ss)
        for path in cfg.paths:
            assert all(b in g.succ[a] for a, b in zip(path, path[1:]))
            assert path == g.shortest_path(path[0], path[-1])


@given(st.integers(0, 2**32))
def test_monotonicity(seed):
    rng = random.Random(seed)
    ss = random_sentences(Fragment.SDag, 10, 4, 0, rng)
    if decide_graph(ss).status is UNSAT:
        more = ss + random_sentences(Fragment.SDag, 5, 4, 0, rng)
        assert decide_graph(more).status is UNSAT
        assert decide_monadic(more).status is UNSAT


@given(st.integers(0, 2**32))
def test_order_independence(seed):
    rng = random.Random(seed)
    ss = random_sentences(Fragment.SRelNeg, 10, 4, 0, rng)
    shuffled = list(ss)
    rng.shuffle(shuffled)
    assert decide_monadic(ss).status is decide_monadic(shuffled).status


@given(st.integers(0, 2**32))
def test_witnesses_are_models(seed):
    rng = random.Random(seed)
    ss = random_sentences(Fragment.SRelNeg, 6, 3, 0, rng)
    v = decide_monadic(ss)
    if v.status is SAT:
        assert all(satisfies(v.witness, s) for s in ss)
    w = bounded_model_search(ss, 6)
    assert w.status is v.status
    if w.status is SAT:
        assert all(satisfies(w.witness, s) for s in ss)


def test_relational_witness(worked):
    premises, _ = argument_one()
    v = bounded_model_search(premises, 2)
    assert all(satisfies(v.witness, s) for s in premises)


def test_search_space_grows():
    premises, _ = argument_one()
    assert search_space(premises, 1) < search_space(premises, 2)


def test_graph_is_fast():
    insts = [generate_instance(Fragment.SDag, default_params(Fragment.SDag, 30), seed).sentences for seed in range(10_000)]
    t = time.perf_counter()
    for ss in insts:
        decide_graph(ss)
    assert time.perf_counter() - t < 1.0
