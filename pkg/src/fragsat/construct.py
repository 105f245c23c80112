"""Constructed instances of controlled difficulty.

S† instances contain one forbidden configuration of a requested size ``d``
(a literal-graph path of ``d`` edges) plus random padding that never
introduces a smaller one. R instances contain a ∀∀-configuration with
parameter ``d`` (``6d`` sentences) plus padding that is satisfiable on its
own and plays no part in the prover's refutation. Satisfiable counterparts
reverse one implication of the configuration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .decide import SAT, UNSAT, decide_graph, minimal_config_size
from .errors import ConstructionStuck, VocabTooSmall
from .gen import Instance, default_params, sample_sentence
from .syntax import ALL, EXISTS, Fragment, Literal, Relational, Syllogistic
from .vocab import Vocabulary, default_vocabulary

RETRY_BUDGET = 10_000
PATH_KINDS = ("i", "ii", "iii")
KINDS = PATH_KINDS + ("mutual",)


@dataclass(frozen=True)
class ChainSpec:
    """``kind`` is one of ``i``, ``ii``, ``iii``, ``mutual``, or None to draw uniformly from i/ii/iii."""

    d: int
    kind: str | None = None
    target_label: object = UNSAT
    s: int = 20

    def __post_init__(self):
        if self.kind is not None and self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.d < 1:
            raise ValueError("d must be at least 1")
        core = 2 * self.d if self.kind == "mutual" else self.d + 1
        if self.s < core:
            raise ValueError(f"s={self.s} is smaller than the {core}-sentence core")


@dataclass(frozen=True)
class ForallForallSpec:
    """``polarities`` fixes the witness-chain verb signs (2(d-1) booleans); None draws them uniformly."""

    d: int
    target_label: object = UNSAT
    s: int = 20
    polarities: tuple | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.s < 6 * self.d:
            raise ValueError(f"s={self.s} is smaller than the {6 * self.d}-sentence core")
        if self.polarities is not None and len(self.polarities) != 2 * (self.d - 1):
            raise ValueError(f"need {2 * (self.d - 1)} witness polarities")


def _noun_count(vocab) -> int:
    return vocab if isinstance(vocab, int) else vocab.n


# -- S† chains --------------------------------------------------------------------

def _edge(a: Literal, b: Literal, rng) -> Syllogistic:
    """A universal sentence whose graph edges include a → b, in a random one of its two forms."""
    if rng.random() < 0.5:
        return Syllogistic(ALL, a, b)
    return Syllogistic(ALL, b.bar, a.bar)


def _path(nouns, rng, first=None):
    """Literals over ``nouns`` with random polarities (``first`` fixes the start)."""
    lits = [Literal(x, rng.random() < 0.5) for x in nouns]
    if first is not None:
        lits[0] = first
    return lits


def build_chain(spec: ChainSpec, vocab, rng: random.Random, nouns=None):
    """Core sentences of one forbidden configuration of size ``spec.d``.

    Returns ``(sentences, kind, chain)``, where ``chain`` lists the positions
    of the universal chain sentences (the candidates for reversal).
    """
    d = spec.d
    kind = spec.kind or rng.choice(PATH_KINDS)
    need = 2 * d if kind == "mutual" else d + 2
    if _noun_count(vocab) < need:
        raise VocabTooSmall(f"a size-{d} {kind} configuration needs {need} nouns, have {_noun_count(vocab)}")
    pool = list(nouns) if nouns is not None else list(range(_noun_count(vocab)))
    picked = rng.sample(pool, need)
    if kind == "iii":
        lits = _path(picked[: d + 1], rng)
        core = [_edge(lits[k], lits[k + 1], rng) for k in range(d)]
        l, m = lits[0], lits[-1].bar
        core.append(Syllogistic(EXISTS, l, m) if rng.random() < 0.5 else Syllogistic(EXISTS, m, l))
        return core, kind, list(range(d))
    if kind in ("i", "ii"):
        lits = _path(picked[:d], rng)
        loop = lits + [lits[0].bar]
        core = [_edge(loop[k], loop[k + 1], rng) for k in range(d)]
        other = Literal(picked[d], rng.random() < 0.5)
        trigger = Syllogistic(EXISTS, lits[0], other) if kind == "i" else Syllogistic(EXISTS, other, lits[0])
        core.append(trigger)
        return core, kind, list(range(d))
    # mutual: o ⇒ ō and ō ⇒ o, both of length d
    o = Literal(picked[0], rng.random() < 0.5)
    there = [o] + _path(picked[1:d], rng) + [o.bar] if d > 1 else [o, o.bar]
    back = [o.bar] + _path(picked[d : 2 * d - 1], rng) + [o] if d > 1 else [o.bar, o]
    core = [_edge(there[k], there[k + 1], rng) for k in range(d)]
    core += [_edge(back[k], back[k + 1], rng) for k in range(d)]
    return core, kind, list(range(2 * d))


def reverse(s):
    """The converse of a universal implication: ∀(a,b) ↦ ∀(b,a), ∀(a,∀(b,±r)) ↦ ∀(b,∀(a,±r))."""
    if isinstance(s, Syllogistic) and s.q is ALL:
        return Syllogistic(ALL, s.predicate, s.subject)
    if isinstance(s, Relational) and s.sq is ALL and s.oq is ALL:
        return Relational(ALL, s.object, ALL, s.subject, s.verb, s.verb_positive)
    raise ValueError(f"not a reversible implication: {s!r}")


def make_constructed_syllogistic(
    spec: ChainSpec,
    params=None,
    rng: random.Random | None = None,
    vocab: Vocabulary | None = None,
    *,
    budget: int = RETRY_BUDGET,
) -> Instance:
    """An S† instance of ``spec.s`` sentences around one configuration of size ``spec.d``.

    Unsatisfiable target: padding sentences that would create a configuration
    smaller than ``d`` are resampled. Satisfiable target: one chain
    implication is reversed and padding that makes the set unsatisfiable is
    resampled. Sentences are shuffled and the label re-checked.
    """
    rng = rng or random.Random()
    params = params or default_params(Fragment.SDag, spec.s)
    n = max(params.n, 2 * spec.d if spec.kind == "mutual" else spec.d + 2)
    params = replace(params, n=n, s=spec.s)
    core, kind, chain = build_chain(spec, n, rng)
    reversed_at = None
    if spec.target_label is SAT:
        reversed_at = rng.choice(chain)
        core[reversed_at] = reverse(core[reversed_at])
    padding = _pad_syllogistic(core, spec, params, rng, budget)
    return _finish(Fragment.SDag, core, padding, spec.target_label, rng, vocab, params, "chain",
                   {"d": spec.d, "kind": kind, "reversed": reversed_at is not None}, lambda ss: _check_graph(ss, spec))


def _pad_syllogistic(core, spec, params, rng, budget):
    padding = []
    tries = 0
    while len(core) + len(padding) < spec.s:
        tries += 1
        if tries > budget:
            raise ConstructionStuck(f"padding rejected {budget} times (d={spec.d}, s={spec.s})")
        x = sample_sentence(Fragment.SDag, params, rng)
        trial = core + padding + [x]
        if spec.target_label is UNSAT:
            if minimal_config_size(trial) != spec.d:
                continue
        elif decide_graph(trial).status is not SAT:
            continue
        padding.append(x)
    return padding


def _check_graph(ss, spec):
    v = decide_graph(ss)
    if v.status is not spec.target_label:
        raise ConstructionStuck(f"constructed instance decided {v.status.value}, wanted {spec.target_label.value}")
    if spec.target_label is UNSAT and v.config.size != spec.d:
        raise ConstructionStuck(f"minimal configuration has size {v.config.size}, wanted {spec.d}")
    return {"config_size": v.config.size} if v.config else {}


def make_paired_syllogistic(spec: ChainSpec, params=None, rng=None, vocab=None, *, budget: int = RETRY_BUDGET):
    """An unsatisfiable instance and its satisfiable twin that differs only in one reversed chain sentence."""
    rng = rng or random.Random()
    params = params or default_params(Fragment.SDag, spec.s)
    n = max(params.n, 2 * spec.d if spec.kind == "mutual" else spec.d + 2)
    params = replace(params, n=n, s=spec.s)
    unsat_spec = replace(spec, target_label=UNSAT)
    for _ in range(budget):
        core, kind, chain = build_chain(unsat_spec, n, rng)
        padding = _pad_syllogistic(core, unsat_spec, params, rng, budget)
        for k in rng.sample(chain, len(chain)):
            twin = list(core)
            twin[k] = reverse(twin[k])
            if decide_graph(twin + padding).status is SAT:
                break
        else:
            continue
        order = list(range(len(core) + len(padding)))
        rng.shuffle(order)
        lexicon = (vocab or default_vocabulary("train")).sample(rng, params.n, params.v)
        out = []
        for target_label, ss in ((UNSAT, core + padding), (SAT, twin + padding)):
            shuffled = tuple(ss[i] for i in order)
            meta = {"d": spec.d, "kind": kind, "reversed": target_label is SAT, "core": sorted(order.index(i) for i in range(len(core)))}
            meta.update(_check_graph(shuffled, replace(spec, target_label=target_label)))
            out.append(Instance(Fragment.SDag, shuffled, lexicon, label=target_label, params=params, construction="chain", meta=meta))
        return tuple(out)
    raise ConstructionStuck(f"no reversible twin found in {budget} attempts")


def _finish(fragment, core, padding, target_label, rng, vocab, params, construction, meta, check, proof=None, order=None):
    ss = core + padding
    if order is None:
        order = list(range(len(ss)))
        rng.shuffle(order)
    shuffled = tuple(ss[i] for i in order)
    meta = dict(meta)
    meta["core"] = sorted(order.index(i) for i in range(len(core)))
    meta.update(check(shuffled) or {})
    lexicon = (vocab or default_vocabulary("train")).sample(rng, params.n, params.v)
    return Instance(fragment, shuffled, lexicon, label=target_label, params=params, construction=construction,
                    proof=proof, meta=meta)


# -- R ∀∀-configurations -------------------------------------------------------------

def forall_forall_nouns(d: int) -> int:
    return 6 * d


def build_forall_forall(spec: ForallForallSpec, vocab, rng: random.Random, verbs: int | None = None):
    """The 6d core sentences in schema order, plus the positions of the four implication chains.

    Chains, each of ``d`` sentences: p ⇒ o1, p ⇒ o2, q ⇒ ∀(o1, r),
    q' ⇒ ∀(o2, ¬r) (with q' = q), then witness chains ending in ∃p and ∃q.
    """
    d = spec.d
    n = _noun_count(vocab)
    v = verbs if verbs is not None else (vocab.v if isinstance(vocab, Vocabulary) else 1)
    if n < 6 * d:
        raise VocabTooSmall(f"a ∀∀-configuration with d={d} needs {6 * d} nouns, have {n}")
    if v < 1:
        raise VocabTooSmall("a ∀∀-configuration needs a verb")
    nouns = iter(rng.sample(range(n), 6 * d))
    r = rng.randrange(v)
    pol = list(spec.polarities) if spec.polarities is not None else [rng.random() < 0.5 for _ in range(2 * (d - 1))]
    p, q, o1, o2 = next(nouns), next(nouns), next(nouns), next(nouns)
    ps = [p] + [next(nouns) for _ in range(d - 1)] + [o1]
    ps2 = [p] + [next(nouns) for _ in range(d - 1)] + [o2]
    qs = [q] + [next(nouns) for _ in range(d - 1)]
    qs2 = [q] + [next(nouns) for _ in range(d - 1)]
    us = [next(nouns) for _ in range(d)] + [p]
    us2 = [next(nouns) for _ in range(d)] + [q]
    P = lambda x: Literal(x, True)
    chains = [
        [Syllogistic(ALL, P(a), P(b)) for a, b in zip(ps, ps[1:])],
        [Syllogistic(ALL, P(a), P(b)) for a, b in zip(ps2, ps2[1:])],
        [Syllogistic(ALL, P(a), P(b)) for a, b in zip(qs, qs[1:])] + [Relational(ALL, P(qs[-1]), ALL, P(o1), r, True)],
        [Syllogistic(ALL, P(a), P(b)) for a, b in zip(qs2, qs2[1:])] + [Relational(ALL, P(qs2[-1]), ALL, P(o2), r, False)],
    ]
    for u, signs in ((us, pol[: d - 1]), (us2, pol[d - 1 :])):
        chain = [Syllogistic(EXISTS, P(u[0]), P(u[1]))]
        chain += [Relational(ALL, P(u[k]), EXISTS, P(u[k + 1]), r, signs[k - 1]) for k in range(1, d)]
        chains.append(chain)
    core = [s for c in chains for s in c]
    implications = list(range(4 * d))
    return core, implications


def make_constructed_relational(
    spec: ForallForallSpec,
    params=None,
    rng: random.Random | None = None,
    prover=None,
    vocab: Vocabulary | None = None,
    *,
    budget: int = RETRY_BUDGET,
) -> Instance:
    """An R instance of ``spec.s`` sentences around one ∀∀-configuration.

    Unsatisfiable target: every padding sentence keeps the padding
    satisfiable on its own, and the final refutation may only use core
    sentences. Satisfiable target: one implication of the first four chains
    is reversed and padding keeps the whole set satisfiable.
    """
    from .atp import ProverConfig, prove

    rng = rng or random.Random()
    prover = prover or ProverConfig.from_env()
    params = params or default_params(Fragment.R, spec.s)
    params = replace(params, n=max(params.n, 6 * spec.d), s=spec.s)
    core, implications = build_forall_forall(spec, params.n, rng, verbs=params.v)
    reversed_at = None
    if spec.target_label is SAT:
        reversed_at = rng.choice(implications)
        core[reversed_at] = reverse(core[reversed_at])
    k = len(core)
    padding = []
    tries = 0
    verdict = order = None
    while True:
        if len(padding) == spec.s - k:
            verdict, order = _final_audit(core + padding, k, spec.target_label, rng, prover)
            if verdict is not None:
                break
            padding = []  # start over: no ordering passed the final audit
        tries += 1
        if tries > budget:
            raise ConstructionStuck(f"padding rejected {budget} times (d={spec.d}, s={spec.s})")
        x = sample_sentence(Fragment.R, params, rng)
        if spec.target_label is UNSAT:
            if prove(padding + [x], prover, stats=False).status is not SAT:
                continue
        elif prove(core + padding + [x], prover, stats=False).status is not SAT:
            continue
        padding.append(x)

    def check(shuffled):
        return {}

    meta = {"d": spec.d, "reversed": reversed_at is not None}
    return _finish(Fragment.R, core, padding, spec.target_label, rng, vocab, params, "forallforall", meta, check,
                   proof=verdict.proof if spec.target_label is UNSAT else None, order=order)


AUDIT_SHUFFLES = 8


def _final_audit(ss, k, target_label, rng, prover):
    """(verdict, order) for a shuffle of ``ss`` that passes the audit, or (None, None).

    The prover sees the shuffled order, so the unsatisfiable audit (the
    refutation cites core sentences only) holds for the instance as emitted.
    """
    from .atp import prove, used_axioms

    for _ in range(AUDIT_SHUFFLES):
        order = list(range(len(ss)))
        rng.shuffle(order)
        verdict = prove([ss[i] for i in order], prover)
        if verdict.status is not target_label:
            return None, None
        if target_label is not UNSAT:
            return verdict, order
        core_pos = {order.index(i) for i in range(k)}
        used = used_axioms(verdict.detail)
        if verdict.proof is not None and used and all(
            name.startswith("s") and name[1:].isdigit() and int(name[1:]) - 1 in core_pos for name in used
        ):
            return verdict, order
    return None, None


def make_constructed(fragment: Fragment, d: int, s: int, target_label, rng, *, kind=None, prover=None, vocab=None):
    """Dispatch on fragment: S† chains or R ∀∀-configurations."""
    if fragment is Fragment.SDag:
        return make_constructed_syllogistic(ChainSpec(d, kind, target_label, s), None, rng, vocab)
    if fragment is Fragment.R:
        return make_constructed_relational(ForallForallSpec(d, target_label, s), None, rng, prover, vocab)
    raise ValueError(f"constructed instances exist for S† and R only, not {fragment.name}")
