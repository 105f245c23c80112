"""Internal decision procedures.

Three independent deciders live here:

* :func:`decide_graph` -- reachability in the literal graph (S and S†),
* :func:`decide_monadic` -- propositional reduction over 1-types (S†, Srel, SrelN),
* :func:`bounded_model_search` -- brute-force enumeration of small structures.

The first two are complete on their fragments; the oracle is complete on
monadic input once the domain bound reaches the number of existential
sentences, and only semi-decides relational input.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import BudgetExceeded, WrongFragment
from .syntax import (
    ALL,
    EXISTS,
    Literal,
    Relational,
    Relative,
    Syllogistic,
    nouns_of,
    verbs_of,
)


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Model:
    """Finite structure over ``range(size)``; predicates are keyed by noun/verb index."""

    size: int
    unary: dict = field(default_factory=dict)
    binary: dict = field(default_factory=dict)

    def has(self, lit: Literal, e: int) -> bool:
        return (e in self.unary.get(lit.noun, ())) == lit.positive


@dataclass(frozen=True)
class ForbiddenConfig:
    """A witness of unsatisfiability.

    ``kind`` is ``"path"`` (conditions i/ii/iii against the existential at
    ``sentence``), ``"mutual"`` (o ⇒ ō and ō ⇒ o) or ``"forall-forall"``.
    ``paths`` hold the literal sequences; ``size`` counts edges (the longer
    path for ``"mutual"``, 6d for ``"forall-forall"``).
    """

    kind: str
    size: int
    condition: str | None = None
    sentence: int | None = None
    literal: Literal | None = None
    paths: tuple = ()

    def summary(self) -> dict:
        out = {"kind": self.kind, "size": self.size}
        if self.condition is not None:
            out["condition"] = self.condition
        if self.sentence is not None:
            out["sentence"] = self.sentence
        return out


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Model | None = None
    config: ForbiddenConfig | None = None
    proof: object = None  # atp.ProofStats when an external prover produced a refutation
    detail: str = ""

    @property
    def satisfiable(self) -> bool | None:
        if self.status is Status.UNKNOWN:
            return None
        return self.status is Status.SAT


SAT = Status.SAT
UNSAT = Status.UNSAT
UNKNOWN = Status.UNKNOWN


def _sentences(phi):
    return list(getattr(phi, "sentences", phi))


# -- literal graph ---------------------------------------------------------------

@dataclass(frozen=True)
class LiteralGraph:
    vertices: frozenset
    succ: dict  # Literal -> tuple of successor literals, sorted

    @property
    def edges(self) -> frozenset:
        return frozenset((a, b) for a, bs in self.succ.items() for b in bs)

    def distances(self, src: Literal) -> dict:
        """BFS distances and predecessor links from ``src``."""
        dist, prev = {src: 0}, {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for w in self.succ.get(u, ()):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    prev[w] = u
                    queue.append(w)
        return dist, prev

    def shortest_path(self, src: Literal, dst: Literal):
        dist, prev = self.distances(src)
        if dst not in dist:
            return None
        return _unwind(prev, dst)


def _unwind(prev, dst):
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return tuple(reversed(path))


def build_literal_graph(phi, nouns=()) -> LiteralGraph:
    """Edges (ℓ, m) and (m̄, ℓ̄) for every universal syllogistic sentence ∀x(ℓ → m)."""
    ss = _sentences(phi)
    occurring = set(nouns)
    for s in ss:
        occurring.update(nouns_of(s))
    vertices = frozenset(Literal(n, b) for n in occurring for b in (True, False))
    succ = {v: set() for v in vertices}
    for s in ss:
        if isinstance(s, Syllogistic) and s.q is ALL:
            succ[s.subject].add(s.predicate)
            succ[s.predicate.bar].add(s.subject.bar)
    return LiteralGraph(vertices, {v: tuple(sorted(ws)) for v, ws in succ.items()})


def _code(l: Literal) -> int:
    # same order as Literal: by noun, negative before positive
    return 2 * l.noun + l.positive


def _decode(c: int) -> Literal:
    return Literal(c >> 1, bool(c & 1))


def forbidden_configs(phi):
    """Every minimal-per-trigger violation, sorted by (size, tie-break order).

    The search runs on integer literal codes (``2·noun + positive``, with
    ``code ^ 1`` the opposite literal); successor lists are sorted, so the
    BFS paths are the ones :meth:`LiteralGraph.shortest_path` returns.
    """
    ss = _sentences(phi)
    succ: dict = {}
    for s in ss:
        if isinstance(s, Syllogistic) and s.q is ALL:
            a, b = _code(s.subject), _code(s.predicate)
            succ.setdefault(a, set()).add(b)
            succ.setdefault(b ^ 1, set()).add(a ^ 1)
    succ = {v: sorted(ws) for v, ws in succ.items()}
    bfs = {}

    def from_(src):
        if src not in bfs:
            prev = {src: None}
            dist = {src: 0}
            frontier = [src]
            k = 0
            while frontier:
                k += 1
                nxt = []
                for u in frontier:
                    for w in succ.get(u, ()):
                        if w not in dist:
                            dist[w] = k
                            prev[w] = u
                            nxt.append(w)
                frontier = nxt
            bfs[src] = (dist, prev)
        return bfs[src]

    def path(prev, dst):
        return tuple(_decode(c) for c in _unwind(prev, dst))

    found = []
    for idx, s in enumerate(ss):
        if not (isinstance(s, Syllogistic) and s.q is EXISTS):
            continue
        l, m = _code(s.subject), _code(s.predicate)
        for order, (cond, src, dst) in enumerate((("i", l, l ^ 1), ("ii", m, m ^ 1), ("iii", l, m ^ 1))):
            dist, prev = from_(src)
            if dst in dist:
                found.append(((dist[dst], 0, idx, order), ("path", dist[dst], cond, idx, None, (prev, dst))))
    for noun in sorted({n for s in ss for n in nouns_of(s)}):
        o = 2 * noun + 1
        if o not in succ or (o ^ 1) not in succ:
            continue
        d1, p1 = from_(o)
        if o ^ 1 not in d1:
            continue
        d2, p2 = from_(o ^ 1)
        if o in d2:
            size = max(d1[o ^ 1], d2[o])
            found.append(((size, 1, noun, 0), ("mutual", size, None, None, _decode(o), (p1, o ^ 1), (p2, o))))
    found.sort(key=lambda t: t[0])
    out = []
    for _, (kind, size, cond, idx, lit, *walks) in found:
        out.append(ForbiddenConfig(kind, size, cond, idx, lit, tuple(path(p, d) for p, d in walks)))
    return out


def decide_graph(phi) -> Verdict:
    """Decide a set of S† sentences by forbidden-path detection.

    The reported configuration has minimal size; ties go to the earliest
    existential sentence, then to condition i before ii before iii, and
    path violations before mutual ones.
    """
    ss = _sentences(phi)
    for s in ss:
        if not isinstance(s, Syllogistic):
            raise WrongFragment(f"decide_graph handles syllogistic sentences only, got {type(s).__name__}")
    configs = forbidden_configs(ss)
    if configs:
        return Verdict(UNSAT, config=configs[0])
    return Verdict(SAT)


def minimal_config_size(phi) -> int | None:
    configs = forbidden_configs(phi)
    return configs[0].size if configs else None


# -- monadic reduction -----------------------------------------------------------

def _lit_int(l: Literal) -> int:
    return (l.noun + 1) if l.positive else -(l.noun + 1)


def _clause(s):
    """Clause of a universal monadic sentence as a tuple of signed ints."""
    if isinstance(s, Syllogistic):
        return (-_lit_int(s.subject), _lit_int(s.predicate))
    return (-(s.head + 1), -_lit_int(s.rel), _lit_int(s.predicate))


def _units(s):
    if isinstance(s, Syllogistic):
        return (_lit_int(s.subject), _lit_int(s.predicate))
    return (s.head + 1, _lit_int(s.rel), _lit_int(s.predicate))


def dpll(clauses, assumptions=()):
    """Satisfying assignment {atom: bool} of a CNF over signed ints, or None.

    Unit propagation to fixpoint, then branching on the lowest unassigned atom
    (positive phase first).
    """
    clauses = [tuple(set(c)) for c in clauses]
    for a in assumptions:
        clauses.append((a,))
    return _dpll(clauses, {})


def _dpll(clauses, assign):
    assign = dict(assign)
    while True:
        unit = None
        remaining = []
        for c in clauses:
            open_lits = []
            sat = False
            for lit in c:
                val = assign.get(abs(lit))
                if val is None:
                    open_lits.append(lit)
                elif val == (lit > 0):
                    sat = True
                    break
            if sat:
                continue
            if not open_lits:
                return None
            if len(open_lits) == 1 and unit is None:
                unit = open_lits[0]
            remaining.append(c)
        if unit is None:
            break
        assign[abs(unit)] = unit > 0
        clauses = remaining
    if not remaining:
        return assign
    atom = min(abs(l) for c in remaining for l in c if abs(l) not in assign)
    for phase in (True, False):
        out = _dpll(remaining, {**assign, atom: phase})
        if out is not None:
            return out
    return None


def decide_monadic(phi) -> Verdict:
    """Decide S† / Srel / SrelN sentences by propositional satisfiability of 1-types.

    Satisfiable iff the universal clauses admit some type (the domain is
    non-empty) and, for each existential sentence, the universal clauses plus
    that sentence's conjuncts are satisfiable. The witness model has one
    element per existential (or a single element when there are none).
    """
    ss = _sentences(phi)
    for s in ss:
        if isinstance(s, Relational):
            raise WrongFragment("decide_monadic cannot handle relational sentences")
    clauses = [_clause(s) for s in ss if s.q is ALL]
    existentials = [(i, s) for i, s in enumerate(ss) if s.q is EXISTS]
    types = []
    if not existentials:
        base = dpll(clauses)
        if base is None:
            return Verdict(UNSAT, detail="universal sentences admit no element")
        types.append(base)
    for idx, s in existentials:
        t = dpll(clauses, _units(s))
        if t is None:
            return Verdict(UNSAT, detail=f"existential sentence {idx} has no admissible witness")
        types.append(t)
    unary = {}
    for e, t in enumerate(types):
        for atom, val in t.items():
            if val:
                unary.setdefault(atom - 1, set()).add(e)
    model = Model(len(types), {k: frozenset(v) for k, v in unary.items()}, {})
    return Verdict(SAT, witness=model)


# -- bounded model search ----------------------------------------------------------

DEFAULT_DOMAIN_LIMIT = 4
DEFAULT_BUDGET = 2 * 10**8


def _type_has(t: int, pos_of: dict, lit: Literal) -> bool:
    return bool((t >> pos_of[lit.noun]) & 1) == lit.positive


def _monadic_holds_at(s, t, pos_of) -> bool:
    """Does an element of type ``t`` satisfy the matrix of monadic sentence ``s``?"""
    if isinstance(s, Syllogistic):
        a, b = _type_has(t, pos_of, s.subject), _type_has(t, pos_of, s.predicate)
    else:
        a = _type_has(t, pos_of, Literal(s.head)) and _type_has(t, pos_of, s.rel)
        b = _type_has(t, pos_of, s.predicate)
    return (not a or b) if s.q is ALL else (a and b)


_BITS_CACHE = {}


def _relation_bits(k):
    """bits[a, b, r] = whether relation number r contains (a, b)."""
    if k not in _BITS_CACHE:
        r = np.arange(1 << (k * k), dtype=np.int64)
        bits = np.empty((k, k, r.size), dtype=bool)
        for a in range(k):
            for b in range(k):
                bits[a, b] = (r >> (a * k + b)) & 1
        _BITS_CACHE[k] = bits
    return _BITS_CACHE[k]


def _relational_truth(s, types, pos_of, bits):
    """Truth of relational sentence ``s`` for every relation, given element types."""
    k = len(types)
    subj = [e for e in range(k) if _type_has(types[e], pos_of, s.subject)]
    obj = [e for e in range(k) if _type_has(types[e], pos_of, s.object)]
    m = bits.shape[2]
    per_subject = []
    for a in subj:
        if obj:
            cells = bits[a, obj] if s.verb_positive else ~bits[a, obj]
            inner = cells.all(axis=0) if s.oq is ALL else cells.any(axis=0)
        else:
            inner = np.full(m, s.oq is ALL)
        per_subject.append(inner)
    if not per_subject:
        return np.full(m, s.sq is ALL)
    stack = np.stack(per_subject)
    return stack.all(axis=0) if s.sq is ALL else stack.any(axis=0)


def search_space(phi, max_domain: int) -> int:
    """Number of candidate structures the oracle would visit in the worst case."""
    ss = _sentences(phi)
    nouns = sorted({n for s in ss for n in nouns_of(s)})
    verbs = sorted({v for s in ss for v in verbs_of(s)})
    allowed = _allowed_types(ss, nouns)
    t = len(allowed)
    if not verbs:
        return sum(comb(t, j) for j in range(1, max_domain + 1))
    return sum(comb(t + k - 1, k) * len(verbs) * (1 << (k * k)) for k in range(1, max_domain + 1))


def _allowed_types(ss, nouns):
    pos_of = {n: i for i, n in enumerate(nouns)}
    universal = [s for s in ss if not isinstance(s, Relational) and s.q is ALL]
    return [
        t for t in range(1 << len(nouns))
        if all(_monadic_holds_at(s, t, pos_of) for s in universal)
    ]


def bounded_model_search(
    phi,
    max_domain: int,
    *,
    budget: int = DEFAULT_BUDGET,
    domain_limit: int = DEFAULT_DOMAIN_LIMIT,
) -> Verdict:
    """Enumerate structures of size 1..max_domain and evaluate the sentences directly.

    Element types are enumerated as multisets (sets for monadic input, where
    repeated types are redundant) in lexicographic order of type bitmasks;
    for each assignment of types, relations are checked verb by verb over all
    2^(k*k) extensions. A type violating a universal monadic sentence can
    occur in no model and is skipped.

    A failed search is reported UNSAT only for monadic input with
    ``max_domain >= max(1, #existentials)``; otherwise UNKNOWN.
    """
    ss = _sentences(phi)
    if max_domain < 1:
        raise ValueError("max_domain must be positive")
    nouns = sorted({n for s in ss for n in nouns_of(s)})
    verbs = sorted({v for s in ss for v in verbs_of(s)})
    if verbs and max_domain > domain_limit:
        raise BudgetExceeded(f"relational search limited to domain size {domain_limit}, asked for {max_domain}")
    estimate = search_space(ss, max_domain)
    if estimate > budget:
        raise BudgetExceeded(f"search space {estimate} exceeds budget {budget}")
    pos_of = {n: i for i, n in enumerate(nouns)}
    allowed = _allowed_types(ss, nouns)
    monadic_ex = [s for s in ss if not isinstance(s, Relational) and s.q is EXISTS]
    relational = [s for s in ss if isinstance(s, Relational)]
    by_verb = {v: [s for s in relational if s.verb == v] for v in verbs}

    for k in range(1, max_domain + 1):
        if not allowed:
            break
        combos = itertools.combinations(allowed, k) if not verbs else itertools.combinations_with_replacement(allowed, k)
        bits = _relation_bits(k) if verbs else None
        for types in combos:
            if not all(any(_monadic_holds_at(s, t, pos_of) for t in types) for s in monadic_ex):
                continue
            chosen = {}
            for v in verbs:
                ok = np.ones(bits.shape[2], dtype=bool)
                for s in by_verb[v]:
                    ok &= _relational_truth(s, types, pos_of, bits)
                    if not ok.any():
                        break
                if not ok.any():
                    break
                chosen[v] = int(np.argmax(ok))
            else:
                return Verdict(SAT, witness=_model(k, types, nouns, chosen))
    n_exists = sum(1 for s in ss if (s.sq if isinstance(s, Relational) else s.q) is EXISTS)
    if not verbs and max_domain >= max(1, n_exists):
        return Verdict(UNSAT, detail=f"no model up to size {max_domain}")
    return Verdict(UNKNOWN, detail=f"no model up to size {max_domain}")


def _model(k, types, nouns, relations):
    unary = {}
    for e, t in enumerate(types):
        for i, n in enumerate(nouns):
            if (t >> i) & 1:
                unary.setdefault(n, set()).add(e)
    binary = {}
    for v, r in relations.items():
        binary[v] = frozenset((a, b) for a in range(k) for b in range(k) if (r >> (a * k + b)) & 1)
    return Model(k, {n: frozenset(es) for n, es in unary.items()}, binary)


def satisfies(model: Model, s) -> bool:
    """Direct evaluation of one sentence in ``model``."""
    dom = range(model.size)
    if isinstance(s, Syllogistic):
        if s.q is ALL:
            return all(not model.has(s.subject, e) or model.has(s.predicate, e) for e in dom)
        return any(model.has(s.subject, e) and model.has(s.predicate, e) for e in dom)
    if isinstance(s, Relative):
        def guard(e):
            return model.has(Literal(s.head), e) and model.has(s.rel, e)
        if s.q is ALL:
            return all(not guard(e) or model.has(s.predicate, e) for e in dom)
        return any(guard(e) and model.has(s.predicate, e) for e in dom)
    rel = model.binary.get(s.verb, frozenset())

    def edge(a, b):
        return ((a, b) in rel) == s.verb_positive

    def inner(a):
        objs = [b for b in dom if model.has(s.object, b)]
        if s.oq is ALL:
            return all(edge(a, b) for b in objs)
        return any(edge(a, b) for b in objs)

    subs = [a for a in dom if model.has(s.subject, a)]
    return all(inner(a) for a in subs) if s.sq is ALL else any(inner(a) for a in subs)


# -- dispatch ------------------------------------------------------------------

METHODS = ("graph", "monadic", "oracle", "atp")


def decide(phi, method: str = "graph", *, max_domain: int | None = None, prover=None) -> Verdict:
    """Run one backend on an instance or a list of sentences."""
    ss = _sentences(phi)
    if method == "graph":
        return decide_graph(ss)
    if method == "monadic":
        return decide_monadic(ss)
    if method == "oracle":
        if max_domain is None:
            relational = any(isinstance(s, Relational) for s in ss)
            n_exists = sum(1 for s in ss if not isinstance(s, Relational) and s.q is EXISTS)
            max_domain = 2 if relational else max(1, n_exists)
        return bounded_model_search(ss, max_domain)
    if method == "atp":
        from .atp import prove

        return prove(ss, prover)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
