"""Bundled reference prover.

``python -m fragsat.prover problem.p`` reads a TPTP FOF/CNF problem and prints
an SZS status line. For unsatisfiable input it also prints a numbered TSTP
refutation between the ``SZS output start``/``end`` markers, which is the
format :func:`fragsat.atp.proof_stats` reads.

Satisfiability is settled by cvc5 with finite model finding, which is
complete here because every fragment has the finite model property. When
cvc5 reports unsatisfiable, a given-clause resolution loop searches for a
refutation over the clauses of cvc5's minimal unsat core, falling back to the
whole problem if that fails. Only the ancestors of the empty clause are
printed, so proof length and used-axiom counts behave like those of a
saturation prover.
"""

from __future__ import annotations

import argparse
import heapq
import itertools
import sys
import time
from pathlib import Path

from .errors import ParseError
from .fol import (
    And,
    Atom,
    Const,
    Exists,
    Fn,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    format_formula,
    read_tptp,
)

DEFAULT_MAX_STEPS = 20000
FULL_SET_STEPS = 5000


# -- cvc5 ----------------------------------------------------------------------

def check_sat(problem, timeout=None):
    """Run cvc5 on annotated formulas; returns (SZS status, names in the unsat core)."""
    import cvc5
    from cvc5 import Kind

    tm = cvc5.TermManager()
    solver = cvc5.Solver(tm)
    solver.setOption("finite-model-find", "true")
    solver.setOption("produce-unsat-cores", "true")
    solver.setOption("minimal-unsat-cores", "true")
    if timeout is not None:
        solver.setOption("tlimit-per", str(max(1, int(timeout * 1000))))
    solver.setLogic("UF")
    U = tm.mkUninterpretedSort("U")
    B = tm.getBooleanSort()
    symbols = {}

    def symbol(name, arity, result):
        key = (name, arity, result == B)
        if key not in symbols:
            sort = result if arity == 0 else tm.mkFunctionSort([U] * arity, result)
            symbols[key] = tm.mkConst(sort, f"{name}_{arity}" if result == B else f"{name}_f{arity}")
        return symbols[key]

    def term(t, env):
        if isinstance(t, Var):
            return env[t.name]
        head = symbol(t.name, len(t.args), U)
        if not t.args:
            return head
        return tm.mkTerm(Kind.APPLY_UF, head, *(term(a, env) for a in t.args))

    def formula(f, env):
        if isinstance(f, Atom):
            head = symbol(f.pred, len(f.args), B)
            if not f.args:
                return head
            return tm.mkTerm(Kind.APPLY_UF, head, *(term(a, env) for a in f.args))
        if isinstance(f, Const):
            return tm.mkBoolean(f.value)
        if isinstance(f, Not):
            return tm.mkTerm(Kind.NOT, formula(f.arg, env))
        if isinstance(f, (And, Or)):
            if len(f.args) == 1:
                return formula(f.args[0], env)
            if not f.args:
                return tm.mkBoolean(isinstance(f, And))
            kind = Kind.AND if isinstance(f, And) else Kind.OR
            return tm.mkTerm(kind, *(formula(a, env) for a in f.args))
        if isinstance(f, Implies):
            return tm.mkTerm(Kind.IMPLIES, formula(f.lhs, env), formula(f.rhs, env))
        if isinstance(f, Iff):
            return tm.mkTerm(Kind.EQUAL, formula(f.lhs, env), formula(f.rhs, env))
        if isinstance(f, (Forall, Exists)):
            v = tm.mkVar(U, f.var)
            body = formula(f.body, {**env, f.var: v})
            kind = Kind.FORALL if isinstance(f, Forall) else Kind.EXISTS
            return tm.mkTerm(kind, tm.mkTerm(Kind.VARIABLE_LIST, v), body)
        raise TypeError(f"not a formula: {f!r}")

    names = {}
    for a in problem:
        t = formula(_statement(a), {})
        names.setdefault(t, a.name)
        solver.assertFormula(t)
    result = solver.checkSat()
    if result.isSat():
        return "Satisfiable", None
    if result.isUnsat():
        core = [names[t] for t in solver.getUnsatCore() if t in names]
        return "Unsatisfiable", core
    explanation = str(result.getUnknownExplanation()).upper()
    return ("Timeout" if "TIMEOUT" in explanation else "GaveUp"), None


def _statement(a):
    return Not(a.formula) if a.role == "conjecture" else a.formula


# -- clausification --------------------------------------------------------------

def nnf(f, positive=True):
    """Negation normal form with implications and equivalences expanded."""
    if isinstance(f, Atom):
        return f if positive else Not(f)
    if isinstance(f, Const):
        return Const(f.value == positive)
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    if isinstance(f, (And, Or)):
        same = isinstance(f, And) == positive
        return _flat(And if same else Or, [nnf(a, positive) for a in f.args])
    if isinstance(f, Implies):
        if positive:
            return _flat(Or, [nnf(f.lhs, False), nnf(f.rhs, True)])
        return _flat(And, [nnf(f.lhs, True), nnf(f.rhs, False)])
    if isinstance(f, Iff):
        a, b = f.lhs, f.rhs
        if positive:
            return _flat(And, [_flat(Or, [nnf(a, False), nnf(b)]), _flat(Or, [nnf(a), nnf(b, False)])])
        return _flat(Or, [_flat(And, [nnf(a), nnf(b, False)]), _flat(And, [nnf(a, False), nnf(b)])])
    if isinstance(f, (Forall, Exists)):
        keep = isinstance(f, Forall) == positive
        return (Forall if keep else Exists)(f.var, nnf(f.body, positive))
    raise TypeError(f"not a formula: {f!r}")


def _flat(cls, args):
    out = []
    for a in args:
        out.extend(a.args if isinstance(a, cls) else [a])
    return out[0] if len(out) == 1 else cls(tuple(out))


class _Fresh:
    def __init__(self):
        self.var = itertools.count()
        self.skolem = itertools.count()


def skolemize(f, fresh, scope=(), sub=None):
    """Replace existentials of an NNF formula by Skolem terms; bound variables are renamed apart."""
    sub = sub or {}
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_rename(t, sub) for t in f.args))
    if isinstance(f, Not):
        return Not(skolemize(f.arg, fresh, scope, sub))
    if isinstance(f, Const):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(tuple(skolemize(a, fresh, scope, sub) for a in f.args))
    if isinstance(f, Forall):
        v = f"X{next(fresh.var)}"
        return Forall(v, skolemize(f.body, fresh, scope + (v,), {**sub, f.var: Var(v)}))
    if isinstance(f, Exists):
        sk = Fn(f"sK{next(fresh.skolem)}", tuple(Var(v) for v in scope))
        return skolemize(f.body, fresh, scope, {**sub, f.var: sk})
    raise TypeError(f"not in negation normal form: {f!r}")


def _rename(t, sub):
    if isinstance(t, Var):
        return sub.get(t.name, t)
    return Fn(t.name, tuple(_rename(a, sub) for a in t.args))


def cnf(f):
    """Clauses (lists of literal formulas) of a Skolemized NNF formula."""
    if isinstance(f, Forall):
        return cnf(f.body)
    if isinstance(f, And):
        return [c for a in f.args for c in cnf(a)]
    if isinstance(f, Or):
        out = [[]]
        for a in f.args:
            out = [x + y for x in out for y in cnf(a)]
        return out
    if isinstance(f, Const):
        return [] if f.value else [[]]
    return [[f]]


# -- clauses -------------------------------------------------------------------------
# terms: int for variables, (name, args) for applications; literals: (positive, pred, args)

def _to_term(t, vars_):
    if isinstance(t, Var):
        return vars_.setdefault(t.name, len(vars_))
    return (t.name, tuple(_to_term(a, vars_) for a in t.args))


def _to_clause(lits):
    vars_ = {}
    out = []
    for lit in lits:
        positive = not isinstance(lit, Not)
        atom = lit if positive else lit.arg
        out.append((positive, atom.pred, tuple(_to_term(a, vars_) for a in atom.args)))
    return normalize(out)


def _walk(t, sub):
    while isinstance(t, int) and t in sub:
        t = sub[t]
    return t


def _occurs(v, t, sub):
    t = _walk(t, sub)
    if t == v:
        return True
    return not isinstance(t, int) and any(_occurs(v, a, sub) for a in t[1])


def unify_args(xs, ys, sub):
    stack = list(zip(xs, ys))
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, sub), _walk(b, sub)
        if a == b:
            continue
        if isinstance(a, int):
            if _occurs(a, b, sub):
                return None
            sub[a] = b
        elif isinstance(b, int):
            if _occurs(b, a, sub):
                return None
            sub[b] = a
        elif a[0] != b[0] or len(a[1]) != len(b[1]):
            return None
        else:
            stack.extend(zip(a[1], b[1]))
    return sub


def _apply(t, sub):
    t = _walk(t, sub)
    if isinstance(t, int):
        return t
    return (t[0], tuple(_apply(a, sub) for a in t[1]))


def _shift(t, k):
    if isinstance(t, int):
        return t + k
    return (t[0], tuple(_shift(a, k) for a in t[1]))


def _mask(t):
    if isinstance(t, int):
        return ("", ())
    return (t[0], tuple(_mask(a) for a in t[1]))


def normalize(lits, sub=None):
    """Apply ``sub``, drop duplicate literals, order literals and number variables canonically."""
    if sub:
        lits = [(p, q, tuple(_apply(a, sub) for a in args)) for p, q, args in lits]
    lits = sorted(set(lits), key=lambda l: (l[1], not l[0], tuple(_mask(a) for a in l[2]), repr(l[2])))
    names = {}

    def ren(t):
        if isinstance(t, int):
            return names.setdefault(t, len(names))
        return (t[0], tuple(ren(a) for a in t[1]))

    return tuple((p, q, tuple(ren(a) for a in args)) for p, q, args in lits)


def _depth(t):
    if isinstance(t, int):
        return 0
    return 1 + max((_depth(a) for a in t[1]), default=0)


def _tautology(c):
    seen = {(p, q, args) for p, q, args in c}
    return any((not p, q, args) in seen for p, q, args in c)


def _match(pattern, target, sub):
    """One-way matching of term ``pattern`` onto ``target``."""
    if isinstance(pattern, int):
        if pattern in sub:
            return sub[pattern] == target
        sub[pattern] = target
        return True
    if isinstance(target, int) or pattern[0] != target[0] or len(pattern[1]) != len(target[1]):
        return False
    return all(_match(a, b, sub) for a, b in zip(pattern[1], target[1]))


def subsumes(c, d):
    """True if some substitution maps every literal of ``c`` into ``d``."""
    if len(c) > len(d):
        return False

    def go(i, sub):
        if i == len(c):
            return True
        p, q, args = c[i]
        for p2, q2, args2 in d:
            if p2 == p and q2 == q:
                trial = dict(sub)
                if all(_match(a, b, trial) for a, b in zip(args, args2)) and go(i + 1, trial):
                    return True
        return False

    return go(0, {})


def _weight(c):
    def w(t):
        return 1 if isinstance(t, int) else 1 + sum(w(a) for a in t[1])

    return sum(1 + sum(w(a) for a in args) for _, _, args in c)


class _Refuter:
    """Given-clause saturation with binary resolution, factoring and subsumption."""

    def __init__(self, max_depth, max_steps, deadline):
        self.max_depth = max_depth
        self.max_steps = max_steps
        self.deadline = deadline
        self.clauses = {}  # id -> clause
        self.origin = {}  # id -> (rule, parent ids)
        self.seen = set()
        self.passive = []
        self.ages = []
        self.ids = itertools.count()
        self.active = []

    def add(self, clause, rule, parents):
        if clause in self.seen or _tautology(clause):
            return None
        if any(_depth(a) > self.max_depth for _, _, args in clause for a in args):
            return None
        cid = next(self.ids)
        self.seen.add(clause)
        self.clauses[cid] = clause
        self.origin[cid] = (rule, parents)
        heapq.heappush(self.passive, (len(clause), _weight(clause), cid))
        heapq.heappush(self.ages, cid)
        return cid

    def _pop(self, step, taken):
        queue = self.ages if step % 5 == 4 else self.passive
        while queue:
            item = heapq.heappop(queue)
            cid = item if isinstance(item, int) else item[2]
            if cid not in taken:
                taken.add(cid)
                return cid
        other = self.passive if queue is self.ages else self.ages
        while other:
            item = heapq.heappop(other)
            cid = item if isinstance(item, int) else item[2]
            if cid not in taken:
                taken.add(cid)
                return cid
        return None

    def run(self):
        for cid, c in self.clauses.items():
            if not c:
                return cid
        taken = set()
        for step in range(self.max_steps):
            if self.deadline is not None and step % 64 == 0 and time.monotonic() > self.deadline:
                return None
            gid = self._pop(step, taken)
            if gid is None:
                return None
            given = self.clauses[gid]
            if any(subsumes(self.clauses[a], given) for a in self.active):
                continue
            self.active = [a for a in self.active if not subsumes(given, self.clauses[a])]
            self.active.append(gid)
            for new, rule, parents in self._infer(gid):
                cid = self.add(new, rule, parents)
                if cid is not None and not new:
                    return cid
        return None

    def _infer(self, gid):
        given = self.clauses[gid]
        # factoring
        for i, j in itertools.combinations(range(len(given)), 2):
            (p1, q1, a1), (p2, q2, a2) = given[i], given[j]
            if p1 == p2 and q1 == q2:
                sub = unify_args(a1, a2, {})
                if sub is not None:
                    yield normalize(given, sub), "factoring", (gid,)
        # binary resolution against every active clause, the given one included
        for aid in self.active:
            other = self.clauses[aid]
            k = 1 + max((v for _, _, args in given for v in _vars(args)), default=-1)
            other = [(p, q, tuple(_shift(a, k) for a in args)) for p, q, args in other]
            for i, (p1, q1, a1) in enumerate(given):
                for j, (p2, q2, a2) in enumerate(other):
                    if q1 != q2 or p1 == p2 or len(a1) != len(a2):
                        continue
                    sub = unify_args(a1, a2, {})
                    if sub is None:
                        continue
                    rest = [l for x, l in enumerate(given) if x != i] + [l for x, l in enumerate(other) if x != j]
                    yield normalize(rest, sub), "resolution", (gid, aid)


def _vars(args):
    for a in args:
        if isinstance(a, int):
            yield a
        else:
            yield from _vars(a[1])


# -- proof objects -----------------------------------------------------------------

def _format_term(t):
    if isinstance(t, int):
        return f"X{t}"
    name, args = t
    return name if not args else f"{name}({','.join(_format_term(a) for a in args)})"


def format_clause(c):
    if not c:
        return "$false"
    out = []
    for positive, pred, args in c:
        atom = pred if not args else f"{pred}({','.join(_format_term(a) for a in args)})"
        out.append(atom if positive else "~" + atom)
    return " | ".join(out)


class _Derivation:
    """Numbered proof nodes: (language, role, text, source, parents)."""

    def __init__(self):
        self.nodes = []

    def add(self, lang, role, text, source, parents=()):
        self.nodes.append((lang, role, text, source, tuple(parents)))
        return len(self.nodes) - 1

    def render(self, root):
        keep = set()
        stack = [root]
        while stack:
            n = stack.pop()
            if n not in keep:
                keep.add(n)
                stack.extend(self.nodes[n][4])
        order = sorted(keep)
        label = {n: f"f{i}" for i, n in enumerate(order, start=1)}
        lines = []
        for n in order:
            lang, role, text, source, parents = self.nodes[n]
            if parents:
                rule = source
                source = f"inference({rule},[],[{','.join(label[p] for p in parents)}])"
            lines.append(f"{lang}({label[n]},{role},({text}),{source}).")
        return lines


def refute(problem, filename="problem.p", max_depth=4, max_steps=DEFAULT_MAX_STEPS, deadline=None):
    """TSTP refutation lines for ``problem`` (annotated formulas), or None."""
    der = _Derivation()
    fresh = _Fresh()
    ref = _Refuter(max_depth, max_steps, deadline)
    node_of = {}
    for a in problem:
        src = f"file('{filename}',{a.name})"
        node = der.add(a.language, a.role, format_formula(a.formula), src)
        f = _statement(a)
        if a.role == "conjecture":
            node = der.add("fof", "negated_conjecture", format_formula(f), "negated_conjecture", [node])
        g = nnf(f)
        if g != f:
            node = der.add("fof", "plain", format_formula(g), "ennf_transformation", [node])
        h = skolemize(g, fresh)
        if _has_skolem(h):
            node = der.add("fof", "plain", format_formula(h), "skolemisation", [node])
        for lits in cnf(h):
            clause = _to_clause(lits)
            cid = ref.add(clause, "input", ())
            if cid is not None:
                node_of[cid] = der.add("cnf", "plain", format_clause(clause), "cnf_transformation", [node])
    empty = ref.run()
    if empty is None:
        return None

    def node(cid):
        if cid not in node_of:
            rule, parents = ref.origin[cid]
            node_of[cid] = der.add("cnf", "plain", format_clause(ref.clauses[cid]), rule, [node(p) for p in parents])
        return node_of[cid]

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
    return der.render(node(empty))


def _has_skolem(f):
    if isinstance(f, Atom):
        return any(isinstance(t, Fn) for t in f.args)
    if isinstance(f, Not):
        return _has_skolem(f.arg)
    if isinstance(f, (And, Or)):
        return any(_has_skolem(a) for a in f.args)
    if isinstance(f, Forall):
        return _has_skolem(f.body)
    return False


# -- driver ---------------------------------------------------------------------------

def run(text, name="problem", timeout=None, proof=True, filename=None, focus="full"):
    """Decide a TPTP problem and return the prover's full stdout.

    With ``focus="full"`` the refutation is first searched over every input
    clause, so (like a saturation prover) it may use premises a minimal
    proof would not; ``focus="core"`` starts from cvc5's minimal unsat core.
    """
    start = time.monotonic()
    filename = filename or f"{name}.p"
    try:
        problem = read_tptp(text)
    except ParseError as e:
        return f"% {e}\n% SZS status InputError for {name}\n"
    if timeout is not None and timeout <= 0:
        return f"% SZS status Timeout for {name}\n"
    status, core = check_sat(problem, timeout)
    out = [f"% SZS status {status} for {name}"]
    if status == "Unsatisfiable" and proof:
        deadline = None if timeout is None else start + timeout
        core_set = set(core or ())
        focused = [a for a in problem if a.name in core_set] or problem
        if focus == "core":
            attempts = [(focused, 4, DEFAULT_MAX_STEPS), (focused, 8, DEFAULT_MAX_STEPS), (problem, 8, DEFAULT_MAX_STEPS)]
        else:
            attempts = [(problem, 4, FULL_SET_STEPS), (focused, 4, DEFAULT_MAX_STEPS), (focused, 8, DEFAULT_MAX_STEPS)]
        lines = None
        for subset, depth, steps in attempts:
            lines = refute(subset, filename, max_depth=depth, max_steps=steps, deadline=deadline)
            if lines is not None:
                break
        if lines is None:
            out.append("% no refutation found within the resource limits")
        else:
            out.append(f"% SZS output start CNFRefutation for {name}")
            out.extend(lines)
            out.append(f"% SZS output end CNFRefutation for {name}")
    return "\n".join(out) + "\n"


def main(argv=None):
    ap = argparse.ArgumentParser(prog="fragsat-prove", description="Decide a TPTP FOF problem and print SZS output.")
    ap.add_argument("file")
    ap.add_argument("--timeout", type=float, default=None, help="seconds")
    ap.add_argument("--no-proof", action="store_true")
    ap.add_argument("--focus", choices=("full", "core"), default="full", help="clause set the refutation search starts from")
    args = ap.parse_args(argv)
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        print(f"% {e}\n% SZS status OSError for {path.stem}")
        return 1
    sys.stdout.write(run(text, path.stem, args.timeout, not args.no_proof, filename=path.name, focus=args.focus))
    return 0


if __name__ == "__main__":
    sys.exit(main())
