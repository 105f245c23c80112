"""First-order translation, TPTP FOF export and a small FOF reader."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import ParseError
from .syntax import ALL, Literal, Relational, Relative, Sentence, Syllogistic


# -- formula tree ------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Fn:
    """Constant or function application (only produced by Skolemization)."""

    name: str
    args: tuple = ()


Term = Union[Var, Fn]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Const:
    value: bool


Formula = Union[Atom, Not, And, Or, Implies, Iff, Forall, Exists, Const]


def free_vars(f, bound=frozenset()):
    if isinstance(f, Atom):
        out = set()
        for t in f.args:
            out |= _term_vars(t) - bound
        return out
    if isinstance(f, Not):
        return free_vars(f.arg, bound)
    if isinstance(f, (And, Or)):
        return set().union(*(free_vars(a, bound) for a in f.args)) if f.args else set()
    if isinstance(f, (Implies, Iff)):
        return free_vars(f.lhs, bound) | free_vars(f.rhs, bound)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body, bound | {f.var})
    return set()


def _term_vars(t):
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= _term_vars(a)
    return out


# -- translation ---------------------------------------------------------------

def tptp_name(word: str) -> str:
    """Vocabulary words may contain hyphens, TPTP lower words may not."""
    return word.replace("-", "_")


def _names(vocab):
    if vocab is None:
        return (lambda i: f"n{i}"), (lambda i: f"v{i}")
    return (lambda i: tptp_name(vocab.noun(i))), (lambda i: tptp_name(vocab.verb(i)[1]))


def _lit(l: Literal, var: str, noun) -> Formula:
    a = Atom(noun(l.noun), (Var(var),))
    return a if l.positive else Not(a)


def translate(s: Sentence, vocab=None) -> Formula:
    """Normal-form first-order formula of ``s``.

    Predicates are named after vocabulary words when ``vocab`` is given,
    otherwise ``n<i>`` for nouns and ``v<i>`` for verbs.
    """
    noun, verb = _names(vocab)
    if isinstance(s, Syllogistic):
        a, b = _lit(s.subject, "X", noun), _lit(s.predicate, "X", noun)
        return Forall("X", Implies(a, b)) if s.q is ALL else Exists("X", And((a, b)))
    if isinstance(s, Relational):
        r = Atom(verb(s.verb), (Var("X"), Var("Y")))
        r = r if s.verb_positive else Not(r)
        b = _lit(s.object, "Y", noun)
        inner = Forall("Y", Implies(b, r)) if s.oq is ALL else Exists("Y", And((b, r)))
        a = _lit(s.subject, "X", noun)
        return Forall("X", Implies(a, inner)) if s.sq is ALL else Exists("X", And((a, inner)))
    if isinstance(s, Relative):
        o = Atom(noun(s.head), (Var("X"),))
        p, q = _lit(s.rel, "X", noun), _lit(s.predicate, "X", noun)
        if s.q is ALL:
            return Forall("X", Implies(And((o, p)), q))
        return Exists("X", And((o, p, q)))
    raise TypeError(f"not a sentence: {s!r}")


# -- printing ------------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.name
    return f"{t.name}({','.join(format_term(a) for a in t.args)})"


def format_formula(f: Formula) -> str:
    """TPTP FOF syntax; operands that are binary or quantified are parenthesized."""
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({','.join(format_term(a) for a in f.args)})"
    if isinstance(f, Const):
        return "$true" if f.value else "$false"
    if isinstance(f, Not):
        inner = format_formula(f.arg)
        return f"~{inner}" if isinstance(f.arg, (Atom, Const, Not)) else f"~({inner})"
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        return op.join(_operand(a) for a in f.args)
    if isinstance(f, Implies):
        return f"{_operand(f.lhs)} => {_operand(f.rhs)}"
    if isinstance(f, Iff):
        return f"{_operand(f.lhs)} <=> {_operand(f.rhs)}"
    if isinstance(f, (Forall, Exists)):
        vars_, body = [f.var], f.body
        q = type(f)
        while isinstance(body, q):
            vars_.append(body.var)
            body = body.body
        sym = "!" if q is Forall else "?"
        return f"{sym}[{','.join(vars_)}]: ({format_formula(body)})"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f):
    s = format_formula(f)
    return f"({s})" if isinstance(f, (And, Or, Implies, Iff, Forall, Exists)) else s


def to_tptp(ss, vocab=None, prefix: str = "s") -> str:
    """One ``fof(<prefix><i>, axiom, ...)`` line per sentence, numbered from 1.

    Axioms only: entailment questions are posed by adding the negated
    hypothesis as one more axiom.
    """
    lines = [
        f"fof({prefix}{i}, axiom, {format_formula(translate(s, vocab))})."
        for i, s in enumerate(ss, start=1)
    ]
    return "".join(line + "\n" for line in lines)


# -- evaluation on finite structures ---------------------------------------------

def holds(f: Formula, domain_size: int, unary, binary, env=None) -> bool:
    """Truth of ``f`` in a structure over ``range(domain_size)``.

    ``unary`` maps predicate names to sets of elements, ``binary`` maps them to
    sets of pairs; absent predicates are empty.
    """
    env = env or {}
    if isinstance(f, Atom):
        args = tuple(env[a.name] for a in f.args)
        if len(args) == 1:
            return args[0] in unary.get(f.pred, ())
        return args in binary.get(f.pred, ())
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not holds(f.arg, domain_size, unary, binary, env)
    if isinstance(f, And):
        return all(holds(a, domain_size, unary, binary, env) for a in f.args)
    if isinstance(f, Or):
        return any(holds(a, domain_size, unary, binary, env) for a in f.args)
    if isinstance(f, Implies):
        return (not holds(f.lhs, domain_size, unary, binary, env)) or holds(f.rhs, domain_size, unary, binary, env)
    if isinstance(f, Iff):
        return holds(f.lhs, domain_size, unary, binary, env) == holds(f.rhs, domain_size, unary, binary, env)
    if isinstance(f, Forall):
        return all(holds(f.body, domain_size, unary, binary, {**env, f.var: e}) for e in range(domain_size))
    if isinstance(f, Exists):
        return any(holds(f.body, domain_size, unary, binary, {**env, f.var: e}) for e in range(domain_size))
    raise TypeError(f"not a formula: {f!r}")


# -- reading -------------------------------------------------------------------

@dataclass(frozen=True)
class Annotated:
    language: str  # "fof" or "cnf"
    name: str
    role: str
    formula: Formula
    source: str = ""  # raw annotation text, if any


_TOKEN = re.compile(
    r"\s*(?:(?P<comment>%[^\n]*)|(?P<op><=>|<~>|=>|<=|~\||~&|!=|[!?:,()\[\]~&|=.])"
    r"|(?P<dollar>\$[a-z_]+)|(?P<upper>[A-Z][A-Za-z0-9_]*)|(?P<lower>[a-z][A-Za-z0-9_]*)"
    r"|(?P<quoted>'(?:[^'\\]|\\.)*')|(?P<number>[0-9]+))"
)


def _tokenize(text):
    pos, out = 0, []
    text = re.sub(r"/\*.*?\*/", " ", text, flags=re.S)
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            line = text.count("\n", 0, pos) + 1
            raise ParseError(f"unexpected character {text[pos:pos + 10]!r}", line)
        pos = m.end()
        if m.group("comment"):
            continue
        kind = m.lastgroup
        out.append((kind, m.group(kind), text.count("\n", 0, m.start()) + 1))
    return out


class _Reader:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def kind(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def line(self):
        return self.toks[min(self.i, len(self.toks) - 1)][2] if self.toks else 1

    def take(self, expected=None):
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input", self.line())
        kind, val, line = self.toks[self.i]
        if expected is not None and val != expected:
            raise ParseError(f"expected {expected!r}, found {val!r}", line)
        self.i += 1
        return val

    def statements(self):
        out = []
        while self.peek() is not None:
            lang = self.take()
            if lang not in ("fof", "cnf"):
                raise ParseError(f"unsupported statement {lang!r}", self.line())
            self.take("(")
            name = self.take()
            self.take(",")
            role = self.take()
            self.take(",")
            formula = self.formula()
            if lang == "cnf":
                formula = _close(formula)
            source = ""
            if self.peek() == ",":
                self.take(",")
                start = self.i
                self.skip_balanced()
                source = " ".join(t[1] for t in self.toks[start:self.i])
            self.take(")")
            self.take(".")
            out.append(Annotated(lang, name, role, formula, source))
        return out

    def skip_balanced(self):
        depth = 0
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError("unbalanced annotation", self.line())
            if tok in "([":
                depth += 1
            elif tok in ")]":
                if depth == 0:
                    return
                depth -= 1
            self.take()

    # formula := unary (binop unary)*  with &,| associative and =>,<=,<=> non-associative
    def formula(self):
        lhs = self.unary()
        tok = self.peek()
        if tok in ("&", "|"):
            args = [lhs]
            while self.peek() == tok:
                self.take()
                args.append(self.unary())
            return And(tuple(args)) if tok == "&" else Or(tuple(args))
        if tok == "=>":
            self.take()
            return Implies(lhs, self.unary())
        if tok == "<=":
            self.take()
            return Implies(self.unary(), lhs)
        if tok == "<=>":
            self.take()
            return Iff(lhs, self.unary())
        if tok == "<~>":
            self.take()
            return Not(Iff(lhs, self.unary()))
        return lhs

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("!", "?"):
            self.take()
            self.take("[")
            vars_ = [self.take()]
            while self.peek() == ",":
                self.take()
                vars_.append(self.take())
            self.take("]")
            self.take(":")
            body = self.unary()
            for v in reversed(vars_):
                body = Forall(v, body) if tok == "!" else Exists(v, body)
            return body
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if self.kind() == "dollar":
            val = self.take()
            if val == "$true":
                return Const(True)
            if val == "$false":
                return Const(False)
            raise ParseError(f"unsupported defined symbol {val}", self.line())
        if self.kind() == "lower":
            name = self.take()
            args = self.term_args()
            if self.peek() in ("=", "!="):
                raise ParseError("equality is not supported", self.line())
            return Atom(name, args)
        raise ParseError(f"unexpected token {tok!r}", self.line())

    def term_args(self):
        if self.peek() != "(":
            return ()
        self.take("(")
        args = [self.term()]
        while self.peek() == ",":
            self.take()
            args.append(self.term())
        self.take(")")
        return tuple(args)

    def term(self):
        if self.kind() == "upper":
            return Var(self.take())
        if self.kind() in ("lower", "number", "quoted"):
            return Fn(self.take(), self.term_args())
        raise ParseError(f"expected a term, found {self.peek()!r}", self.line())


def _close(f):
    for v in sorted(free_vars(f), reverse=True):
        f = Forall(v, f)
    return f


def read_tptp(text: str) -> list[Annotated]:
    """Parse ``fof``/``cnf`` statements (no includes, no equality, no typed logic)."""
    return _Reader(text).statements()
