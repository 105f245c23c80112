"""Sentence AST, fragment membership, negation and canonical term syntax.

Sentences are kept in logical normal form: a quantifier plus polarities over
noun and verb indices. Which English words realize the indices is decided by a
:class:`~fragsat.vocab.Vocabulary` at realization time.

Term grammar (one sentence per term)::

    term    := ("all" | "exists") "(" lit "," lit ")"
             | "rel(" quant "," lit "," quant "," lit "," sign verb ")"
             | "relcl(" quant "," noun "," lit "," lit ")"
    quant   := "all" | "exists"
    lit     := sign noun
    sign    := "+" | "-"

Verbs appear in their infinitive form, e.g. ``rel(all,+artist,exists,+beekeeper,+chase)``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Union

from .errors import ParseError


class Quant(enum.Enum):
    ALL = "all"
    EXISTS = "exists"

    def flip(self) -> "Quant":
        return Quant.EXISTS if self is Quant.ALL else Quant.ALL


ALL = Quant.ALL
EXISTS = Quant.EXISTS


@dataclass(frozen=True, order=True)
class Literal:
    noun: int
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.noun, not self.positive)

    @property
    def bar(self) -> "Literal":
        return Literal(self.noun, not self.positive)

    def __repr__(self):
        return f"{'+' if self.positive else '-'}{self.noun}"


def pos(noun: int) -> Literal:
    return Literal(noun, True)


def neg(noun: int) -> Literal:
    return Literal(noun, False)


@dataclass(frozen=True)
class Syllogistic:
    """``∀x(subject → predicate)`` or ``∃x(subject ∧ predicate)``."""

    q: Quant
    subject: Literal
    predicate: Literal


@dataclass(frozen=True)
class Relational:
    """``Qs x(subject ∘ Qo y(object ∘ ±verb(x,y)))``."""

    sq: Quant
    subject: Literal
    oq: Quant
    object: Literal
    verb: int
    verb_positive: bool = True


@dataclass(frozen=True)
class Relative:
    """``∀x((head ∧ rel) → predicate)`` or ``∃x(head ∧ rel ∧ predicate)``; the head is never negated."""

    q: Quant
    head: int
    rel: Literal
    predicate: Literal


Sentence = Union[Syllogistic, Relational, Relative]


class Fragment(enum.Enum):
    S = "s"
    SDag = "sdag"
    R = "r"
    RDag = "rdag"
    SRel = "srel"
    SRelNeg = "srelneg"

    @classmethod
    def parse(cls, tag: str) -> "Fragment":
        key = tag.strip().lower().replace("†", "dag")
        aliases = {"s+": "sdag", "r+": "rdag", "srel-n": "srelneg", "sreln": "srelneg"}
        key = aliases.get(key, key)
        for f in cls:
            if f.value == key:
                return f
        raise ValueError(f"unknown fragment {tag!r}")

    def __le__(self, other: "Fragment") -> bool:
        return other in _UP[self]

    def __lt__(self, other: "Fragment") -> bool:
        return self is not other and self <= other


# reflexive-transitive closure of S ⊆ S† ⊆ R†, S ⊆ R ⊆ R†, Srel ⊆ SrelN
_UP = {
    Fragment.S: {Fragment.S, Fragment.SDag, Fragment.R, Fragment.RDag},
    Fragment.SDag: {Fragment.SDag, Fragment.RDag},
    Fragment.R: {Fragment.R, Fragment.RDag},
    Fragment.RDag: {Fragment.RDag},
    Fragment.SRel: {Fragment.SRel, Fragment.SRelNeg},
    Fragment.SRelNeg: {Fragment.SRelNeg},
}

MONADIC = frozenset({Fragment.S, Fragment.SDag, Fragment.SRel, Fragment.SRelNeg})
RELATIONAL = frozenset({Fragment.R, Fragment.RDag})


def fragment_of(s: Sentence) -> Fragment:
    """Least fragment containing ``s``."""
    if isinstance(s, Syllogistic):
        return Fragment.S if s.subject.positive else Fragment.SDag
    if isinstance(s, Relational):
        if s.subject.positive and s.object.positive:
            return Fragment.R
        return Fragment.RDag
    if isinstance(s, Relative):
        return Fragment.SRel if s.rel.positive else Fragment.SRelNeg
    raise TypeError(f"not a sentence: {s!r}")


def fragment_contains(f: Fragment, s: Sentence) -> bool:
    return fragment_of(s) <= f


def instance_fragment(ss) -> Fragment | None:
    """Least fragment containing every sentence, or None if there is no common one."""
    lows = {fragment_of(s) for s in ss}
    if not lows:
        return Fragment.S
    for f in Fragment:
        if all(low <= f for low in lows):
            # Fragment iterates in an order that lists lower fragments first
            return f
    return None


def negate(s: Sentence) -> Sentence:
    """The sentence whose translation is equivalent to the negation of ``s``'s."""
    if isinstance(s, Syllogistic):
        return Syllogistic(s.q.flip(), s.subject, s.predicate.bar)
    if isinstance(s, Relational):
        return Relational(s.sq.flip(), s.subject, s.oq.flip(), s.object, s.verb, not s.verb_positive)
    if isinstance(s, Relative):
        return Relative(s.q.flip(), s.head, s.rel, s.predicate.bar)
    raise TypeError(f"not a sentence: {s!r}")


def is_self_inconsistent(s: Sentence) -> bool:
    """True for existential sentences whose own conjuncts clash, e.g. "Some p is not a p"."""
    if isinstance(s, Syllogistic):
        return s.q is EXISTS and s.subject == s.predicate.bar
    if isinstance(s, Relative):
        if s.q is not EXISTS:
            return False
        lits = {pos(s.head), s.rel, s.predicate}
        return any(lit.bar in lits for lit in lits)
    return False


def nouns_of(s: Sentence) -> tuple[int, ...]:
    if isinstance(s, Syllogistic):
        return (s.subject.noun, s.predicate.noun)
    if isinstance(s, Relational):
        return (s.subject.noun, s.object.noun)
    return (s.head, s.rel.noun, s.predicate.noun)


def verbs_of(s: Sentence) -> tuple[int, ...]:
    return (s.verb,) if isinstance(s, Relational) else ()


def is_universal(s: Sentence) -> bool:
    return (s.sq if isinstance(s, Relational) else s.q) is ALL


def relabel(s: Sentence, nouns=None, verbs=None) -> Sentence:
    """Rename noun/verb indices through the given mappings (missing keys stay put)."""
    nmap = (lambda i: nouns.get(i, i)) if nouns is not None else (lambda i: i)
    vmap = (lambda i: verbs.get(i, i)) if verbs is not None else (lambda i: i)
    lit = lambda l: Literal(nmap(l.noun), l.positive)
    if isinstance(s, Syllogistic):
        return Syllogistic(s.q, lit(s.subject), lit(s.predicate))
    if isinstance(s, Relational):
        return Relational(s.sq, lit(s.subject), s.oq, lit(s.object), vmap(s.verb), s.verb_positive)
    return Relative(s.q, nmap(s.head), lit(s.rel), lit(s.predicate))


# -- canonical term syntax -------------------------------------------------

def _lit_term(l: Literal, vocab) -> str:
    return ("+" if l.positive else "-") + vocab.noun(l.noun)


def to_term(s: Sentence, vocab) -> str:
    if isinstance(s, Syllogistic):
        return f"{s.q.value}({_lit_term(s.subject, vocab)},{_lit_term(s.predicate, vocab)})"
    if isinstance(s, Relational):
        sign = "+" if s.verb_positive else "-"
        return (
            f"rel({s.sq.value},{_lit_term(s.subject, vocab)},{s.oq.value},"
            f"{_lit_term(s.object, vocab)},{sign}{vocab.verb(s.verb)[1]})"
        )
    if isinstance(s, Relative):
        return (
            f"relcl({s.q.value},{vocab.noun(s.head)},{_lit_term(s.rel, vocab)},"
            f"{_lit_term(s.predicate, vocab)})"
        )
    raise TypeError(f"not a sentence: {s!r}")


_TERM_RE = re.compile(r"\s*([a-z]+)\((.*)\)\s*\Z")
_SIGNED = re.compile(r"([+-])([a-z][a-z-]*)\Z")


def from_term(text: str, vocab) -> Sentence:
    m = _TERM_RE.match(text)
    if not m:
        raise ParseError(f"not a sentence term: {text!r}")
    head, args = m.group(1), [a.strip() for a in m.group(2).split(",")]

    def quant(a):
        try:
            return Quant(a)
        except ValueError:
            raise ParseError(f"bad quantifier {a!r} in {text!r}") from None

    def signed(a):
        sm = _SIGNED.match(a)
        if not sm:
            raise ParseError(f"bad signed word {a!r} in {text!r}")
        return sm.group(1) == "+", sm.group(2)

    def lit(a):
        positive, word = signed(a)
        return Literal(vocab.noun_index(word), positive)

    if head in ("all", "exists") and len(args) == 2:
        return Syllogistic(Quant(head), lit(args[0]), lit(args[1]))
    if head == "rel" and len(args) == 5:
        positive, verb = signed(args[4])
        return Relational(quant(args[0]), lit(args[1]), quant(args[2]), lit(args[3]), vocab.verb_index(verb), positive)
    if head == "relcl" and len(args) == 4:
        return Relative(quant(args[0]), vocab.noun_index(args[1]), lit(args[2]), lit(args[3]))
    raise ParseError(f"not a sentence term: {text!r}")
