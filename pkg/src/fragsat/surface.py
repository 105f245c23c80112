"""English realization and parsing of sentences.

Every sentence form has exactly one canonical template. Parsing is a
token-level match against the same template table, so ``parse`` and
``realize`` are inverse by construction; the only non-canonical input
accepted is the article "an", the "who is a not p" spelling of negative
relative clauses, and "Some/Every p rs no q".
"""

from __future__ import annotations

import re

from .errors import NotInFragment
from .syntax import ALL, EXISTS, Literal, Relational, Relative, Sentence, Syllogistic

# slot kinds: S = possibly negated noun ("non-p"), N = bare noun,
# V = verb (third person), I = verb infinitive, A = article
_TEMPLATES = [
    # (key, tokens, fragment label, logical form)
    (("syl", ALL, True), "Every S is A N", "S / S†", "∀x(±p(x) → q(x))"),
    (("syl", ALL, False), "No S is A N", "S / S†", "∀x(±p(x) → ¬q(x))"),
    (("syl", EXISTS, True), "Some S is A N", "S / S†", "∃x(±p(x) ∧ q(x))"),
    (("syl", EXISTS, False), "Some S is not A N", "S / S†", "∃x(±p(x) ∧ ¬q(x))"),
    (("rel", ALL, ALL, True), "Every S V every S", "R / R†", "∀x(±p(x) → ∀y(±q(y) → r(x,y)))"),
    (("rel", ALL, EXISTS, True), "Every S V some S", "R / R†", "∀x(±p(x) → ∃y(±q(y) ∧ r(x,y)))"),
    (("rel", EXISTS, ALL, True), "Some S V every S", "R / R†", "∃x(±p(x) ∧ ∀y(±q(y) → r(x,y)))"),
    (("rel", EXISTS, EXISTS, True), "Some S V some S", "R / R†", "∃x(±p(x) ∧ ∃y(±q(y) ∧ r(x,y)))"),
    (("rel", ALL, ALL, False), "No S V any S", "R / R†", "∀x(±p(x) → ∀y(±q(y) → ¬r(x,y)))"),
    (("rel", ALL, EXISTS, False), "No S V every S", "R / R†", "∀x(±p(x) → ∃y(±q(y) ∧ ¬r(x,y)))"),
    (("rel", EXISTS, ALL, False), "Some S does not I any S", "R / R†", "∃x(±p(x) ∧ ∀y(±q(y) → ¬r(x,y)))"),
    (("rel", EXISTS, EXISTS, False), "Some S does not I every S", "R / R†", "∃x(±p(x) ∧ ∃y(±q(y) ∧ ¬r(x,y)))"),
    (("rcl", ALL, True, True), "Every N who is A N is A N", "Srel", "∀x(o(x) ∧ p(x) → q(x))"),
    (("rcl", ALL, True, False), "No N who is A N is A N", "Srel", "∀x(o(x) ∧ p(x) → ¬q(x))"),
    (("rcl", EXISTS, True, True), "Some N who is A N is A N", "Srel", "∃x(o(x) ∧ p(x) ∧ q(x))"),
    (("rcl", EXISTS, True, False), "Some N who is A N is not A N", "Srel", "∃x(o(x) ∧ p(x) ∧ ¬q(x))"),
    (("rcl", ALL, False, True), "Every N who is not A N is A N", "SrelN", "∀x(o(x) ∧ ¬p(x) → q(x))"),
    (("rcl", ALL, False, False), "No N who is not A N is A N", "SrelN", "∀x(o(x) ∧ ¬p(x) → ¬q(x))"),
    (("rcl", EXISTS, False, True), "Some N who is not A N is A N", "SrelN", "∃x(o(x) ∧ ¬p(x) ∧ q(x))"),
    (("rcl", EXISTS, False, False), "Some N who is not A N is not A N", "SrelN", "∃x(o(x) ∧ ¬p(x) ∧ ¬q(x))"),
]
_BY_KEY = {key: tokens.split() for key, tokens, _, _ in _TEMPLATES}
# input-only spelling accepted for SrelN: "who is a not p"
_ALT = [
    (key, tokens.replace("who is not A N", "who is A not N").split())
    for key, tokens, _, _ in _TEMPLATES
    if "who is not A" in tokens
]
# input-only "Some p rs no q" / "Every p rs no q" (the prose form of the ∀-negative readings)
_ALT += [
    (("rel", EXISTS, ALL, False), "Some S V no S".split()),
    (("rel", ALL, ALL, False), "Every S V no S".split()),
]
_PARSE_TABLE = [(key, _BY_KEY[key]) for key, _, _, _ in _TEMPLATES] + _ALT

_WORD = re.compile(r"[a-z][a-z-]*\Z")


def _np(lit: Literal, vocab) -> str:
    word = vocab.noun(lit.noun)
    return word if lit.positive else "non-" + word


def _key(s: Sentence):
    if isinstance(s, Syllogistic):
        return ("syl", s.q, s.predicate.positive)
    if isinstance(s, Relational):
        return ("rel", s.sq, s.oq, s.verb_positive)
    if isinstance(s, Relative):
        return ("rcl", s.q, s.rel.positive, s.predicate.positive)
    raise TypeError(f"not a sentence: {s!r}")


def realize(s: Sentence, vocab) -> str:
    """Canonical English sentence for ``s``, ending in a full stop."""
    if isinstance(s, Syllogistic):
        fill = {"S": [_np(s.subject, vocab)], "N": [vocab.noun(s.predicate.noun)]}
    elif isinstance(s, Relational):
        third, inf = vocab.verb(s.verb)
        fill = {"S": [_np(s.subject, vocab), _np(s.object, vocab)], "V": [third], "I": [inf]}
    elif isinstance(s, Relative):
        fill = {"N": [vocab.noun(s.head), vocab.noun(s.rel.noun), vocab.noun(s.predicate.noun)]}
    else:
        raise TypeError(f"not a sentence: {s!r}")
    out = []
    for tok in _BY_KEY[_key(s)]:
        if tok == "A":
            out.append("a")
        elif tok in fill:
            out.append(fill[tok].pop(0))
        else:
            out.append(tok)
    return " ".join(out) + "."


def realize_instance(ss, vocab) -> str:
    return "\n".join(realize(s, vocab) for s in ss)


def _slot_ok(slot, token):
    if slot == "A":
        return token in ("a", "an")
    if slot == "S":
        word = token[4:] if token.startswith("non-") else token
        return bool(_WORD.match(word))
    return bool(_WORD.match(token)) and not token.startswith("non-")


def _match(pattern, tokens):
    """Length of the longest prefix of ``tokens`` that fits ``pattern``."""
    k = 0
    for slot, tok in zip(pattern, tokens):
        if slot in "SNVIA":
            if not _slot_ok(slot, tok):
                break
        elif slot != tok:
            break
        k += 1
    return k


def parse(text: str, vocab) -> Sentence:
    """Inverse of :func:`realize`.

    Raises NotInFragment (with the character offset of the first token no
    template accepts) or UnknownWord.
    """
    body = text.strip()
    if not body.endswith("."):
        raise NotInFragment(f"sentence must end with '.': {text!r}", len(body))
    body = body[:-1]
    tokens = body.split()
    offsets = [m.start() for m in re.finditer(r"\S+", body)]
    best = 0
    for key, pattern in _PARSE_TABLE:
        k = _match(pattern, tokens)
        if k == len(pattern) == len(tokens):
            return _build(key, pattern, tokens, vocab)
        best = max(best, k)
    pos = offsets[best] if best < len(offsets) else len(body)
    raise NotInFragment(f"no template matches {text!r}", pos)


def _lit(token, vocab) -> Literal:
    if token.startswith("non-"):
        return Literal(vocab.noun_index(token[4:]), False)
    return Literal(vocab.noun_index(token), True)


def _build(key, pattern, tokens, vocab) -> Sentence:
    slots = {"S": [], "N": [], "V": [], "I": []}
    for slot, tok in zip(pattern, tokens):
        if slot in slots:
            slots[slot].append(tok)
    kind = key[0]
    if kind == "syl":
        _, q, positive = key
        return Syllogistic(q, _lit(slots["S"][0], vocab), Literal(vocab.noun_index(slots["N"][0]), positive))
    if kind == "rel":
        _, sq, oq, positive = key
        verb = slots["V"][0] if slots["V"] else slots["I"][0]
        vi = vocab.verb_index(verb)
        third, inf = vocab.verb(vi)
        if verb != (third if slots["V"] else inf):
            raise NotInFragment(f"verb {verb!r} has the wrong form for this template")
        return Relational(sq, _lit(slots["S"][0], vocab), oq, _lit(slots["S"][1], vocab), vi, positive)
    _, q, rel_positive, positive = key
    head, rel, pred = slots["N"]
    return Relative(
        q,
        vocab.noun_index(head),
        Literal(vocab.noun_index(rel), rel_positive),
        Literal(vocab.noun_index(pred), positive),
    )


def parse_instance(text: str, vocab) -> list[Sentence]:
    return [parse(line, vocab) for line in text.splitlines() if line.strip()]


def grammar_markdown() -> str:
    """The template ↔ logical-form table as markdown."""
    rows = [
        "| fragment | template | logical form |",
        "|---|---|---|",
    ]
    show = {"S": "(non-)p", "N": "p", "V": "rs", "I": "r", "A": "a"}
    for _, tokens, frag, form in _TEMPLATES:
        words = []
        nouns = iter("opq") if tokens.count("N") == 3 else None
        sub = iter(["(non-)p", "(non-)q"])
        for t in tokens.split():
            if t == "S":
                words.append(next(sub))
            elif t == "N":
                words.append(next(nouns) if nouns else "q")
            else:
                words.append(show.get(t, t))
        rows.append(f"| {frag} | {' '.join(words)}. | {form} |")
    rows.append("")
    rows.append(
        "Negative relative clauses are also accepted in the form `who is a not p`. "
        "In syllogistic and relational rows `±p` is `p` or `¬p` according to whether "
        "the noun carries the `non-` prefix; S and R forbid it, S† and R† allow it."
    )
    return "\n".join(rows) + "\n"
