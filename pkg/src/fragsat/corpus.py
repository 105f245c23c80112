"""Labeled corpora: the JSONL record schema, conversion from instances, and statistics."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .decide import SAT, UNSAT
from .errors import SchemaError
from .gen import Instance
from .surface import realize_instance
from .syntax import Fragment, from_term, to_term
from .vocab import Vocabulary, default_vocabulary

LABELS = ("sat", "unsat")
CONSTRUCTIONS = ("random", "chain", "forallforall", "hard-filtered")
SPLITS = ("train", "eval")
L_BUCKETS = ((0, 10), (10, 20), (20, 30), (30, 40), (40, None))


@dataclass(frozen=True)
class Record:
    """One corpus line. ``l`` and ``d`` are set only for ATP-refuted instances."""

    id: str
    fragment: str
    sentences: list
    text: str
    label: str
    s: int
    n: int
    v: int
    l: int | None
    d: int | None
    seed: int
    construction: str
    split: str


FIELDS = tuple(f.name for f in fields(Record))
_INT_FIELDS = ("s", "n", "v", "seed")


def to_record(inst: Instance, id: str, split: str = "train") -> Record:
    if inst.label not in (SAT, UNSAT):
        raise ValueError(f"instance {id} has no definite label")
    lex = inst.lexicon
    proof = inst.proof if inst.label is UNSAT else None
    return Record(
        id=id,
        fragment=inst.fragment.value,
        sentences=[to_term(s, lex) for s in inst.sentences],
        text=realize_instance(inst.sentences, lex),
        label="sat" if inst.label is SAT else "unsat",
        s=inst.s,
        n=inst.params.n if inst.params else lex.n,
        v=inst.params.v if inst.params else lex.v,
        l=proof.l if proof else None,
        d=proof.d if proof else None,
        seed=inst.seed,
        construction=inst.construction,
        split=split,
    )


def record_sentences(rec: Record, vocab: Vocabulary | None = None):
    """Sentences of ``rec`` as ASTs, indexed into ``vocab`` (default: the bundled lexicon of its split)."""
    vocab = vocab or default_vocabulary(rec.split)
    return [from_term(t, vocab) for t in rec.sentences]


def to_instance(rec: Record, vocab: Vocabulary | None = None) -> Instance:
    vocab = vocab or default_vocabulary(rec.split)
    return Instance(
        Fragment(rec.fragment),
        tuple(record_sentences(rec, vocab)),
        vocab,
        label=SAT if rec.label == "sat" else UNSAT,
        seed=rec.seed,
        construction=rec.construction,
    )


def emit_jsonl(records, path) -> None:
    """Write one JSON object per line in schema field order."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dumps(rec) + "\n")


def dumps(rec: Record) -> str:
    return json.dumps(asdict(rec), ensure_ascii=False)


def read_jsonl(path) -> list[Record]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"line {lineno}: not JSON ({e.msg})") from None
            out.append(validate(obj, lineno))
    return out


def validate(obj, lineno: int = 0) -> Record:
    """A Record from a decoded JSON object, or SchemaError naming the line."""
    where = f"line {lineno}: " if lineno else ""
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}record is not an object")
    missing = [k for k in FIELDS if k not in obj]
    if missing:
        raise SchemaError(f"{where}missing field(s) {', '.join(missing)}")
    extra = sorted(set(obj) - set(FIELDS))
    if extra:
        raise SchemaError(f"{where}unknown field(s) {', '.join(extra)}")

    def bad(name, why):
        raise SchemaError(f"{where}field {name!r} {why}")

    for name in ("id", "fragment", "text", "label", "construction", "split"):
        if not isinstance(obj[name], str):
            bad(name, "must be a string")
    for name in _INT_FIELDS:
        if not _is_int(obj[name]) or obj[name] < 0:
            bad(name, "must be a non-negative integer")
    for name in ("l", "d"):
        if obj[name] is not None and (not _is_int(obj[name]) or obj[name] < 1):
            bad(name, "must be a positive integer or null")
    if not isinstance(obj["sentences"], list) or not all(isinstance(t, str) for t in obj["sentences"]):
        bad("sentences", "must be a list of strings")
    if obj["fragment"] not in {f.value for f in Fragment}:
        bad("fragment", f"has unknown tag {obj['fragment']!r}")
    if obj["label"] not in LABELS:
        bad("label", f"must be one of {LABELS}")
    if obj["construction"] not in CONSTRUCTIONS:
        bad("construction", f"must be one of {CONSTRUCTIONS}")
    if obj["split"] not in SPLITS:
        bad("split", f"must be one of {SPLITS}")
    if obj["s"] != len(obj["sentences"]):
        bad("s", "does not match the number of sentences")
    if (obj["l"] is None) != (obj["d"] is None):
        bad("l", "and 'd' must be both set or both null")
    if obj["l"] is not None and obj["label"] != "unsat":
        bad("l", "is set on a satisfiable record")
    return Record(**{k: obj[k] for k in FIELDS})


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


# -- statistics ----------------------------------------------------------------------

def bucket_name(lo, hi) -> str:
    return f"[{lo},{hi})" if hi is not None else f"[{lo},inf)"


def l_bucket(l: int) -> str:
    for lo, hi in L_BUCKETS:
        if l >= lo and (hi is None or l < hi):
            return bucket_name(lo, hi)
    raise ValueError(f"negative proof length {l}")


@dataclass
class CorpusStats:
    count: int
    satisfiable_fraction: float | None
    unsat_with_proof: int
    l_histogram: dict
    d_mean: float | None
    d_histogram: dict
    per_s: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def stats(records) -> CorpusStats:
    """Aggregate counts; l and d histograms are fractions over unsatisfiable records that carry them."""
    records = list(records)
    proofs = [r for r in records if r.label == "unsat" and r.l is not None]
    l_counts = Counter(l_bucket(r.l) for r in proofs)
    d_counts = Counter(r.d for r in proofs)
    by_s: dict = {}
    for r in records:
        by_s.setdefault(r.s, []).append(r)
    per_s = {}
    for s in sorted(by_s):
        rs = by_s[s]
        ds = [r.d for r in rs if r.d is not None]
        per_s[str(s)] = {
            "count": len(rs),
            "satisfiable_fraction": _frac(sum(r.label == "sat" for r in rs), len(rs)),
            "d_mean": sum(ds) / len(ds) if ds else None,
        }
    return CorpusStats(
        count=len(records),
        satisfiable_fraction=_frac(sum(r.label == "sat" for r in records), len(records)),
        unsat_with_proof=len(proofs),
        l_histogram={bucket_name(lo, hi): _frac(l_counts[bucket_name(lo, hi)], len(proofs)) or 0.0 for lo, hi in L_BUCKETS},
        d_mean=sum(r.d for r in proofs) / len(proofs) if proofs else None,
        d_histogram={str(d): d_counts[d] / len(proofs) for d in sorted(d_counts)},
        per_s=per_s,
    )


def _frac(a, b):
    return a / b if b else None


def write_tptp(records, out_dir) -> list[Path]:
    """One ``<id>.p`` problem per record; axioms are named after record nouns and verbs."""
    from .fol import to_tptp

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for rec in records:
        vocab = default_vocabulary(rec.split)
        path = out_dir / f"{_safe(rec.id)}.p"
        header = f"% {rec.id}: fragment {rec.fragment}, label {rec.label}\n"
        path.write_text(header + to_tptp(record_sentences(rec, vocab), vocab), encoding="utf-8")
        paths.append(path)
    return paths


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)
