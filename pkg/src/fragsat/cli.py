"""The ``fragsat`` command line.

Every subcommand accepts ``--seed``, ``--prover``, ``--timeout`` and
``--out``. Failures print one JSON line ``{"error": ..., "message": ...}``
to stderr and exit 1; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import corpus
from .decide import METHODS, SAT, UNSAT, decide
from .errors import FragsatError
from .gen import (
    LABELERS,
    default_params,
    filter_hard,
    generate_corpus,
    instance_seed,
    literal_params,
)
from .surface import grammar_markdown, parse_instance, realize_instance
from .syntax import Fragment, fragment_of, from_term, to_term
from .vocab import default_vocabulary

_PARAM_FLAGS = {
    "p_u": float, "p_sbar": float, "p_obar": float, "p_r": float, "p_vbar": float,
    "p_uu": float, "p_rbar": float, "p_pbar": float, "n": int, "v": int,
}


def _fragment(tag: str) -> Fragment:
    try:
        return Fragment.parse(tag)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _u64(text: str) -> int:
    x = int(text, 0)
    if not 0 <= x < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return x


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=_u64, default=0, help="master seed (unsigned 64-bit)")
    shared.add_argument("--prover", help="prover command with one {file} placeholder, or 'builtin'")
    shared.add_argument("--timeout", type=float, default=30.0, help="prover time limit in seconds")
    shared.add_argument("--out", help="output path (default: stdout)")

    ap = argparse.ArgumentParser(prog="fragsat", description="Generate, decide and export satisfiability problems in controlled English.")
    ap.add_argument("--dump-grammar", action="store_true", help="print the template table and exit")
    sub = ap.add_subparsers(dest="command")

    g = sub.add_parser("gen", parents=[shared], help="generate a labeled random corpus")
    g.add_argument("--fragment", type=_fragment, required=True)
    g.add_argument("--min-s", type=int, default=15)
    g.add_argument("--max-s", type=int, default=30)
    g.add_argument("--per-size", type=int, default=500)
    g.add_argument("--label-with", choices=LABELERS, default=None,
                   help="default: graph for S/S†, monadic for Srel/SrelN, atp for R/R†")
    g.add_argument("--split", choices=corpus.SPLITS, default="train")
    g.add_argument("--literal-params", action="store_true",
                   help="use the literal published parameters instead of the calibrated defaults")
    g.add_argument("--hard-l-min", type=int, default=0, help="keep only refutations with at least this many lines")
    for name, typ in _PARAM_FLAGS.items():
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None)
    g.set_defaults(run=cmd_gen)

    c = sub.add_parser("construct", parents=[shared], help="build instances around forbidden configurations")
    c.add_argument("--fragment", type=_fragment, required=True, help="sdag or r")
    c.add_argument("--d-min", type=int, required=True)
    c.add_argument("--d-max", type=int, required=True)
    c.add_argument("--s", type=int, default=20)
    c.add_argument("--count", type=int, required=True)
    c.add_argument("--label", choices=("sat", "unsat", "balanced"), default="balanced")
    c.add_argument("--kind", choices=("i", "ii", "iii", "mutual"), help="S† violation kind (default: uniform over i/ii/iii)")
    c.add_argument("--paired", action="store_true", help="emit unsat/sat twins sharing their padding (S† only)")
    c.add_argument("--split", choices=corpus.SPLITS, default="train")
    c.set_defaults(run=cmd_construct)

    d = sub.add_parser("decide", parents=[shared], help="re-decide the records of a corpus")
    d.add_argument("--in", dest="inp", required=True)
    d.add_argument("--method", choices=METHODS, default="graph")
    d.add_argument("--max-domain", type=int, default=None)
    d.set_defaults(run=cmd_decide)

    s = sub.add_parser("stats", parents=[shared], help="print corpus statistics as JSON")
    s.add_argument("--in", dest="inp", required=True)
    s.set_defaults(run=cmd_stats)

    t = sub.add_parser("tptp", parents=[shared], help="export records as TPTP problems")
    t.add_argument("--in", dest="inp", required=True)
    t.set_defaults(run=cmd_tptp)

    p = sub.add_parser("parse", parents=[shared], help="English sentences (one per line) to terms")
    p.add_argument("--in", dest="inp", help="text file (default: stdin)")
    p.add_argument("--split", choices=corpus.SPLITS, default="train")
    p.set_defaults(run=cmd_parse)

    r = sub.add_parser("realize", parents=[shared], help="terms (one per line) to English")
    r.add_argument("--in", dest="inp", help="term file (default: stdin)")
    r.add_argument("--split", choices=corpus.SPLITS, default="train")
    r.set_defaults(run=cmd_realize)

    m = sub.add_parser("dump-grammar", parents=[shared], help="print the template table")
    m.set_defaults(run=cmd_dump_grammar)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.dump_grammar and args.command is None:
        print(grammar_markdown())
        return 0
    if args.command is None:
        ap.print_usage(sys.stderr)
        print("fragsat: error: a subcommand is required", file=sys.stderr)
        return 2
    try:
        args.run(args)
    except FragsatError as e:
        return _fail(type(e).__name__, str(e))
    except (OSError, ValueError) as e:
        return _fail(type(e).__name__, str(e))
    return 0


def _fail(kind, message) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return 1


def _prover(args):
    from .atp import ProverConfig

    return ProverConfig.from_env(args.prover, args.timeout)


def _write(args, text: str):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit(args, records):
    _write(args, "".join(corpus.dumps(r) + "\n" for r in records))


def _read_input(args) -> str:
    if args.inp:
        return Path(args.inp).read_text(encoding="utf-8")
    return sys.stdin.read()


def default_labeler(f: Fragment) -> str:
    if f in (Fragment.R, Fragment.RDag):
        return "atp"
    return "graph" if f in (Fragment.S, Fragment.SDag) else "monadic"


def cmd_gen(args):
    f = args.fragment
    if args.min_s < 1 or args.max_s < args.min_s:
        raise ValueError("need 1 <= --min-s <= --max-s")
    overrides = {k: getattr(args, k) for k in _PARAM_FLAGS if getattr(args, k) is not None}
    labeler = args.label_with or default_labeler(f)
    vocab = default_vocabulary(args.split)
    prover = _prover(args) if labeler == "atp" else None
    insts = generate_corpus(
        f, (args.min_s, args.max_s), args.per_size, labeler, args.seed,
        overrides=overrides, vocab=vocab, prover=prover,
        params=literal_params if args.literal_params else default_params,
    )
    ids = [f"{f.value}-s{inst.s}-{i % args.per_size:05d}" for i, inst in enumerate(insts)]
    if args.hard_l_min > 0:
        keyed = filter_hard([replace(x, meta={**x.meta, "id": k}) for x, k in zip(insts, ids)],
                            args.hard_l_min, random.Random(args.seed))
        insts, ids = keyed, [x.meta["id"] for x in keyed]
    _emit(args, [corpus.to_record(x, k, args.split) for x, k in zip(insts, ids)])


def cmd_construct(args):
    from .construct import ChainSpec, make_constructed, make_paired_syllogistic

    f = args.fragment
    if f not in (Fragment.SDag, Fragment.R):
        raise ValueError("construct supports --fragment sdag or r")
    if not 1 <= args.d_min <= args.d_max:
        raise ValueError("need 1 <= --d-min <= --d-max")
    if args.paired and f is not Fragment.SDag:
        raise ValueError("--paired is available for sdag only")
    if args.kind and f is not Fragment.SDag:
        raise ValueError("--kind applies to sdag only")
    vocab = default_vocabulary(args.split)
    prover = _prover(args) if f is Fragment.R else None
    span = args.d_max - args.d_min + 1
    records = []
    index = 0
    while len(records) < args.count:
        seed = instance_seed(args.seed, f, args.s, index)
        rng = random.Random(seed)
        if args.label == "balanced":
            target, d = (UNSAT if index % 2 == 0 else SAT), args.d_min + (index // 2) % span
        else:
            target, d = (SAT if args.label == "sat" else UNSAT), args.d_min + index % span
        if args.paired:
            d = args.d_min + index % span
            pair = make_paired_syllogistic(ChainSpec(d, args.kind, UNSAT, args.s), None, rng, vocab)
            made = [x for x in pair if args.label == "balanced" or x.label is target]
        else:
            made = [make_constructed(f, d, args.s, target, rng, kind=args.kind, prover=prover, vocab=vocab)]
        for k, inst in enumerate(made):
            if len(records) == args.count:
                break
            inst = replace(inst, seed=seed)
            suffix = f"-{'unsat' if inst.label is UNSAT else 'sat'}" if args.paired else ""
            records.append(corpus.to_record(inst, f"{f.value}-c{index:05d}{suffix}", args.split))
        index += 1
    _emit(args, records)


def cmd_decide(args):
    """Re-decide every record; output lines are the record plus ``verdict``, ``agrees`` and ``config``."""
    prover = _prover(args) if args.method == "atp" else None
    lines = []
    for rec in corpus.read_jsonl(args.inp):
        v = decide(corpus.record_sentences(rec), args.method, max_domain=args.max_domain, prover=prover)
        out = asdict(rec)
        out["verdict"] = {SAT: "sat", UNSAT: "unsat"}.get(v.status, "unknown")
        out["agrees"] = out["verdict"] == rec.label
        out["config"] = v.config.summary() if v.config is not None else None
        if v.proof is not None:
            out["l"], out["d"] = v.proof.l, v.proof.d
        lines.append(json.dumps(out, ensure_ascii=False) + "\n")
    _write(args, "".join(lines))


def cmd_stats(args):
    st = corpus.stats(corpus.read_jsonl(args.inp))
    _write(args, json.dumps(st.as_dict(), indent=2) + "\n")


def cmd_tptp(args):
    if not args.out:
        raise ValueError("tptp needs --out <directory>")
    paths = corpus.write_tptp(corpus.read_jsonl(args.inp), args.out)
    print(f"wrote {len(paths)} problems to {args.out}")


def cmd_parse(args):
    vocab = default_vocabulary(args.split)
    ss = parse_instance(_read_input(args), vocab)
    _write(args, "".join(f"{to_term(s, vocab)}\t{fragment_of(s).value}\n" for s in ss))


def cmd_realize(args):
    vocab = default_vocabulary(args.split)
    terms = [t.split("\t")[0] for t in _read_input(args).splitlines() if t.strip()]
    ss = [from_term(t, vocab) for t in terms]
    _write(args, realize_instance(ss, vocab) + ("\n" if ss else ""))


def cmd_dump_grammar(args):
    _write(args, grammar_markdown() + "\n")


if __name__ == "__main__":
    sys.exit(main())
