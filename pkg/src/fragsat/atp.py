"""Client for automated theorem provers that speak SZS.

A prover is described by a :class:`ProverConfig`: a command template with
one ``{file}`` placeholder, a timeout and a concurrency cap. The template
comes from ``--prover``, the ``FRAGSAT_PROVER`` environment variable, or
defaults to the bundled reference prover (:mod:`fragsat.prover`). The word
``builtin`` selects that prover in-process, which skips interpreter start-up
and is what bulk labeling uses.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import sys
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .decide import SAT, UNKNOWN, UNSAT, Verdict
from .errors import NoProofFound, ProverUnavailable, UnparseableOutput
from .fol import to_tptp

BUILTIN = "builtin"
SATISFIABLE = "Satisfiable"
UNSATISFIABLE = "Unsatisfiable"
TIMEOUT = "Timeout"
ERROR = "Error"

_SZS_MAP = {
    "Satisfiable": SATISFIABLE,
    "CounterSatisfiable": SATISFIABLE,
    "FiniteSatisfiable": SATISFIABLE,
    "Unsatisfiable": UNSATISFIABLE,
    "ContradictoryAxioms": UNSATISFIABLE,
    "Theorem": UNSATISFIABLE,
    "Timeout": TIMEOUT,
    "ResourceOut": TIMEOUT,
    "MemoryOut": TIMEOUT,
}

_STATUS_RE = re.compile(r"%?\s*SZS status\s+(\w+)")


@dataclass(frozen=True)
class ProverConfig:
    """How to run a prover.

    ``command`` is either :data:`BUILTIN` or an argument list containing
    exactly one ``{file}`` placeholder (it may sit inside a larger argument,
    as in ``--input={file}``).
    """

    command: tuple = (BUILTIN,)
    timeout: float = 30.0
    dialect: str = "generic-SZS"
    max_concurrent: int = 1

    def __post_init__(self):
        cmd = self.command
        if isinstance(cmd, str):
            cmd = (BUILTIN,) if cmd.strip() == BUILTIN else tuple(shlex.split(cmd))
        object.__setattr__(self, "command", tuple(cmd))
        if self.command != (BUILTIN,):
            holes = sum(arg.count("{file}") for arg in self.command)
            if holes != 1:
                raise ValueError(f"prover command must contain exactly one {{file}}, found {holes}")
        if self.max_concurrent < 1:
            raise ValueError("max_concurrent must be at least 1")

    @property
    def builtin(self) -> bool:
        return self.command == (BUILTIN,)

    @classmethod
    def from_env(cls, command=None, timeout=None, max_concurrent=None) -> "ProverConfig":
        """``command`` if given, else ``$FRAGSAT_PROVER``, else the builtin prover."""
        cmd = command or os.environ.get("FRAGSAT_PROVER") or BUILTIN
        kw = {}
        if timeout is not None:
            kw["timeout"] = timeout
        if max_concurrent is not None:
            kw["max_concurrent"] = max_concurrent
        return cls(cmd, **kw)


def subprocess_builtin(timeout: float = 30.0) -> ProverConfig:
    """The bundled prover run as a separate process, like any external binary."""
    return ProverConfig((sys.executable, "-m", "fragsat.prover", "--timeout", str(timeout), "{file}"), timeout=timeout)


@dataclass(frozen=True)
class ProofStats:
    l: int
    d: int


@dataclass(frozen=True)
class ProverResult:
    status: str
    raw: str
    detail: str = ""


_SEMAPHORES: dict = {}
_SEM_LOCK = threading.Lock()


def _semaphore(cfg):
    with _SEM_LOCK:
        key = (cfg.command, cfg.max_concurrent)
        if key not in _SEMAPHORES:
            _SEMAPHORES[key] = threading.BoundedSemaphore(cfg.max_concurrent)
        return _SEMAPHORES[key]


def parse_status(raw: str) -> tuple[str, str]:
    """Map the first ``SZS status`` line to (status, SZS value)."""
    m = _STATUS_RE.search(raw)
    if not m:
        raise UnparseableOutput("prover output has no SZS status line")
    value = m.group(1)
    return _SZS_MAP.get(value, ERROR), value


def run_prover(tptp: str, cfg: ProverConfig | None = None, name: str = "problem") -> ProverResult:
    """Run the prover on a TPTP document and classify its SZS status."""
    cfg = cfg or ProverConfig.from_env()
    if cfg.timeout <= 0:
        return ProverResult(TIMEOUT, "", "zero time limit")
    with _semaphore(cfg):
        if cfg.builtin:
            from .prover import run

            raw = run(tptp, name, timeout=cfg.timeout)
        else:
            raw = _run_subprocess(tptp, cfg, name)
            if raw is None:
                return ProverResult(TIMEOUT, "", "killed after timeout")
    status, value = parse_status(raw)
    return ProverResult(status, raw, "" if status != ERROR else value)


def _run_subprocess(tptp, cfg, name):
    with tempfile.TemporaryDirectory(prefix="fragsat-") as tmp:
        path = Path(tmp) / f"{name}.p"
        path.write_text(tptp, encoding="utf-8")
        argv = [arg.replace("{file}", str(path)) for arg in cfg.command]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=cfg.timeout)
        except FileNotFoundError as e:
            raise ProverUnavailable(f"cannot start prover {argv[0]!r}: {e}") from None
        except PermissionError as e:
            raise ProverUnavailable(f"cannot start prover {argv[0]!r}: {e}") from None
        except subprocess.TimeoutExpired:
            return None
        return proc.stdout + proc.stderr


# -- proof statistics --------------------------------------------------------------

_TSTP_LINE = re.compile(r"^\s*(fof|cnf|tff)\(\s*([^,\s]+)\s*,\s*(\w+)\s*,")
_FILE_REF = re.compile(r"file\(\s*(?:'[^']*'|[^,()]+)\s*,\s*([^)\s]+)\s*\)")
_NATIVE_LINE = re.compile(r"^\s*(\d+)\.\s.*\[([^\]]*)\]\s*$")


def proof_stats(raw: str, s: int | None = None) -> ProofStats:
    """Proof length and used-axiom count of the refutation in ``raw``.

    Two layouts are understood: TSTP derivations between ``SZS output start``
    and ``SZS output end`` (axioms carry ``file(..., name)`` sources), and
    the numbered native layout ``12. formula [input s3]`` printed by
    Vampire without ``--proof tptp``.
    """
    lines = raw.splitlines()
    start = next((i for i, t in enumerate(lines) if "SZS output start" in t), None)
    if start is not None:
        end = next((i for i in range(start + 1, len(lines)) if "SZS output end" in lines[i]), len(lines))
        body = lines[start + 1 : end]
        # statements may wrap; join before splitting on the terminating ").".
        text = "\n".join(t for t in body if not t.lstrip().startswith("%"))
        stmts = [st for st in re.split(r"\)\.\s*(?:\n|$)", text) if st.strip()]
        steps = [st for st in stmts if _TSTP_LINE.match(st)]
        if steps:
            axioms = {m.group(1) for st in steps for m in [_FILE_REF.search(st)] if m}
            return _checked(len(steps), len(axioms), s)
        lines = body
    native = [m for t in lines for m in [_NATIVE_LINE.match(t)] if m]
    if native:
        axioms = {m.group(1) for m in native if m.group(2).strip().startswith("input")}
        # a native input line names no axiom; every such line is a distinct input formula
        return _checked(len({m.group(1) for m in native}), len(axioms), s)
    raise NoProofFound("no refutation in prover output")


def _checked(l, d, s):
    if l < 1 or d < 1:
        raise NoProofFound("refutation has no lines or uses no axioms")
    if d > l or (s is not None and d > s):
        raise NoProofFound(f"implausible proof statistics l={l}, d={d}, s={s}")
    return ProofStats(l, d)


def used_axioms(raw: str) -> set[str]:
    """Axiom names referenced by ``file(...)`` sources in a TSTP refutation."""
    return {m.group(1) for m in _FILE_REF.finditer(_proof_block(raw))}


def _proof_block(raw):
    lines = raw.splitlines()
    start = next((i for i, t in enumerate(lines) if "SZS output start" in t), None)
    if start is None:
        return ""
    end = next((i for i in range(start + 1, len(lines)) if "SZS output end" in lines[i]), len(lines))
    return "\n".join(lines[start + 1 : end])


# -- verdicts ------------------------------------------------------------------------

def prove(ss, cfg: ProverConfig | None = None, *, stats: bool = True) -> Verdict:
    """Label a sentence list by ATP. Unsatisfiable verdicts carry ProofStats when a refutation was printed."""
    ss = list(ss)
    res = run_prover(to_tptp(ss), cfg)
    if res.status == SATISFIABLE:
        return Verdict(SAT, detail=res.raw)
    if res.status == UNSATISFIABLE:
        proof = None
        if stats:
            try:
                proof = proof_stats(res.raw, len(ss))
            except NoProofFound:
                proof = None
        return Verdict(UNSAT, proof=proof, detail=res.raw)
    return Verdict(UNKNOWN, detail=f"{res.status}: {res.detail}".rstrip(": "))


def prove_many(instances, cfg: ProverConfig | None = None) -> list[Verdict]:
    """``prove`` over many instances, at most ``cfg.max_concurrent`` at a time; results keep input order."""
    cfg = cfg or ProverConfig.from_env()
    instances = list(instances)
    if cfg.max_concurrent == 1 or cfg.builtin:
        return [prove(ss, cfg) for ss in instances]
    with ThreadPoolExecutor(cfg.max_concurrent) as pool:
        return list(pool.map(lambda ss: prove(ss, cfg), instances))
