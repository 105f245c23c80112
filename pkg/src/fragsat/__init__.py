"""Satisfiability problems in controlled fragments of English."""

from .syntax import (
    ALL,
    EXISTS,
    Fragment,
    Literal,
    Quant,
    Relational,
    Relative,
    Sentence,
    Syllogistic,
    neg,
    pos,
)
from .vocab import Vocabulary, default_vocabulary, load_vocabulary
from .surface import parse_instance, realize_instance
from .decide import SAT, UNSAT, decide
from .fol import to_tptp
from .gen import Instance, default_params, generate_corpus, generate_instance
from .construct import make_constructed
from .corpus import Record, emit_jsonl, read_jsonl

__version__ = "0.1.0"
