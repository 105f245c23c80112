import random

import pytest
from hypothesis import strategies as st

from fragsat.gen import GenParams, sample_sentence
from fragsat.syntax import ALL, EXISTS, Fragment, Literal, Relational, Relative, Syllogistic, pos, neg
from fragsat.vocab import Vocabulary, default_vocabulary

WORKED_TEXT = """Every artist is a beekeeper.
Every beekeeper is a carpenter.
No carpenter is a dentist.
Some artist is a dentist."""

SMALL = Vocabulary(
    ("artist", "beekeeper", "carpenter", "dentist", "electrician"),
    (("hates", "hate"), ("chases", "chase")),
)
ARTIST, BEEKEEPER, CARPENTER, DENTIST, ELECTRICIAN = range(5)
HATE, CHASE = range(2)


@pytest.fixture
def small():
    return SMALL


@pytest.fixture
def worked():
    return [
        Syllogistic(ALL, pos(ARTIST), pos(BEEKEEPER)),
        Syllogistic(ALL, pos(BEEKEEPER), pos(CARPENTER)),
        Syllogistic(ALL, pos(CARPENTER), neg(DENTIST)),
        Syllogistic(EXISTS, pos(ARTIST), pos(DENTIST)),
    ]


def argument_one():
    """Some artist hates no beekeeper; every beekeeper hates some artist; so some artist is not a beekeeper."""
    return [
        Relational(EXISTS, pos(ARTIST), ALL, pos(BEEKEEPER), HATE, False),
        Relational(ALL, pos(BEEKEEPER), EXISTS, pos(ARTIST), HATE, True),
    ], Syllogistic(EXISTS, pos(ARTIST), neg(BEEKEEPER))


# -- random sentences ------------------------------------------------------------

def all_over(f: Fragment, n: int, v: int) -> GenParams:
    """Parameters that reach every sentence form of ``f``."""
    relational = f in (Fragment.R, Fragment.RDag)
    return GenParams(
        p_u=0.5,
        p_sbar=0.5 if f in (Fragment.SDag, Fragment.RDag) else 0.0,
        p_obar=0.0 if f is Fragment.R else 0.5,
        p_r=0.5 if relational else 0.0,
        p_vbar=0.5,
        p_uu=0.5,
        p_rbar=0.5 if f is Fragment.SRelNeg else 0.0,
        n=n,
        v=v if relational else 0,
        s=1,
        p_pbar=0.0 if f is Fragment.R else None,
    )


def random_sentences(f: Fragment, count: int, n: int, v: int, rng: random.Random):
    p = all_over(f, n, v)
    return [sample_sentence(f, p, rng) for _ in range(count)]


def literals(n):
    return st.builds(Literal, st.integers(0, n - 1), st.booleans())


def sentences(n=5, v=2, fragments=tuple(Fragment)):
    """Hypothesis strategy over all three sentence forms."""
    q = st.sampled_from((ALL, EXISTS))
    return st.one_of(
        st.builds(Syllogistic, q, literals(n), literals(n)),
        st.builds(Relational, q, literals(n), q, literals(n), st.integers(0, v - 1), st.booleans()),
        st.builds(Relative, q, st.integers(0, n - 1), literals(n), literals(n)),
    )


@pytest.fixture(scope="session")
def train_vocab():
    return default_vocabulary("train")


@pytest.fixture(scope="session")
def eval_vocab():
    return default_vocabulary("eval")


# -- acceptance report ------------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
