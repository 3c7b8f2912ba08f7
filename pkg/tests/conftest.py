import functools
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from siegelgk.corpus import generate_corpus, random_unimodular
from siegelgk.forms import HalfIntMatrix

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PRIMES = (2, 3, 5)


@functools.lru_cache(maxsize=None)
def corpus():
    return tuple(generate_corpus())


@pytest.fixture(scope="session")
def full_corpus():
    return corpus()


@st.composite
def forms(draw, primes=PRIMES, max_n=4, max_ord=3):
    """Nondegenerate half-integral forms with entries of bounded order."""
    p = draw(st.sampled_from(primes))
    n = draw(st.integers(1, max_n))
    tw = [[0] * n for _ in range(n)]
    for i in range(n):
        u = draw(st.integers(1, 2 * p - 1).filter(lambda x: x % p))
        tw[i][i] = 2 * u * p ** draw(st.integers(0, max_ord))
        for j in range(i + 1, n):
            v = draw(st.integers(-3, 3))
            tw[i][j] = tw[j][i] = v * p ** draw(st.integers(0, max_ord))
    B = HalfIntMatrix(p, tw)
    if not B.nondegenerate:
        B = HalfIntMatrix.diagonal(p, [x // 2 for x in (tw[i][i] for i in range(n))])
    return B


@st.composite
def unimodular(draw, n, p):
    seed = draw(st.integers(0, 2 ** 32))
    return random_unimodular(n, p, random.Random(seed))


@st.composite
def form_and_unimodular(draw, **kw):
    B = draw(forms(**kw))
    return B, draw(unimodular(B.n, B.p))


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
