from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from ietlab.iet import build_iet
from ietlab.streams import strictly_irreducible_permutations

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

PERMS = {n: strictly_irreducible_permutations(n) for n in (2, 3, 4, 5)}


@st.composite
def exact_iets(draw, sizes=(2, 3, 4, 5)):
    n = draw(st.sampled_from(sizes))
    perm = draw(st.sampled_from(PERMS[n]))
    nums = draw(st.lists(st.integers(1, 2**40), min_size=n, max_size=n))
    total = sum(nums)
    return build_iet([Fraction(v, total) for v in nums], perm, "exact")


@st.composite
def points(draw, iet):
    num = draw(st.integers(0, 2**50 - 1))
    return Fraction(num, 2**50) * iet.total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
