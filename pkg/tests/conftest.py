import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lieq.library import builtin_algebra, builtin_setup, heisenberg3_center_setup

CORPUS = ("abelian2", "heisenberg3", "heisenberg5", "filiform4", "axb")


@pytest.fixture(params=CORPUS)
def corpus_algebra(request):
    return builtin_algebra(request.param)


@pytest.fixture
def h3():
    return builtin_algebra("heisenberg3")


@pytest.fixture
def h3_polarized():
    """h = <Y, Z>, lambda(Z) = 1: invariants collapse to scalars."""
    return builtin_setup("heisenberg3")


@pytest.fixture
def h3_center():
    """h = <Z>, lambda(Z) = 1: the full-quotient, noncommutative case."""
    return heisenberg3_center_setup()
