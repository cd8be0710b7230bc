"""
Pytest configuration and shared fixtures for pathpart tests.
"""

import pytest

from pathpart import DecoratedPartialGroup
from pathpart.decpart import DecGraph, ElementHolder, build, uniform
from pathpart.fingroup import builtin_group
from pathpart.graphs import Graph, complete, path
from pathpart.options import SearchLimits


@pytest.fixture(autouse=True)
def reset_element_cache():
    """
    Automatically reset the element cache and search limits around each test.

    No test can affect another test's cache state or limits.
    """
    ElementHolder.clear_cache()
    ElementHolder.set_cache_size(4)
    SearchLimits.reset()

    yield

    ElementHolder.clear_cache()
    ElementHolder.set_cache_size(4)
    SearchLimits.reset()


@pytest.fixture
def cache_size_2():
    DecoratedPartialGroup.set_element_cache_size(2)
    yield 2


@pytest.fixture
def cache_size_3():
    DecoratedPartialGroup.set_element_cache_size(3)
    yield 3


@pytest.fixture
def z2():
    return builtin_group("Z2")


@pytest.fixture
def k2_z2z3():
    """K2 on {a, b} decorated with Z2 at a and Z3 at b."""
    return DecGraph(Graph(2, [(0, 1)], ["a", "b"]), [builtin_group("Z2"), builtin_group("Z3")])


@pytest.fixture
def p_k2(z2):
    """The path partial group of K2."""
    return build(uniform(Graph(2, [(0, 1)], ["a", "b"]), z2))


@pytest.fixture
def p_p3(z2):
    """The path partial group of the path a - b - c."""
    return build(uniform(path(3).relabel(["a", "b", "c"]), z2))


@pytest.fixture
def sample_decgraphs():
    """A few small decorated graphs covering edgeless, path and clique shapes."""
    return [
        DecGraph(Graph(2, [], ["a", "b"]), [builtin_group("Z2"), builtin_group("Z3")]),
        uniform(path(3).relabel(["a", "b", "c"]), builtin_group("Z3")),
        DecGraph(complete(3).relabel(["a", "b", "c"]), [builtin_group(n) for n in ("Z2", "V4", "Z3")]),
    ]
