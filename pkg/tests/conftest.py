import itertools
import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sparsetree import generators
from sparsetree.model import CapacitatedGraph

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@st.composite
def unit_trees(draw, max_n=14, max_k=6):
    n = draw(st.integers(2, max_n))
    k = draw(st.integers(2, min(max_k, n)))
    seed = draw(st.integers(0, 2**32))
    return generators.random_unit_tree(n, k, seed)


@st.composite
def qb_graphs(draw, max_k=4, max_centers=6):
    k = draw(st.integers(2, max_k))
    centers = draw(st.integers(1, max_centers))
    seed = draw(st.integers(0, 2**32))
    types = draw(st.none() | st.integers(1, 4))
    return generators.random_quasi_bipartite(k, centers, seed, max_types=types)


def brute_force_mincut(g: CapacitatedGraph, S) -> Fraction:
    """Cheapest vertex bipartition separating S from the other terminals."""
    S = set(S)
    free = sorted(g.nonterminals)
    best = None
    for r in range(len(free) + 1):
        for extra in itertools.combinations(free, r):
            val = g.cut_value(S | set(extra))
            if best is None or val < best:
                best = val
    return best


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
