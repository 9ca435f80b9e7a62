from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import qb_graphs
from sparsetree import generators
from sparsetree.errors import NonterminalAdjacency, NotUnitCapacities, SingleRay
from sparsetree.flow import terminal_mincut
from sparsetree.model import CapacitatedGraph, Demand, build_graph
from sparsetree.quasibip import (
    StarComponent,
    decompose_stars,
    exact_qb_sparsifier,
    group_by_type,
    normalize_quasi_bipartite,
    qb_sparsifier,
    star_quality,
    weighted_star_by_contractions,
    weighted_star_sparsifier,
)
from sparsetree.verify import (
    bipartitions,
    enumerate_cut_quality,
    max_concurrent_flow,
    tree_congestion,
)


def test_normalize_triangle():
    tri = build_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    out = normalize_quasi_bipartite(tri)
    assert len(out.nonterminals) == 3 and out.m == 6
    assert all((u in out.terminals) != (v in out.terminals) for u, v in out.edges)


def test_normalize_leaves_bipartite_graph():
    s = generators.star(4)
    assert normalize_quasi_bipartite(s) is s


def test_normalize_rejects_nonterminal_edge():
    g = build_graph(["a", "b"], [("a", "u"), ("u", "v"), ("v", "b")])
    with pytest.raises(NonterminalAdjacency):
        normalize_quasi_bipartite(g)


def test_decompose_two_centers():
    g = build_graph(["a", "b", "c"], [("u1", "a"), ("u1", "b"), ("u2", "b"), ("u2", "c")])
    stars, plan = decompose_stars(g)
    assert [s.center for s in stars] == ["u1", "u2"]
    assert plan.steps == ((0, 1, {"b": "b#1"}),)
    assert plan.replay([s.graph() for s in stars]) == g


def test_decompose_single_star():
    stars, plan = decompose_stars(generators.star(3))
    assert len(stars) == 1 and plan.steps == ()


def test_decompose_four_centers_cover_terminals():
    g = build_graph(
        ["a", "b", "c"],
        [(u, x) for u, sig in [("u1", "ab"), ("u2", "bc"), ("u3", "ac"), ("u4", "abc")] for x in sig],
    )
    stars, plan = decompose_stars(g)
    assert len(stars) == 4
    assert plan.replay([weighted_star_sparsifier(s) for s in stars]).vertices == {"a", "b", "c"}


@given(qb_graphs(max_k=5, max_centers=8))
def test_decompose_replay_reconstructs(g):
    norm = normalize_quasi_bipartite(g)
    stars, plan = decompose_stars(norm)
    assert plan.replay([s.graph() for s in stars]) == CapacitatedGraph(
        norm.vertices - {u for u in norm.nonterminals if norm.degree(u) == 0},
        norm.terminals,
        norm.edge_list(),
    )


def test_weighted_star_example():
    star = StarComponent("u", {"x1": Fraction(1), "x2": Fraction(2), "x3": Fraction(3)})
    h = weighted_star_sparsifier(star)
    assert dict(h.edges) == {("x1", "x2"): Fraction(2, 3), ("x1", "x3"): 1, ("x2", "x3"): 2}
    assert h == weighted_star_by_contractions(star)
    assert star_quality(star) == Fraction(5, 3)
    g = generators.weighted_star([1, 2, 3])
    assert tree_congestion(g, Demand.from_graph(h)).quality == Fraction(5, 3)


@pytest.mark.parametrize("k", [2, 3, 6])
def test_unit_star_matches_tree_construction(k):
    star = StarComponent("v", {f"x{i}": Fraction(1) for i in range(1, k + 1)})
    assert set(weighted_star_sparsifier(star).edges.values()) == {Fraction(2, k)}


def test_single_ray():
    star = StarComponent("u", {"a": Fraction(2)})
    h = weighted_star_sparsifier(star)
    assert h.vertices == {"a"} and h.m == 0
    with pytest.raises(SingleRay):
        weighted_star_sparsifier(star, strict=True)


@settings(max_examples=40)
@given(qb_graphs(max_k=5, max_centers=5))
def test_weighted_star_properties(g):
    import random

    rng = random.Random(g.n)
    for star in decompose_stars(normalize_quasi_bipartite(g))[0]:
        rays = {x: Fraction(rng.randint(1, 5), rng.randint(1, 3)) for x in star.rays}
        ws = StarComponent(star.center, rays)
        h = weighted_star_sparsifier(ws)
        if len(rays) < 2:
            continue
        assert h == weighted_star_by_contractions(ws)
        q = tree_congestion(ws.graph(), Demand.from_graph(h)).quality
        assert q == star_quality(ws) < 2


def test_qb_single_star():
    h = qb_sparsifier(generators.star(3))
    assert set(h.edges.values()) == {Fraction(2, 3)} and h.m == 3


def test_qb_disjoint_stars():
    g = build_graph(["a", "b", "c", "d"], [("u", "a"), ("u", "b"), ("w", "c"), ("w", "d")])
    assert dict(qb_sparsifier(g).edges) == {("a", "b"): 1, ("c", "d"): 1}


def test_qb_random_instance_cut_sandwich():
    g = generators.random_quasi_bipartite(5, 8, seed=4)
    h = qb_sparsifier(g)
    assert h.vertices == g.terminals
    rep = enumerate_cut_quality(g, h)
    assert len(rep.per_cut) == 15
    assert 1 <= rep.min_ratio and rep.max_ratio <= 2


@settings(max_examples=25)
@given(qb_graphs(max_k=4, max_centers=5))
def test_qb_flow_quality_at_most_two(g):
    h = qb_sparsifier(g)
    if h.m == 0:
        return
    rep = enumerate_cut_quality(g, h)
    assert rep.min_ratio >= 1 and rep.max_ratio <= 2
    lam = max_concurrent_flow(g, Demand.from_graph(h)).objective
    assert Fraction(1, 2) <= lam <= 1


def test_qb_with_direct_terminal_edges():
    g = generators.random_quasi_bipartite(4, 3, seed=1, direct_edges=2)
    h = qb_sparsifier(g)
    rep = enumerate_cut_quality(g, h)
    assert rep.min_ratio >= 1 and rep.max_ratio <= 2


def test_group_examples():
    g = build_graph(
        ["a", "b", "c"],
        [("u1", "a"), ("u1", "b"), ("u2", "a"), ("u2", "b"), ("u3", "a"), ("u3", "b"), ("u3", "c")],
    )
    assert [grp.members for grp in group_by_type(g)] == [("u1", "u2"), ("u3",)]
    distinct = build_graph(["a", "b", "c"], [("u1", "a"), ("u1", "b"), ("u2", "b"), ("u2", "c")])
    assert [grp.size for grp in group_by_type(distinct)] == [1, 1]
    full = build_graph(["a", "b"], [(u, x) for u in ("u1", "u2", "u3") for x in "ab"])
    assert len(group_by_type(full)) == 1


def test_group_rejects_weights():
    g = build_graph(["a", "b"], [("u", "a", 2), ("u", "b")])
    with pytest.raises(NotUnitCapacities):
        group_by_type(g)
    with pytest.raises(NotUnitCapacities):
        exact_qb_sparsifier(g)


def test_exact_group_of_three():
    g = build_graph(["a", "b"], [(u, x) for u in ("u1", "u2", "u3") for x in "ab"])
    h = exact_qb_sparsifier(g)
    assert dict(h.edges) == {("a", "u1"): 3, ("b", "u1"): 3}
    d = Demand({("a", "b"): 3})
    assert max_concurrent_flow(g, d).objective == 1 == max_concurrent_flow(h, d).objective


def test_exact_distinct_signatures_unchanged():
    g = build_graph(["a", "b", "c"], [("u1", "a"), ("u1", "b"), ("u2", "b"), ("u2", "c")])
    assert exact_qb_sparsifier(g) == g


def test_exact_ten_centers_five_groups():
    sigs = ["ab", "bc", "cd", "abd", "abcd"]
    edges = [(f"u{i}", x) for i in range(10) for x in sigs[i % 5]]
    g = build_graph(["a", "b", "c", "d"], edges)
    h = exact_qb_sparsifier(g)
    assert len(h.nonterminals) == 5
    for S in bipartitions(g.terminals):
        assert terminal_mincut(g, S) == terminal_mincut(h, S)


@given(qb_graphs(max_k=5, max_centers=12))
def test_exact_size_and_cuts(g):
    h = exact_qb_sparsifier(g)
    assert len(h.nonterminals) <= min(len(normalize_quasi_bipartite(g).nonterminals), 2**g.k - 1)
    for S in bipartitions(g.terminals):
        assert terminal_mincut(g, S) == terminal_mincut(h, S)
