import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import qb_graphs, unit_trees
from sparsetree import generators
from sparsetree.errors import NotATree, TooManyTerminals, UnknownTerminal, UnsupportedTopology
from sparsetree.lp import UNBOUNDED
from sparsetree.model import CapacitatedGraph, Demand, build_graph
from sparsetree.quasibip import exact_qb_sparsifier
from sparsetree.verify import (
    bipartitions,
    enumerate_cut_quality,
    flow_quality_tree,
    max_concurrent_flow,
    max_concurrent_flow_float,
    max_terminals,
    optimal_star_sparsifier_lp,
    star_cut_lp,
    star_lower_bound,
    tree_congestion,
    uniform_complete,
    verify_exact,
)
from sparsetree.zeroext import expected_sparsifier

half = Fraction(1, 2)


def uniform_demand(terms, value):
    return Demand({p: value for p in itertools.combinations(sorted(terms), 2)})


def test_bipartition_count():
    assert len(bipartitions("abcde")) == 15
    assert all("e" not in S for S in bipartitions("abcde"))


def test_caterpillar_cut_report():
    g = generators.caterpillar()
    rep = enumerate_cut_quality(g, expected_sparsifier(g))
    assert (rep.min_ratio, rep.witness_min) == (1, {"x1"})
    assert (rep.max_ratio, rep.witness_max) == (Fraction(3, 2), {"x2"})
    assert rep.dominates


def test_self_comparison_is_exact():
    g = generators.random_unit_tree(15, 5, seed=1)
    rep = enumerate_cut_quality(g, g)
    assert rep.min_ratio == rep.max_ratio == 1


def test_exact_pair_report():
    g = generators.random_quasi_bipartite(4, 9, seed=5, max_types=3)
    rep = enumerate_cut_quality(g, exact_qb_sparsifier(g))
    assert rep.min_ratio == rep.max_ratio == 1


def test_enumeration_cap(monkeypatch):
    g = generators.star(6)
    with pytest.raises(TooManyTerminals):
        enumerate_cut_quality(g, g, max_k=5)
    monkeypatch.setenv("SPARSETREE_MAX_K", "4")
    assert max_terminals() == 4
    with pytest.raises(TooManyTerminals):
        enumerate_cut_quality(g, g)


def test_star_uniform_half_demand():
    cert = tree_congestion(generators.star(4), uniform_demand([f"x{i}" for i in range(1, 5)], half))
    assert set(cert.per_edge.values()) == {Fraction(3, 2)}


def test_unit_path_single_pair():
    assert tree_congestion(generators.path(4), Demand({("x1", "x2"): 1})).quality == 1


@pytest.mark.parametrize("k", [3, 5])
def test_star_contraction_demand(k):
    terms = [f"x{i}" for i in range(2, k + 1)]
    d = Demand({("x1", x): 1 for x in terms})
    cert = tree_congestion(generators.star(k), d)
    assert cert.quality == k - 1 and cert.bottleneck == ("v", "x1")


def test_tree_congestion_errors():
    with pytest.raises(NotATree):
        tree_congestion(build_graph(["a", "b"], [("a", "b"), ("b", "c"), ("c", "a")]), Demand())
    with pytest.raises(UnknownTerminal):
        tree_congestion(generators.star(3), Demand({("x1", "zz"): 1}))


def test_flow_quality_examples():
    g = generators.caterpillar()
    assert flow_quality_tree(g, expected_sparsifier(g)).quality == Fraction(3, 2)
    for k in (3, 6):
        h = uniform_complete([f"x{i}" for i in range(1, k + 1)], Fraction(2, k))
        assert flow_quality_tree(generators.star(k), h).quality == 2 * (1 - Fraction(1, k))
    edge = build_graph(["x1", "x2"], [("x1", "x2")])
    assert flow_quality_tree(edge, edge).quality == 1


@settings(max_examples=100)
@given(unit_trees(max_n=50, max_k=8))
def test_tree_pipeline_congestion_and_domination(t):
    h = expected_sparsifier(t)
    cert = flow_quality_tree(t, h)
    assert all(c <= 2 for c in cert.per_edge.values())
    assert 1 <= cert.quality <= 2
    assert enumerate_cut_quality(t, h).min_ratio >= 1


def test_concurrent_flow_star():
    g = generators.star(3)
    sol = max_concurrent_flow(g, uniform_demand(g.terminals, 1))
    assert sol.objective == half
    assert abs(max_concurrent_flow_float(g, uniform_demand(g.terminals, 1)) - 0.5) < 1e-9


def test_zero_demand_unbounded():
    assert max_concurrent_flow(generators.star(3), Demand()).status == UNBOUNDED


def test_flow_through_a_terminal():
    # a-u-m-w-b: the only route for (a, b) passes through terminal m
    g = build_graph(["a", "m", "b"], [("a", "u"), ("u", "m"), ("m", "w"), ("w", "b")])
    d = Demand({("a", "b"): 1})
    assert max_concurrent_flow(g, d).objective == 1
    # restricted to two-hop paths the pair has no route at all
    assert max_concurrent_flow(g, d, two_hop_only=True).objective == 0


def test_two_hop_mode_rejects_adjacent_nonterminals():
    with pytest.raises(UnsupportedTopology):
        max_concurrent_flow(generators.path(3), Demand({("x1", "x2"): 1}), two_hop_only=True)


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_lambda_times_congestion_is_one_on_stars(k):
    g = generators.star(k)
    for seed in range(3):
        d = generators.random_demand(g.terminals, seed)
        lam = max_concurrent_flow(g, d).objective
        assert lam * tree_congestion(g, d).quality == 1


@settings(max_examples=25)
@given(qb_graphs(max_k=4, max_centers=5))
def test_rational_and_float_lp_agree(g):
    d = generators.random_demand(g.terminals, g.m)
    exact = max_concurrent_flow(g, d).objective
    assert abs(float(exact) - max_concurrent_flow_float(g, d)) < 1e-6


def test_rational_path_lp_on_general_graph():
    g = generators.random_unit_tree(12, 4, seed=8)
    g = g.with_edges(list(g.edge_list()) + [("n00", "n11"), ("n03", "n07")])
    d = generators.random_demand(g.terminals, 1)
    assert abs(float(max_concurrent_flow(g, d).objective) - max_concurrent_flow_float(g, d)) < 1e-6


def test_verify_exact_examples():
    g = build_graph(["a", "b", "c"], [(u, x) for u, sig in
                                      [("u1", "ab"), ("u2", "ab"), ("u3", "abc"), ("u4", "bc")]
                                      for x in sig])
    h = exact_qb_sparsifier(g)
    demands = [generators.random_demand(g.terminals, s) for s in range(5)]
    assert verify_exact(g, h, demands).ok
    assert verify_exact(g, g, demands).ok
    assert verify_exact(g, h, demands, tol=1e-6).ok

    # a's only edges are to the u1 group (capacity 2) and u3; shaving 1/10
    # off lowers both mincut({a}) and the a-b concurrent flow
    assert h.capacity("a", "u1") == 2
    bumped = h.with_edges([(p, q, c - Fraction(1, 10) if (p, q) == ("a", "u1") else c)
                           for p, q, c in h.edge_list()])
    rep = verify_exact(g, bumped, demands)
    assert not rep.ok and rep.witness_cut == {"a"}
    flow_only = verify_exact(g, bumped, [Demand({("a", "b"): 1})])
    assert not flow_only.ok and flow_only.witness_demand == Demand({("a", "b"): 1})
    assert flow_only.gaps == [(3, Fraction(29, 10))]


@pytest.mark.parametrize("k,value", [(2, 1), (4, Fraction(3, 2)), (8, Fraction(7, 4))])
def test_star_lower_bound(k, value):
    lb = star_lower_bound(k)
    assert lb.value == value
    assert set(lb.sparsifier.edges.values()) == {Fraction(2, k)}
    assert lb.report.min_ratio >= 1 and lb.report.max_ratio == value
    assert len(lb.report.witness_max) in (1, k - 1)


@pytest.mark.parametrize("k", [2, 4, 6])
def test_star_lp_even_k(k):
    assert optimal_star_sparsifier_lp(k) == 2 * (1 - Fraction(1, k))


@pytest.mark.parametrize("k", [3, 5])
def test_star_lp_odd_k(k):
    # the balanced cut is uneven for odd k, so the optimum is 2(k-1)/(k+1)
    opt, weights = star_cut_lp(k)
    assert opt == Fraction(2 * (k - 1), k + 1)
    star = generators.star(k)
    h = CapacitatedGraph(star.terminals, star.terminals,
                         [(a, b, w) for (a, b), w in weights.items() if w])
    rep = enumerate_cut_quality(star, h)
    assert rep.min_ratio >= 1 and rep.max_ratio == opt


def test_k3_triangle_is_exact():
    h = uniform_complete(["x1", "x2", "x3"], half)
    rep = enumerate_cut_quality(generators.star(3), h)
    assert rep.min_ratio == rep.max_ratio == 1


def test_star_lp_cap():
    with pytest.raises(TooManyTerminals):
        optimal_star_sparsifier_lp(11)
