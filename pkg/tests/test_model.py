from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsetree import generators
from sparsetree.errors import (
    InvalidInstance,
    MissingTerminal,
    NonInjectiveCorrespondence,
    NonpositiveCapacity,
    SelfLoop,
    UnknownTerminal,
    VertexSetMismatch,
    WeightSumNotOne,
)
from sparsetree.model import (
    CapacitatedGraph,
    Demand,
    MergePlan,
    as_fraction,
    build_graph,
    convex_combine,
    phi_merge,
    validate_instance,
)
from sparsetree.verify import bipartitions

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
nonzero = rationals.filter(lambda q: q != 0)


@given(rationals, rationals)
def test_fraction_add_roundtrip(a, b):
    assert (a + b) - b == a


@given(rationals, nonzero)
def test_fraction_mul_roundtrip(a, b):
    assert (a * b) / b == a


def test_as_fraction_rejects_floats():
    assert as_fraction("3/6") == Fraction(1, 2)
    assert as_fraction(4) == 4
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        as_fraction(True)


def test_validate_unit_path():
    g = generators.path(2)
    assert validate_instance(g, require_connected=True) is g
    assert g.is_unit() and g.is_tree()


def test_zero_capacity_rejected():
    with pytest.raises(NonpositiveCapacity):
        build_graph(["a", "b"], [("a", "b", 0)])


def test_self_loop_and_missing_terminal():
    with pytest.raises(SelfLoop):
        build_graph(["a", "b"], [("a", "a", 1)])
    with pytest.raises(MissingTerminal):
        CapacitatedGraph(["a"], ["a", "z"])


def test_too_few_terminals_or_disconnected():
    with pytest.raises(InvalidInstance):
        validate_instance(build_graph(["a"], [("a", "b")]))
    g = CapacitatedGraph(["a", "b", "c"], ["a", "b"], [("a", "c")])
    with pytest.raises(InvalidInstance):
        validate_instance(g, require_connected=True)


def test_parallel_edges_merge():
    g = build_graph(["a", "b"], [("a", "b", 1), ("b", "a", 1)])
    assert g.m == 1
    assert g.capacity("a", "b") == 2


def test_graph_is_immutable():
    g = generators.star(3)
    with pytest.raises(TypeError):
        g.edges[("v", "x1")] = 5


def test_demand_normalizes_pairs():
    d = Demand({("b", "a"): 1, ("a", "b"): "1/2", ("a", "c"): 0})
    assert d[("a", "b")] == Fraction(3, 2)
    assert d.positive() == {("a", "b"): Fraction(3, 2)}
    with pytest.raises(ValueError):
        Demand({("a", "a"): 1})


def _center_star(center):
    others = [x for x in ("x1", "x2", "x3") if x != center]
    return build_graph(["x1", "x2", "x3"], [(center, y) for y in others])


def test_convex_two_stars():
    h = convex_combine([_center_star("x1"), _center_star("x2")], [Fraction(1, 2)] * 2)
    assert dict(h.edges) == {
        ("x1", "x2"): 1,
        ("x1", "x3"): Fraction(1, 2),
        ("x2", "x3"): Fraction(1, 2),
    }


def test_convex_identity():
    g = _center_star("x1")
    assert convex_combine([g], [1]) == g


def test_convex_three_contractions_of_star():
    h = convex_combine([_center_star(x) for x in ("x1", "x2", "x3")], [Fraction(1, 3)] * 3)
    assert set(h.edges.values()) == {Fraction(2, 3)} and h.m == 3


def test_convex_errors():
    g = _center_star("x1")
    with pytest.raises(WeightSumNotOne):
        convex_combine([g, g], [Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(VertexSetMismatch):
        convex_combine([g, generators.star(3)], [Fraction(1, 2)] * 2)


@st.composite
def terminal_graph_family(draw):
    terms = ["a", "b", "c", "d"][: draw(st.integers(2, 4))]
    pairs = [(x, y) for i, x in enumerate(terms) for y in terms[i + 1 :]]
    count = draw(st.integers(1, 4))
    graphs = []
    for _ in range(count):
        caps = draw(st.lists(st.integers(0, 4), min_size=len(pairs), max_size=len(pairs)))
        graphs.append(CapacitatedGraph(terms, terms, [(x, y, c) for (x, y), c in zip(pairs, caps) if c]))
    raw = draw(st.lists(st.integers(1, 5), min_size=count, max_size=count))
    weights = [Fraction(r, sum(raw)) for r in raw]
    return terms, graphs, weights


@given(terminal_graph_family())
def test_convex_combination_is_linear_on_cuts(family):
    terms, graphs, weights = family
    h = convex_combine(graphs, weights)
    for S in bipartitions(terms):
        assert h.cut_value(S) == sum(w * g.cut_value(S) for g, w in zip(graphs, weights))


def test_phi_merge_path():
    g1 = build_graph(["x1", "t"], [("x1", "t")])
    g2 = build_graph(["s", "x2"], [("s", "x2")])
    g = phi_merge(g1, g2, {"t": "s"})
    assert g == build_graph(["x1", "t", "x2"], [("x1", "t"), ("t", "x2")])


def test_phi_merge_shared_pair_adds():
    tri = lambda a, b, c: build_graph([a, b, c], [(a, b), (a, c), (b, c)])  # noqa: E731
    g = phi_merge(tri("x1", "x2", "x3"), tri("y1", "y2", "x4"), {"x1": "y1", "x2": "y2"})
    assert g.k == 4
    assert g.capacity("x1", "x2") == 2
    assert g.capacity("x1", "x4") == 1


def test_phi_merge_errors():
    g1 = build_graph(["a", "b"], [("a", "b")])
    g2 = build_graph(["c", "d"], [("c", "d")])
    with pytest.raises(NonInjectiveCorrespondence):
        phi_merge(g1, g2, {"a": "c", "b": "c"})
    with pytest.raises(UnknownTerminal):
        phi_merge(g1, g2, {"z": "c"})
    with pytest.raises(UnknownTerminal):
        phi_merge(g1, g2, {"a": "z"})


@given(st.integers(0, 2**32))
def test_phi_merge_associative_on_chain(seed):
    import random

    rng = random.Random(seed)

    def piece(tag, left, right):
        inner = f"{tag}v"
        cap = rng.randint(1, 4)
        return build_graph([left, right], [(left, inner, cap), (inner, right, rng.randint(1, 4))])

    a = piece("A", "p", "q")
    b = piece("B", "r", "s")
    c = piece("C", "u", "w")
    left = phi_merge(phi_merge(a, b, {"q": "r"}), c, {"s": "u"})
    right = phi_merge(a, phi_merge(b, c, {"s": "u"}), {"q": "r"})
    assert left == right


def test_merge_plan_replay_and_isolated():
    g1 = build_graph(["x1", "t"], [("x1", "t")])
    g2 = build_graph(["t#1", "x2"], [("t#1", "x2")])
    plan = MergePlan(((0, 1, {"t": "t#1"}),), ("z",))
    g = plan.replay([g1, g2])
    assert g.terminals == {"x1", "t", "x2", "z"}
    assert g.degree("t") == 2 and g.degree("z") == 0
