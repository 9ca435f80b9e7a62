"""Exact-arithmetic graph model shared by every construction.

Capacities are :class:`fractions.Fraction` values throughout. A
:class:`CapacitatedGraph` is immutable once built; all operations return new
graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    InvalidInstance,
    MissingTerminal,
    NonInjectiveCorrespondence,
    NonpositiveCapacity,
    SelfLoop,
    UnknownTerminal,
    VertexSetMismatch,
    WeightSumNotOne,
)

Rational = Fraction
Edge = tuple[str, str]


def edge_key(u: str, v: str) -> Edge:
    """Canonical (sorted) key for the unordered pair ``{u, v}``."""
    return (u, v) if u <= v else (v, u)


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a capacity")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"capacity must be exact (int, Fraction or 'p/q'), got {value!r}")


class CapacitatedGraph:
    """Undirected capacitated graph with a designated terminal set.

    Parallel edges are merged by adding capacities. Vertex identifiers are
    strings; iteration order is always sorted so outputs are reproducible.
    """

    __slots__ = ("_vertices", "_terminals", "_edges", "_adj")

    def __init__(
        self,
        vertices: Iterable[str],
        terminals: Iterable[str],
        edges: Iterable[tuple] = (),
    ):
        verts = set(vertices)
        terms = frozenset(terminals)
        merged: dict[Edge, Fraction] = {}
        for item in edges:
            if len(item) == 2:
                u, v = item
                cap = Fraction(1)
            else:
                u, v, cap = item
                cap = as_fraction(cap)
            if u == v:
                raise SelfLoop(u)
            if cap <= 0:
                raise NonpositiveCapacity((u, v), cap)
            verts.add(u)
            verts.add(v)
            key = edge_key(u, v)
            merged[key] = merged.get(key, Fraction(0)) + cap
        missing = sorted(terms - verts)
        if missing:
            raise MissingTerminal(missing[0])
        self._vertices = frozenset(verts)
        self._terminals = terms
        self._edges = dict(sorted(merged.items()))
        adj: dict[str, dict[str, Fraction]] = {v: {} for v in sorted(verts)}
        for (u, v), cap in self._edges.items():
            adj[u][v] = cap
            adj[v][u] = cap
        self._adj = adj

    # -- accessors ---------------------------------------------------------

    @property
    def vertices(self) -> frozenset[str]:
        return self._vertices

    @property
    def terminals(self) -> frozenset[str]:
        return self._terminals

    @property
    def nonterminals(self) -> frozenset[str]:
        return self._vertices - self._terminals

    def sorted_vertices(self) -> list[str]:
        return sorted(self._vertices)

    def sorted_terminals(self) -> list[str]:
        return sorted(self._terminals)

    @property
    def edges(self) -> Mapping[Edge, Fraction]:
        """Read-only view ``{(u, v): capacity}`` with ``u < v``."""
        return _FrozenView(self._edges)

    def capacity(self, u: str, v: str) -> Fraction:
        """Capacity between ``u`` and ``v``; zero when no edge exists."""
        return self._adj.get(u, {}).get(v, Fraction(0))

    def neighbors(self, v: str) -> Mapping[str, Fraction]:
        return _FrozenView(self._adj[v])

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, {})

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def k(self) -> int:
        return len(self._terminals)

    def is_unit(self) -> bool:
        return all(c == 1 for c in self._edges.values())

    def is_connected(self) -> bool:
        if not self._vertices:
            return True
        start = min(self._vertices)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._vertices)

    def is_tree(self) -> bool:
        return self.m == self.n - 1 and self.is_connected()

    def cut_value(self, side: Iterable[str]) -> Fraction:
        """Total capacity of edges with exactly one endpoint in ``side``."""
        inside = set(side)
        return sum(
            (c for (u, v), c in self._edges.items() if (u in inside) != (v in inside)),
            Fraction(0),
        )

    # -- derived graphs ----------------------------------------------------

    def with_edges(self, edges: Iterable[tuple]) -> "CapacitatedGraph":
        return CapacitatedGraph(self._vertices, self._terminals, edges)

    def relabel(self, mapping: Mapping[str, str]) -> "CapacitatedGraph":
        """Rename vertices; names absent from ``mapping`` are kept."""
        name = lambda v: mapping.get(v, v)  # noqa: E731
        return CapacitatedGraph(
            (name(v) for v in self._vertices),
            (name(t) for t in self._terminals),
            ((name(u), name(v), c) for (u, v), c in self._edges.items()),
        )

    def edge_list(self) -> list[tuple[str, str, Fraction]]:
        return [(u, v, c) for (u, v), c in self._edges.items()]

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CapacitatedGraph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and self._terminals == other._terminals
            and self._edges == other._edges
        )

    def __hash__(self) -> int:
        return hash((self._vertices, self._terminals, tuple(self._edges.items())))

    def __repr__(self) -> str:
        return (
            f"CapacitatedGraph(n={self.n}, m={self.m}, "
            f"terminals={self.sorted_terminals()})"
        )


class _FrozenView(Mapping):
    __slots__ = ("_d",)

    def __init__(self, d: dict):
        self._d = d

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self) -> Iterator:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __repr__(self) -> str:
        return repr(self._d)


@dataclass(frozen=True)
class Demand:
    """Symmetric demand on unordered terminal pairs."""

    entries: Mapping[Edge, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        norm: dict[Edge, Fraction] = {}
        for (a, b), val in self.entries.items():
            if a == b:
                raise ValueError(f"demand pair ({a}, {b}) is not a pair of distinct terminals")
            val = as_fraction(val)
            if val < 0:
                raise ValueError(f"negative demand on ({a}, {b})")
            key = edge_key(a, b)
            norm[key] = norm.get(key, Fraction(0)) + val
        object.__setattr__(self, "entries", dict(sorted(norm.items())))

    def __getitem__(self, pair: Edge) -> Fraction:
        return self.entries.get(edge_key(*pair), Fraction(0))

    def positive(self) -> dict[Edge, Fraction]:
        return {p: d for p, d in self.entries.items() if d > 0}

    def terminals(self) -> set[str]:
        return {x for pair in self.entries for x in pair}

    @classmethod
    def from_graph(cls, h: CapacitatedGraph) -> "Demand":
        """The demand ``d_H(x, x') = c_H(x, x')`` induced by a terminal graph."""
        return cls({(u, v): c for (u, v), c in h.edges.items()})

    def __hash__(self) -> int:
        return hash(tuple(self.entries.items()))


# -- core operations ---------------------------------------------------------


def validate_instance(
    graph: CapacitatedGraph, *, require_connected: bool = False, min_terminals: int = 2
) -> CapacitatedGraph:
    """Check instance invariants and return the (already normalized) graph.

    Construction already rejects self-loops, nonpositive capacities and
    missing terminals; this adds the entry-point checks.
    """
    if graph.k < min_terminals:
        raise InvalidInstance(f"need at least {min_terminals} terminals, got {graph.k}")
    if require_connected and not graph.is_connected():
        raise InvalidInstance("graph is not connected")
    return graph


def build_graph(
    terminals: Iterable[str],
    edges: Iterable[tuple],
    vertices: Iterable[str] = (),
) -> CapacitatedGraph:
    """Convenience constructor: vertices are inferred from edges."""
    return CapacitatedGraph(set(vertices) | set(terminals), terminals, edges)


def convex_combine(
    sparsifiers: Sequence[CapacitatedGraph], weights: Sequence
) -> CapacitatedGraph:
    """Weighted sum ``sum_i w_i * H_i`` of graphs on a common vertex set."""
    if not sparsifiers or len(sparsifiers) != len(weights):
        raise ValueError("need one weight per sparsifier")
    ws = [as_fraction(w) for w in weights]
    if any(w < 0 for w in ws):
        raise ValueError("weights must be nonnegative")
    if sum(ws) != 1:
        raise WeightSumNotOne(sum(ws))
    base = sparsifiers[0]
    for h in sparsifiers[1:]:
        if h.vertices != base.vertices or h.terminals != base.terminals:
            raise VertexSetMismatch(sorted(h.vertices ^ base.vertices))
    total: dict[Edge, Fraction] = {}
    for h, w in zip(sparsifiers, ws):
        if w == 0:
            continue
        for key, c in h.edges.items():
            total[key] = total.get(key, Fraction(0)) + w * c
    return CapacitatedGraph(
        base.vertices, base.terminals, ((u, v, c) for (u, v), c in total.items())
    )


def phi_merge(
    g1: CapacitatedGraph, g2: CapacitatedGraph, corr: Mapping[str, str]
) -> CapacitatedGraph:
    """Glue ``g2`` onto ``g1`` by identifying ``s`` (in g1) with ``corr[s]`` (in g2).

    The identified vertex keeps its ``g1`` name. Any other shared name between
    the two graphs is an error: pieces must live in disjoint identifier spaces.
    """
    targets = list(corr.values())
    if len(set(targets)) != len(targets):
        raise NonInjectiveCorrespondence(sorted(targets))
    for s, t in corr.items():
        if s not in g1.terminals:
            raise UnknownTerminal(s)
        if t not in g2.terminals:
            raise UnknownTerminal(t)
    back = {t: s for s, t in corr.items()}
    clash = (g2.vertices - set(back)) & g1.vertices
    if clash:
        raise ValueError(f"vertex identifiers shared outside the correspondence: {sorted(clash)}")
    g2r = g2.relabel(back)
    return CapacitatedGraph(
        g1.vertices | g2r.vertices,
        g1.terminals | g2r.terminals,
        list(g1.edge_list()) + list(g2r.edge_list()),
    )


@dataclass(frozen=True)
class MergePlan:
    """How split pieces recombine.

    Each step ``(into, piece, corr)`` glues piece ``piece`` onto whatever
    graph currently holds piece ``into``; ``corr`` maps terminal names there
    to terminal names in ``piece``. Terminals in ``isolated`` belong to no
    piece and are added as bare vertices at the end.
    """

    steps: tuple[tuple[int, int, Mapping[str, str]], ...] = ()
    isolated: tuple[str, ...] = ()

    def replay(self, pieces: Sequence[CapacitatedGraph]) -> CapacitatedGraph:
        if not pieces:
            return CapacitatedGraph(self.isolated, self.isolated)
        holder = list(range(len(pieces)))
        graphs: dict[int, CapacitatedGraph] = dict(enumerate(pieces))

        def find(i: int) -> int:
            while holder[i] != i:
                holder[i] = holder[holder[i]]
                i = holder[i]
            return i

        for into, piece, corr in self.steps:
            a, b = find(into), find(piece)
            graphs[a] = phi_merge(graphs[a], graphs.pop(b), corr)
            holder[b] = a
        roots = sorted({find(i) for i in range(len(pieces))})
        out = graphs[roots[0]]
        for r in roots[1:]:
            out = phi_merge(out, graphs[r], {})
        if self.isolated:
            out = CapacitatedGraph(
                out.vertices | set(self.isolated),
                out.terminals | set(self.isolated),
                out.edge_list(),
            )
        return out


def fresh_name(base: str, taken: set[str], tag: str) -> str:
    """A name derived from ``base`` that is not in ``taken`` (which is updated)."""
    name = f"{base}#{tag}"
    i = 1
    while name in taken:
        name = f"{base}#{tag}.{i}"
        i += 1
    taken.add(name)
    return name
