"""Sparsifiers for quasi-bipartite graphs (non-terminals independent).

Two constructions:

* :func:`qb_sparsifier` splits the graph into stars around non-terminals,
  replaces each star by its weighted expected contraction, and glues the
  results at shared terminals. Output lives on the terminals only and has
  flow quality at most 2.
* :func:`exact_qb_sparsifier` (unit capacities) merges non-terminals with the
  same terminal neighbourhood into one center whose edges carry the group
  size. Every multicommodity flow among terminals is preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInstance, NonterminalAdjacency, NotUnitCapacities, SingleRay
from .model import CapacitatedGraph, MergePlan, convex_combine, fresh_name


@dataclass(frozen=True)
class StarComponent:
    center: str
    rays: dict  # terminal -> capacity

    @property
    def total(self) -> Fraction:
        return sum(self.rays.values(), Fraction(0))

    def terminals(self) -> list[str]:
        return sorted(self.rays)

    def graph(self) -> CapacitatedGraph:
        return CapacitatedGraph(
            [self.center, *self.rays],
            self.rays,
            [(self.center, x, c) for x, c in sorted(self.rays.items())],
        )


@dataclass(frozen=True)
class TypeGroup:
    signature: frozenset
    members: tuple

    @property
    def size(self) -> int:
        return len(self.members)


def _check_independent(graph: CapacitatedGraph) -> None:
    for u, v in graph.edges:
        if u not in graph.terminals and v not in graph.terminals:
            raise NonterminalAdjacency(u, v)


def is_quasi_bipartite(graph: CapacitatedGraph) -> bool:
    return all(u in graph.terminals or v in graph.terminals for u, v in graph.edges)


def normalize_quasi_bipartite(graph: CapacitatedGraph) -> CapacitatedGraph:
    """Subdivide terminal-terminal edges so the graph becomes bipartite.

    Edge ``(a, b)`` of capacity ``c`` becomes ``a - w - b`` with both halves of
    capacity ``c``; ``w`` is a fresh non-terminal named ``a~b``.
    """
    _check_independent(graph)
    terms = graph.terminals
    direct = [(u, v, c) for (u, v), c in graph.edges.items() if u in terms and v in terms]
    if not direct:
        return graph
    taken = set(graph.vertices)
    edges = [(u, v, c) for (u, v), c in graph.edges.items() if not (u in terms and v in terms)]
    verts = set(graph.vertices)
    for u, v, c in direct:
        w = f"{u}~{v}"
        if w in taken:
            w = fresh_name(w, taken, "s")
        taken.add(w)
        verts.add(w)
        edges += [(u, w, c), (w, v, c)]
    return CapacitatedGraph(verts, terms, edges)


def decompose_stars(graph: CapacitatedGraph) -> tuple[list[StarComponent], MergePlan]:
    """One star per non-terminal, plus the plan that glues them back.

    A terminal shared by several stars keeps its name in the first star and
    appears under a copy name in the others.
    """
    _check_independent(graph)
    terms = graph.terminals
    if any(u in terms and v in terms for u, v in graph.edges):
        raise InvalidInstance("terminal-terminal edges present; normalize the graph first")
    stars: list[StarComponent] = []
    steps = []
    taken = set(graph.vertices)
    owner: set[str] = set()
    for u in sorted(graph.nonterminals):
        nbrs = graph.neighbors(u)
        if not nbrs:
            continue
        idx = len(stars)
        rays = {}
        corr = {}
        for x in sorted(nbrs):
            if x in owner:
                copy = fresh_name(x, taken, str(idx))
                corr[x] = copy
                rays[copy] = nbrs[x]
            else:
                owner.add(x)
                rays[x] = nbrs[x]
        stars.append(StarComponent(u, rays))
        if idx > 0:
            steps.append((0, idx, corr))
    isolated = tuple(sorted(terms - owner))
    return stars, MergePlan(tuple(steps), isolated)


def star_contraction(star: StarComponent, x: str) -> CapacitatedGraph:
    """Terminal graph obtained by contracting the ray to ``x``."""
    terms = star.terminals()
    return CapacitatedGraph(
        terms, terms, [(x, y, c) for y, c in sorted(star.rays.items()) if y != x]
    )


def weighted_star_sparsifier(star: StarComponent, *, strict: bool = False) -> CapacitatedGraph:
    """Complete graph with ``c(x, y) = 2 c_x c_y / C`` on the star's terminals.

    A one-ray star has no terminal pair; the empty graph on its terminal is
    returned unless ``strict`` is set, in which case :class:`SingleRay` is
    raised.
    """
    terms = star.terminals()
    if len(terms) < 2:
        if strict:
            raise SingleRay(f"star at {star.center!r} has a single ray")
        return CapacitatedGraph(terms, terms)
    C = star.total
    edges = []
    for i, x in enumerate(terms):
        for y in terms[i + 1 :]:
            edges.append((x, y, 2 * star.rays[x] * star.rays[y] / C))
    return CapacitatedGraph(terms, terms, edges)


def weighted_star_by_contractions(star: StarComponent) -> CapacitatedGraph:
    """The same sparsifier as a convex combination of ray contractions."""
    terms = star.terminals()
    C = star.total
    return convex_combine(
        [star_contraction(star, x) for x in terms], [star.rays[x] / C for x in terms]
    )


def star_quality(star: StarComponent) -> Fraction:
    """Congestion of routing the sparsifier's demand in the star: ``max 2(1 - c_x/C)``."""
    C = star.total
    if len(star.rays) < 2:
        return Fraction(1)
    return max(2 * (1 - c / C) for c in star.rays.values())


def qb_sparsifier(graph: CapacitatedGraph) -> CapacitatedGraph:
    """Quality-2 flow sparsifier on the terminals of a quasi-bipartite graph."""
    stars, plan = decompose_stars(normalize_quasi_bipartite(graph))
    return plan.replay([weighted_star_sparsifier(s) for s in stars])


def group_by_type(graph: CapacitatedGraph) -> list[TypeGroup]:
    """Partition non-terminals by their exact set of terminal neighbours.

    Groups come out ordered by sorted signature; members are sorted.
    """
    _check_independent(graph)
    for (u, v), c in graph.edges.items():
        if c != 1:
            raise NotUnitCapacities((u, v))
    groups: dict[frozenset, list[str]] = {}
    for u in sorted(graph.nonterminals):
        groups.setdefault(frozenset(graph.neighbors(u)), []).append(u)
    return [
        TypeGroup(sig, tuple(members))
        for sig, members in sorted(groups.items(), key=lambda kv: sorted(kv[0]))
    ]


def exact_qb_sparsifier(graph: CapacitatedGraph) -> CapacitatedGraph:
    """Exact flow sparsifier of a unit quasi-bipartite graph.

    Each type group collapses to its first member, whose edges to the group's
    terminals get capacity equal to the group size. Isolated non-terminals
    are dropped.
    """
    for (u, v), c in graph.edges.items():
        if c != 1:
            raise NotUnitCapacities((u, v))
    norm = normalize_quasi_bipartite(graph)
    verts = set(norm.terminals)
    edges = []
    for group in group_by_type(norm):
        if not group.signature:
            continue
        rep = group.members[0]
        verts.add(rep)
        edges += [(rep, x, group.size) for x in sorted(group.signature)]
    return CapacitatedGraph(verts, norm.terminals, edges)
