"""Seeded instance generators and named fixtures."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .model import CapacitatedGraph, Demand


def star(k: int, center: str = "v") -> CapacitatedGraph:
    terms = [f"x{i}" for i in range(1, k + 1)]
    return CapacitatedGraph([center, *terms], terms, [(center, x) for x in terms])


def weighted_star(caps, center: str = "u") -> CapacitatedGraph:
    terms = [f"x{i}" for i in range(1, len(caps) + 1)]
    return CapacitatedGraph(
        [center, *terms], terms, [(center, x, Fraction(c)) for x, c in zip(terms, caps)]
    )


def caterpillar() -> CapacitatedGraph:
    """v0 has children x1, v1; v1 has children x2, x3."""
    return CapacitatedGraph(
        ["v0", "v1", "x1", "x2", "x3"],
        ["x1", "x2", "x3"],
        [("v0", "x1"), ("v0", "v1"), ("v1", "x2"), ("v1", "x3")],
    )


def path(length: int, internal_terminals=()) -> CapacitatedGraph:
    """Unit path x1 - v1 - ... - x2 with ``length`` edges."""
    names = ["x1"] + [f"v{i}" for i in range(1, length)] + ["x2"]
    terms = {"x1", "x2", *internal_terminals}
    return CapacitatedGraph(names, terms, list(zip(names, names[1:])))


def random_unit_tree(n: int, k: int, seed: int) -> CapacitatedGraph:
    """Uniform random labelled tree (Pruefer code) with ``k`` random terminals.

    Vertices are ``n00, n01, ...``; terminals are a uniform ``k``-subset.
    """
    if not 2 <= k <= n:
        raise ValueError("need 2 <= k <= n")
    rng = random.Random(seed)
    width = len(str(n - 1))
    names = [f"n{i:0{width}d}" for i in range(n)]
    if n == 2:
        edges = [(0, 1)]
    else:
        code = [rng.randrange(n) for _ in range(n - 2)]
        degree = [1] * n
        for v in code:
            degree[v] += 1
        edges = []
        for v in code:
            leaf = min(i for i in range(n) if degree[i] == 1)
            edges.append((leaf, v))
            degree[leaf] -= 1
            degree[v] -= 1
        a, b = [i for i in range(n) if degree[i] == 1]
        edges.append((a, b))
    terms = rng.sample(names, k)
    return CapacitatedGraph(names, terms, [(names[a], names[b]) for a, b in edges])


def random_quasi_bipartite(
    k: int, centers: int, seed: int, *, max_types: int | None = None, direct_edges: int = 0
) -> CapacitatedGraph:
    """Unit quasi-bipartite graph: each center joins a random terminal subset.

    ``max_types`` limits the number of distinct subsets drawn from, which
    produces repeated types. ``direct_edges`` adds that many distinct
    terminal-terminal edges.
    """
    rng = random.Random(seed)
    terms = [f"t{i}" for i in range(k)]
    subsets = [
        frozenset(c) for r in range(2, k + 1) for c in itertools.combinations(terms, r)
    ]
    if max_types is not None:
        subsets = rng.sample(subsets, min(max_types, len(subsets)))
    width = len(str(max(centers - 1, 0)))
    edges = []
    for i in range(centers):
        sig = rng.choice(subsets)
        edges += [(f"u{i:0{width}d}", t) for t in sorted(sig)]
    pairs = list(itertools.combinations(terms, 2))
    for a, b in rng.sample(pairs, min(direct_edges, len(pairs))):
        edges.append((a, b))
    verts = set(terms) | {f"u{i:0{width}d}" for i in range(centers)}
    return CapacitatedGraph(verts, terms, edges)


def random_demand(terminals, seed: int, max_value: int = 3) -> Demand:
    """Integer demands in ``0..max_value`` on every pair; never all zero."""
    rng = random.Random(seed)
    terms = sorted(terminals)
    pairs = list(itertools.combinations(terms, 2))
    entries = {p: rng.randint(0, max_value) for p in pairs}
    if not any(entries.values()):
        entries[rng.choice(pairs)] = 1
    return Demand(entries)
