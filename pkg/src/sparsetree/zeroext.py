"""Random connected 0-extensions of leaf-terminal trees.

A 0-extension maps every vertex of the tree to a terminal (terminals to
themselves). Processing non-terminals bottom-up and sending each to the image
of a uniformly random child yields connected fibers. The expected induced
terminal graph has a closed form, computed here with a prefix-product index
over root paths, and is a flow sparsifier of quality at most 2.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import (
    NotALeafTerminal,
    SameTerminal,
    TooManyExtensions,
    UnknownEdge,
    UnmappedVertex,
)
from .model import CapacitatedGraph, edge_key
from .treeprep import RootedTree, preprocess, root_tree

ONE = Fraction(1)


@dataclass(frozen=True)
class ZeroExtension:
    """A retraction onto the terminals and the terminal graph it induces."""

    retraction: dict
    induced: CapacitatedGraph

    def fiber(self, x: str) -> set[str]:
        return {v for v, t in self.retraction.items() if t == x}


@dataclass(frozen=True)
class ExpandedLevelEvent:
    terminal: str
    level: int
    probability: Fraction


def _processing_order(rt: RootedTree) -> list[str]:
    """Non-terminals farthest from the root first; ties by identifier."""
    return sorted(rt.graph.nonterminals, key=lambda v: (-rt.level[v], v))


def induced_graph(rt: RootedTree, retraction: dict) -> CapacitatedGraph:
    """Terminal graph with one contribution per tree edge crossing fibers."""
    edges = []
    for (u, v), c in rt.graph.edges.items():
        a, b = retraction[u], retraction[v]
        if a != b:
            edges.append((a, b, c))
    return CapacitatedGraph(rt.terminals, rt.terminals, edges)


def _extension(rt: RootedTree, retraction: dict) -> ZeroExtension:
    return ZeroExtension(retraction, induced_graph(rt, retraction))


def sample_zero_extension(rt: RootedTree, seed: int) -> ZeroExtension:
    """Draw one connected 0-extension with a generator seeded by ``seed``."""
    rng = random.Random(seed)
    f = {x: x for x in rt.terminals}
    for v in _processing_order(rt):
        kids = rt.children[v]
        if not kids:
            raise UnmappedVertex(f"non-terminal {v!r} has no children; tree is not leaf-terminal")
        f[v] = f[kids[rng.randrange(len(kids))]]
    return _extension(rt, f)


def extension_count(rt: RootedTree) -> int:
    return math.prod(rt.child_count(v) for v in rt.graph.nonterminals)


def enumerate_zero_extensions(
    rt: RootedTree, limit: int = 10_000
) -> list[tuple[ZeroExtension, Fraction]]:
    """Every outcome of the random procedure with its probability."""
    order = _processing_order(rt)
    total = extension_count(rt)
    if total > limit:
        raise TooManyExtensions(f"{total} extensions exceed limit {limit}")
    prob = Fraction(1, total)
    out = []
    for choice in itertools.product(*(rt.children[v] for v in order)):
        f = {x: x for x in rt.terminals}
        for v, c in zip(order, choice):
            f[v] = f[c]
        out.append((_extension(rt, f), prob))
    return out


def fibers_connected(rt: RootedTree, ext: ZeroExtension) -> bool:
    """Each fiber induces a connected subtree (checked by traversal)."""
    g = rt.graph
    for x in rt.terminals:
        fib = ext.fiber(x)
        if x not in fib:
            return False
        seen = {x}
        stack = [x]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w in fib and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != fib:
            return False
    return True


def _on_path(rt: RootedTree, child: str, a: str, b: str) -> bool:
    """Whether tree edge (child, parent(child)) lies on the a-b path."""
    return (child in rt.root_path(a)) != (child in rt.root_path(b))


def _as_child(rt: RootedTree, edge) -> str:
    u, v = edge
    if rt.parent.get(u) == v:
        return u
    if rt.parent.get(v) == u:
        return v
    raise UnknownEdge(f"{edge} is not a tree edge")


def extension_load(rt: RootedTree, ext: ZeroExtension, edge) -> Fraction:
    """Load on a tree edge when each tree edge is mapped to its image's path."""
    child = _as_child(rt, edge)
    load = Fraction(0)
    for (u, v), c in rt.graph.edges.items():
        a, b = ext.retraction[u], ext.retraction[v]
        if a != b and _on_path(rt, child, a, b):
            load += c
    return load


def _leaf_path(rt: RootedTree, x: str) -> list[str]:
    if x not in rt.terminals or rt.children[x]:
        raise NotALeafTerminal(f"{x!r} is not a leaf terminal")
    return rt.root_path(x)


def expanded_level(rt: RootedTree, ext: ZeroExtension, x: str) -> int:
    """Smallest level down to which the whole root path of ``x`` maps to ``x``."""
    path = _leaf_path(rt, x)
    lvl = rt.level[x]
    for v in path[1:]:
        if ext.retraction[v] != x:
            break
        lvl = rt.level[v]
    return lvl


def load_bound(rt: RootedTree, x: str, level: int) -> int:
    """``1 + sum (c_j - 1)`` over ancestors of ``x`` at levels ``level..m_x-1``."""
    path = _leaf_path(rt, x)
    return 1 + sum(rt.child_count(v) - 1 for v in path[1:] if rt.level[v] >= level)


def branching_product(rt: RootedTree, x: str) -> int:
    """Product of child counts over all strict ancestors of ``x``."""
    return math.prod(rt.child_count(v) for v in _leaf_path(rt, x)[1:])


def expansion_probabilities(rt: RootedTree, x: str) -> list[ExpandedLevelEvent]:
    """Probability that ``x`` is expanded exactly down to each level.

    Returned for levels ``m_x, m_x - 1, ..., 0``; they sum to one.
    """
    path = _leaf_path(rt, x)
    m = rt.level[x]
    counts = {rt.level[v]: rt.child_count(v) for v in path[1:]}
    events = []
    reach = ONE  # probability that levels m..l all map to x
    for lvl in range(m, -1, -1):
        if lvl < m:
            reach /= counts[lvl]
        stop = ONE - Fraction(1, counts[lvl - 1]) if lvl > 0 else ONE
        events.append(ExpandedLevelEvent(x, lvl, reach * stop))
    return events


class PathProductIndex:
    """Exact products of ``1/c_v`` along root paths plus LCA queries.

    ``prefix[v]`` is the product of ``1/c_a`` over strict ancestors ``a`` of
    ``v``; any segment product is a quotient of two prefixes. LCA uses
    binary lifting.
    """

    def __init__(self, rt: RootedTree):
        self.tree = rt
        order = sorted(rt.graph.vertices, key=lambda v: (rt.level[v], v))
        self.prefix: dict[str, Fraction] = {}
        for v in order:
            p = rt.parent[v]
            self.prefix[v] = ONE if p is None else self.prefix[p] / rt.child_count(p)
        depth = max(rt.level.values(), default=0)
        self._log = max(1, depth.bit_length())
        up = [{v: (rt.parent[v] if rt.parent[v] is not None else v) for v in order}]
        for j in range(1, self._log):
            prev = up[-1]
            up.append({v: prev[prev[v]] for v in order})
        self._up = up

    def lca(self, a: str, b: str) -> str:
        level = self.tree.level
        if level[a] < level[b]:
            a, b = b, a
        diff = level[a] - level[b]
        j = 0
        while diff:
            if diff & 1:
                a = self._up[j][a]
            diff >>= 1
            j += 1
        if a == b:
            return a
        for j in range(self._log - 1, -1, -1):
            if self._up[j][a] != self._up[j][b]:
                a, b = self._up[j][a], self._up[j][b]
        return self.tree.parent[a]

    def segment_product(self, v: str, ancestor: str) -> Fraction:
        """Product of ``1/c`` over vertices strictly between ``v`` and ``ancestor``."""
        return self.prefix[v] * self.tree.child_count(ancestor) / self.prefix[ancestor]


def build_path_product_index(rt: RootedTree) -> PathProductIndex:
    return PathProductIndex(rt)


def closed_form_capacity(index: PathProductIndex, x: str, x2: str) -> Fraction:
    """Probability that ``x`` and ``x2`` are adjacent in the random induced graph.

    With ``r`` the lowest common ancestor, the two fibers touch exactly when
    ``r`` joins one of them and the other reaches up to the child of ``r``:
    ``2 * (1/c_r) * seg(x, r) * seg(x2, r)``.
    """
    if x == x2:
        raise SameTerminal(f"terminal pair ({x!r}, {x2!r}) is not a pair")
    rt = index.tree
    if rt.degenerate:
        return rt.graph.capacity(x, x2)
    _leaf_path(rt, x)
    _leaf_path(rt, x2)
    r = index.lca(x, x2)
    return 2 * index.segment_product(x, r) * index.segment_product(x2, r) / rt.child_count(r)


def leaf_tree_sparsifier(rt: RootedTree) -> CapacitatedGraph:
    """Closed-form expected induced graph of a leaf-terminal rooted tree."""
    if rt.degenerate:
        return CapacitatedGraph(rt.terminals, rt.terminals, rt.graph.edge_list())
    index = PathProductIndex(rt)
    terms = sorted(rt.terminals)
    edges = []
    for i, a in enumerate(terms):
        for b in terms[i + 1 :]:
            c = closed_form_capacity(index, a, b)
            if c:
                edges.append((a, b, c))
    return CapacitatedGraph(terms, terms, edges)


def expected_sparsifier(tree: CapacitatedGraph) -> CapacitatedGraph:
    """Quality-2 flow sparsifier on the terminals of a unit-capacity tree."""
    pieces, plan = preprocess(tree)
    return plan.replay([leaf_tree_sparsifier(root_tree(p)) for p in pieces])


def expected_sparsifier_by_enumeration(
    tree: CapacitatedGraph, limit: int = 10_000
) -> CapacitatedGraph:
    """Same result as :func:`expected_sparsifier`, computed by brute force.

    Enumerates every 0-extension of every piece and averages the induced
    graphs with their probabilities. Slow; used as a cross-check.
    """
    pieces, plan = preprocess(tree, contract=False)
    return plan.replay([average_of_extensions(root_tree(p), limit) for p in pieces])


def average_of_extensions(rt: RootedTree, limit: int = 10_000) -> CapacitatedGraph:
    total: dict = {}
    for ext, p in enumerate_zero_extensions(rt, limit):
        for key, c in ext.induced.edges.items():
            total[key] = total.get(key, Fraction(0)) + p * c
    return CapacitatedGraph(rt.terminals, rt.terminals, [(u, v, c) for (u, v), c in total.items()])


def iter_samples(rt: RootedTree, seed: int, count: int) -> Iterator[ZeroExtension]:
    """``count`` extensions from seeds derived deterministically from ``seed``."""
    rng = random.Random(seed)
    for _ in range(count):
        yield sample_zero_extension(rt, rng.getrandbits(64))


def monte_carlo_capacities(rt: RootedTree, seed: int, count: int) -> dict:
    """Empirical mean induced capacity per terminal pair, as floats."""
    sums: dict = {}
    for ext in iter_samples(rt, seed, count):
        for key, c in ext.induced.edges.items():
            sums[key] = sums.get(key, 0) + c
    return {edge_key(*k): float(v) / count for k, v in sums.items()}
