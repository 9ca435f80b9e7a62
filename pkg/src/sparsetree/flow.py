"""Exact max-flow / min-cut between vertex sets.

Capacities are scaled to integers by the lcm of their denominators, pushed
through Dinic's augmenting-path algorithm, and scaled back, so the value
returned is an exact Fraction.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Iterable

from .errors import EmptySide, OverlappingSets, UnknownTerminal
from .model import CapacitatedGraph

class _Dinic:
    """Dinic's algorithm on integer vertex ids and integer capacities.

    Arcs are stored in pairs: arc ``e`` and its reverse ``e ^ 1``.
    """

    def __init__(self, adj: list[list[int]], to: list[int], cap: list[int]):
        self.adj = adj
        self.to = to
        self.cap = cap

    def add_edge(self, u: int, v: int, c: int, rc: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(rc)

    def _levels(self, s: int, t: int):
        level = [-1] * len(self.adj)
        level[s] = 0
        q = deque([s])
        to, cap = self.to, self.cap
        while q:
            u = q.popleft()
            for e in self.adj[u]:
                w = to[e]
                if cap[e] > 0 and level[w] < 0:
                    level[w] = level[u] + 1
                    q.append(w)
        return level if level[t] >= 0 else None

    def maxflow(self, s: int, t: int) -> int:
        total = 0
        while (level := self._levels(s, t)) is not None:
            it = [0] * len(self.adj)
            while pushed := self._push(s, t, level, it):
                total += pushed
        return total

    def _push(self, s: int, t: int, level: list[int], it: list[int]) -> int:
        # iterative DFS along the level graph
        to, cap, adj = self.to, self.cap, self.adj
        path: list[int] = []
        u = s
        while True:
            if u == t:
                f = min(cap[e] for e in path)
                for e in path:
                    cap[e] -= f
                    cap[e ^ 1] += f
                return f
            edges = adj[u]
            advanced = False
            while it[u] < len(edges):
                e = edges[it[u]]
                w = to[e]
                if cap[e] > 0 and level[w] == level[u] + 1:
                    path.append(e)
                    u = w
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                if not path:
                    return 0
                e = path.pop()
                u = to[e ^ 1]
                it[u] += 1

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for e in self.adj[u]:
                w = self.to[e]
                if self.cap[e] > 0 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def _scale(graph: CapacitatedGraph) -> int:
    return math.lcm(*(c.denominator for c in graph.edges.values())) if graph.m else 1


class CutOracle:
    """Repeated flow and cut queries on one graph.

    Capacities are scaled to integers once, so enumerating thousands of
    terminal cuts avoids rational arithmetic in the inner loop.
    """

    def __init__(self, graph: CapacitatedGraph):
        self.graph = graph
        self.scale = _scale(graph)
        self.int_edges = [(u, v, int(c * self.scale)) for (u, v), c in graph.edges.items()]
        self._big = sum(c for _, _, c in self.int_edges) + 1
        self._names = graph.sorted_vertices()
        self._index = {v: i for i, v in enumerate(self._names)}
        base = _Dinic([[] for _ in range(len(self._names) + 2)], [], [])
        for u, v, c in self.int_edges:
            base.add_edge(self._index[u], self._index[v], c, c)
        self._base = base

    def _network(self, sources: set, sinks: set) -> _Dinic:
        if not sources or not sinks:
            raise EmptySide("source and sink sets must be nonempty")
        if sources & sinks:
            raise OverlappingSets(f"sources and sinks share {sorted(sources & sinks)}")
        for v in sources | sinks:
            if v not in self.graph.vertices:
                raise UnknownTerminal(v)
        base = self._base
        net = _Dinic([list(a) for a in base.adj], list(base.to), list(base.cap))
        src, snk = len(self._names), len(self._names) + 1
        for s in sorted(sources):
            net.add_edge(src, self._index[s], self._big, 0)
        for t in sorted(sinks):
            net.add_edge(self._index[t], snk, self._big, 0)
        return net

    def max_flow(self, sources: Iterable[str], sinks: Iterable[str]) -> Fraction:
        net = self._network(set(sources), set(sinks))
        n = len(self._names)
        return Fraction(net.maxflow(n, n + 1), self.scale)

    def min_cut(self, sources: Iterable[str], sinks: Iterable[str]) -> tuple[Fraction, frozenset[str]]:
        net = self._network(set(sources), set(sinks))
        n = len(self._names)
        value = Fraction(net.maxflow(n, n + 1), self.scale)
        return value, frozenset(self._names[i] for i in net.reachable(n) if i < n)

    def terminal_mincut(self, S: Iterable[str]) -> Fraction:
        """Cheapest cut separating ``S`` from the remaining terminals."""
        graph = self.graph
        S = set(S)
        rest = graph.terminals - S
        if not S or not rest:
            raise EmptySide("S must be a nonempty proper subset of the terminals")
        if not S <= graph.terminals:
            raise UnknownTerminal(sorted(S - graph.terminals)[0])
        if graph.vertices == graph.terminals:
            crossing = sum(c for u, v, c in self.int_edges if (u in S) != (v in S))
            return Fraction(crossing, self.scale)
        return self.max_flow(S, rest)


def max_flow(graph: CapacitatedGraph, sources: Iterable[str], sinks: Iterable[str]) -> Fraction:
    """Maximum flow from the vertex set ``sources`` to ``sinks``."""
    return CutOracle(graph).max_flow(sources, sinks)


def min_cut(
    graph: CapacitatedGraph, sources: Iterable[str], sinks: Iterable[str]
) -> tuple[Fraction, frozenset[str]]:
    """Minimum cut value and the source side of one minimum cut."""
    return CutOracle(graph).min_cut(sources, sinks)


def terminal_mincut(graph: CapacitatedGraph, S: Iterable[str]) -> Fraction:
    """Cheapest cut separating ``S`` from the remaining terminals."""
    return CutOracle(graph).terminal_mincut(S)
