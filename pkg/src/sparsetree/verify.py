"""Certification oracles for sparsifier quality.

* cut quality by exhaustive enumeration of terminal bipartitions,
* exact tree congestion (the flow quality of a terminal-only sparsifier of a
  tree is the congestion of routing its own capacities as demands),
* maximum concurrent flow by an exact rational path LP with column
  generation, plus an independent float edge-formulation LP,
* the star lower bound and the LP that certifies it at small ``k``.
"""

from __future__ import annotations

import heapq
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import (
    InvalidInstance,
    NotATree,
    TooManyTerminals,
    UnknownTerminal,
    UnsupportedTopology,
)
from . import generators
from .flow import CutOracle
from .lp import OPTIMAL, UNBOUNDED, LpSolution, solve_lp
from .model import CapacitatedGraph, Demand, edge_key

DEFAULT_MAX_K = 16


def max_terminals() -> int:
    """Enumeration cap, overridable with ``SPARSETREE_MAX_K``."""
    raw = os.environ.get("SPARSETREE_MAX_K")
    return int(raw) if raw else DEFAULT_MAX_K


def bipartitions(terminals: Iterable[str]) -> list[frozenset[str]]:
    """All ``2^(k-1) - 1`` terminal bipartitions, one side each.

    The largest terminal is always kept out of ``S``, so each unordered
    bipartition appears once. Order follows the bitmask over the other
    terminals, which puts singletons of small terminals first.
    """
    terms = sorted(terminals)
    head = terms[:-1]
    out = []
    for mask in range(1, 1 << len(head)):
        out.append(frozenset(t for i, t in enumerate(head) if mask >> i & 1))
    return out


# -- cut quality -------------------------------------------------------------


@dataclass
class QualityReport:
    min_ratio: Fraction | float
    max_ratio: Fraction | float
    witness_min: frozenset
    witness_max: frozenset
    per_cut: list = field(default_factory=list)

    @property
    def dominates(self) -> bool:
        return self.min_ratio >= 1

    def to_dict(self) -> dict:
        return {
            "kind": "cut",
            "minRatio": _fmt(self.min_ratio),
            "maxRatio": _fmt(self.max_ratio),
            "witnessCutMin": sorted(self.witness_min),
            "witnessCutMax": sorted(self.witness_max),
            "dominates": self.dominates,
            "cuts": len(self.per_cut),
        }


def _fmt(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(x)


def _ratio(h_val: Fraction, g_val: Fraction):
    if g_val == 0:
        return Fraction(1) if h_val == 0 else math.inf
    return h_val / g_val


def enumerate_cut_quality(
    g: CapacitatedGraph,
    h: CapacitatedGraph,
    terminals: Iterable[str] | None = None,
    *,
    max_k: int | None = None,
) -> QualityReport:
    """Compare terminal mincuts of ``h`` against ``g`` on every bipartition."""
    terms = sorted(terminals if terminals is not None else g.terminals)
    cap = max_k if max_k is not None else max_terminals()
    if len(terms) > cap:
        raise TooManyTerminals(f"k={len(terms)} exceeds enumeration cap {cap}")
    if not set(terms) <= h.terminals:
        raise UnknownTerminal(sorted(set(terms) - h.terminals)[0])
    lo = hi = None
    w_lo = w_hi = frozenset()
    table = []
    cut_g, cut_h = CutOracle(g), CutOracle(h)
    for S in bipartitions(terms):
        mg = cut_g.terminal_mincut(S)
        mh = cut_h.terminal_mincut(S)
        r = _ratio(mh, mg)
        table.append((S, mg, mh))
        if lo is None or r < lo:
            lo, w_lo = r, S
        if hi is None or r > hi:
            hi, w_hi = r, S
    return QualityReport(lo, hi, w_lo, w_hi, table)


# -- tree congestion ---------------------------------------------------------


@dataclass
class FlowCertificate:
    quality: Fraction
    bottleneck: tuple
    per_edge: dict

    def to_dict(self) -> dict:
        return {
            "kind": "flow-tree",
            "quality": str(self.quality),
            "qualityApprox": float(self.quality),
            "bottleneckEdge": list(self.bottleneck),
            "perEdgeCongestion": {f"{u}|{v}": str(c) for (u, v), c in self.per_edge.items()},
        }


def tree_congestion(tree: CapacitatedGraph, demand: Demand) -> FlowCertificate:
    """Route each demand on its unique tree path; report edge congestions."""
    if not tree.is_tree():
        raise NotATree()
    pairs = demand.positive()
    for pair in pairs:
        for x in pair:
            if x not in tree.vertices:
                raise UnknownTerminal(x)
    root = min(tree.vertices)
    parent = {root: None}
    order = [root]
    for u in order:
        for w in sorted(tree.neighbors(u)):
            if w not in parent:
                parent[w] = u
                order.append(w)
    below: dict[str, set] = {v: {v} for v in order}
    for v in reversed(order[1:]):
        below[parent[v]] |= below[v]
    per_edge = {}
    for v in order[1:]:
        sub = below[v]
        load = sum((d for (a, b), d in pairs.items() if (a in sub) != (b in sub)), Fraction(0))
        key = edge_key(v, parent[v])
        per_edge[key] = load / tree.capacity(v, parent[v])
    per_edge = dict(sorted(per_edge.items()))
    if not per_edge:
        return FlowCertificate(Fraction(0), (), {})
    best = max(per_edge.values())
    bottleneck = next(e for e, c in per_edge.items() if c == best)
    return FlowCertificate(best, bottleneck, per_edge)


def flow_quality_tree(tree: CapacitatedGraph, h: CapacitatedGraph) -> FlowCertificate:
    """Flow quality of a terminal-only sparsifier ``h`` of ``tree``."""
    if set(h.vertices) != set(tree.terminals):
        raise InvalidInstance("sparsifier must live exactly on the tree's terminals")
    return tree_congestion(tree, Demand.from_graph(h))


# -- concurrent flow ---------------------------------------------------------


@dataclass
class ConcurrentFlow(LpSolution):
    paths: list = field(default_factory=list)
    rounds: int = 0

    @property
    def value(self) -> Fraction | None:
        return self.objective


def _two_hop_paths(graph: CapacitatedGraph, s: str, t: str) -> list[tuple[str, ...]]:
    paths = []
    if graph.has_edge(s, t):
        paths.append((s, t))
    common = set(graph.neighbors(s)) & set(graph.neighbors(t))
    for u in sorted(common - graph.terminals):
        paths.append((s, u, t))
    return paths


def _shortest_path(graph: CapacitatedGraph, length: dict, s: str, t: str):
    dist = {s: Fraction(0)}
    prev: dict = {}
    heap = [(Fraction(0), s)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == t:
            break
        for w in sorted(graph.neighbors(u)):
            nd = d + length[edge_key(u, w)]
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                prev[w] = u
                heapq.heappush(heap, (nd, w))
    if t not in done:
        return None, None
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return dist[t], tuple(reversed(path))


def max_concurrent_flow(
    graph: CapacitatedGraph, demand: Demand, *, two_hop_only: bool = False
) -> ConcurrentFlow:
    """Largest ``lam`` such that ``lam * demand`` routes within capacities.

    Exact rational path LP. Columns start as the direct and two-hop
    (terminal-center-terminal) paths; further paths are priced in by
    shortest paths under the edge duals until none improves, so the answer
    is exact on any graph. With ``two_hop_only`` the path set is frozen and
    inputs with adjacent non-terminals are rejected.
    """
    for pair in demand.entries:
        for x in pair:
            if x not in graph.terminals:
                raise UnknownTerminal(x)
    if two_hop_only:
        for u, v in graph.edges:
            if u not in graph.terminals and v not in graph.terminals:
                raise UnsupportedTopology(f"edge ({u}, {v}) joins two non-terminals")
    pairs = sorted(demand.positive().items())
    if not pairs:
        return ConcurrentFlow(UNBOUNDED)
    edges = list(graph.edges)
    erow = {e: len(pairs) + i for i, e in enumerate(edges)}
    paths: list[tuple[int, tuple[str, ...]]] = []
    known = set()
    for i, ((s, t), _) in enumerate(pairs):
        for p in _two_hop_paths(graph, s, t):
            paths.append((i, p))
            known.add(p)

    rounds = 0
    while True:
        rounds += 1
        rows: list[dict[int, Fraction]] = [{0: d} for _, d in pairs]
        rows += [{} for _ in edges]
        for col, (i, p) in enumerate(paths, start=1):
            rows[i][col] = Fraction(-1)
            for a, b in zip(p, p[1:]):
                rows[erow[edge_key(a, b)]][col] = Fraction(1)
        rhs = [Fraction(0)] * len(pairs) + [graph.edges[e] for e in edges]
        c = [Fraction(1)] + [Fraction(0)] * len(paths)
        sol = solve_lp(c, rows, rhs)
        if sol.status != OPTIMAL or two_hop_only:
            break
        y = sol.duals[: len(pairs)]
        length = {e: sol.duals[erow[e]] for e in edges}
        added = False
        for i, ((s, t), _) in enumerate(pairs):
            dist, p = _shortest_path(graph, length, s, t)
            if p is not None and dist < y[i] and p not in known:
                paths.append((i, p))
                known.add(p)
                added = True
        if not added:
            break
    flows = [(pairs[i][0], p, sol.x[col]) for col, (i, p) in enumerate(paths, start=1)] if sol.x else []
    return ConcurrentFlow(
        sol.status, sol.objective, sol.x, sol.duals, sol.pivots,
        paths=[f for f in flows if f[2]], rounds=rounds,
    )


def max_concurrent_flow_float(graph: CapacitatedGraph, demand: Demand) -> float:
    """Edge-based multicommodity LP in floating point (HiGHS).

    Commodities are grouped by source terminal. Independent of the path LP
    and used as a cross-check and as the tolerance-based fallback.
    """
    pairs = demand.positive()
    if not pairs:
        return math.inf
    sources = sorted({a for a, _ in pairs})
    verts = graph.sorted_vertices()
    arcs = [(u, v) for u, v in graph.edges] + [(v, u) for u, v in graph.edges]
    na = len(arcs)
    nvar = 1 + len(sources) * na  # lam first
    A_eq, b_eq = [], []
    for si, s in enumerate(sources):
        out = {t: float(d) for (a, t), d in pairs.items() if a == s}
        for v in verts:
            row = np.zeros(nvar)
            for j, (a, b) in enumerate(arcs):
                if a == v:
                    row[1 + si * na + j] += 1
                if b == v:
                    row[1 + si * na + j] -= 1
            if v == s:
                row[0] = -sum(out.values())
            elif v in out:
                row[0] = out[v]
            A_eq.append(row)
            b_eq.append(0.0)
    A_ub, b_ub = [], []
    for (u, v), c in graph.edges.items():
        row = np.zeros(nvar)
        for si in range(len(sources)):
            row[1 + si * na + arcs.index((u, v))] = 1
            row[1 + si * na + arcs.index((v, u))] = 1
        A_ub.append(row)
        b_ub.append(float(c))
    cost = np.zeros(nvar)
    cost[0] = -1.0
    res = linprog(
        cost,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=b_ub or None,
        A_eq=np.array(A_eq),
        b_eq=b_eq,
        bounds=[(0, None)] * nvar,
        method="highs",
    )
    if res.status == 3:
        return math.inf
    if res.status != 0:
        raise RuntimeError(f"float LP failed: {res.message}")
    return float(res.x[0])


@dataclass
class ExactnessReport:
    ok: bool
    witness_cut: frozenset | None = None
    witness_demand: Demand | None = None
    gaps: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"kind": "exact", "ok": self.ok}
        if self.witness_cut is not None:
            out["witnessCut"] = sorted(self.witness_cut)
        if self.witness_demand is not None:
            out["witnessDemand"] = {
                f"{a}|{b}": str(d) for (a, b), d in self.witness_demand.entries.items()
            }
        out["lambdaPairs"] = [[str(a), str(b)] for a, b in self.gaps]
        return out


def verify_exact(
    g: CapacitatedGraph,
    h: CapacitatedGraph,
    demands: Sequence[Demand],
    tol: Fraction | float = 0,
) -> ExactnessReport:
    """Check equal terminal mincuts and equal concurrent flow for each demand.

    ``tol == 0`` uses the rational LP; a positive ``tol`` switches to the
    float LP with that absolute tolerance.
    """
    if g.terminals != h.terminals:
        raise InvalidInstance("graphs have different terminal sets")
    report = ExactnessReport(True)
    cut_g, cut_h = CutOracle(g), CutOracle(h)
    for S in bipartitions(g.terminals):
        if cut_g.terminal_mincut(S) != cut_h.terminal_mincut(S):
            report.ok = False
            report.witness_cut = S
            break
    for d in demands:
        if tol:
            lg = max_concurrent_flow_float(g, d)
            lh = max_concurrent_flow_float(h, d)
            bad = abs(lg - lh) > tol if math.isfinite(lg) or math.isfinite(lh) else False
        else:
            lg = max_concurrent_flow(g, d).objective
            lh = max_concurrent_flow(h, d).objective
            bad = lg != lh
        report.gaps.append((lg, lh))
        if bad:
            report.ok = False
            if report.witness_demand is None:
                report.witness_demand = d
    return report


# -- star lower bound --------------------------------------------------------


def uniform_complete(terminals: Sequence[str], weight: Fraction) -> CapacitatedGraph:
    return CapacitatedGraph(
        terminals, terminals, [(a, b, weight) for a, b in itertools.combinations(sorted(terminals), 2)]
    )


class LowerBound(NamedTuple):
    value: Fraction
    sparsifier: CapacitatedGraph
    report: QualityReport


def star_lower_bound(k: int) -> LowerBound:
    """``2(1 - 1/k)`` with the uniform ``2/k`` complete graph that attains it.

    The attached report certifies, by enumeration against the unit star,
    that this sparsifier dominates every cut and has worst ratio exactly
    ``2(1 - 1/k)`` (on a singleton cut).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    star = generators.star(k)
    h = uniform_complete(star.sorted_terminals(), Fraction(2, k))
    report = enumerate_cut_quality(star, h)
    return LowerBound(2 * (1 - Fraction(1, k)), h, report)


def star_cut_lp(k: int, max_k: int = 10) -> tuple[Fraction, dict]:
    """Best cut-sparsifier quality on ``k`` terminals for the unit star.

    LP over arbitrary nonnegative complete-graph weights ``w``: minimize
    ``q`` with ``m(S) <= w(delta S) <= q m(S)`` for every bipartition,
    where ``m(S) = min(|S|, k - |S|)``. Returns the optimum and one optimal
    weighting.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > max_k:
        raise TooManyTerminals(f"k={k} exceeds LP cap {max_k}")
    terms = [f"x{i}" for i in range(1, k + 1)]
    pairs = list(itertools.combinations(terms, 2))
    q = len(pairs)
    rows, rhs = [], []
    for S in bipartitions(terms):
        m = min(len(S), k - len(S))
        crossing = {j: 1 for j, (a, b) in enumerate(pairs) if (a in S) != (b in S)}
        rows.append({j: -1 for j in crossing})
        rhs.append(-m)
        upper = dict(crossing)
        upper[q] = -m
        rows.append(upper)
        rhs.append(0)
    c = [0] * q + [-1]
    sol = solve_lp(c, rows, rhs)
    if not sol.optimal:
        raise RuntimeError(f"star LP ended with status {sol.status}")
    return -sol.objective, dict(zip(pairs, sol.x[:q]))


def optimal_star_sparsifier_lp(k: int, max_k: int = 10) -> Fraction:
    """Optimal cut-sparsifier quality for the unit star on ``k`` terminals."""
    return star_cut_lp(k, max_k)[0]
