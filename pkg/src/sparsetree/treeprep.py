"""Tree normalization: pruning, degree-2 contraction, splitting, rooting.

The output of :func:`preprocess` is a list of leaf-terminal trees plus the
:class:`~sparsetree.model.MergePlan` that glues their sparsifiers back
together at the internal terminals where the input was split.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import NoNonterminalAvailable, NotATree, NotUnitCapacities
from .model import CapacitatedGraph, MergePlan, fresh_name


def _require_tree(tree: CapacitatedGraph) -> None:
    if not tree.is_tree():
        raise NotATree(f"expected a tree, got n={tree.n}, m={tree.m}")


def _require_unit(tree: CapacitatedGraph) -> None:
    for (u, v), c in tree.edges.items():
        if c != 1:
            raise NotUnitCapacities((u, v))


def prune_nonterminal_leaves(tree: CapacitatedGraph) -> CapacitatedGraph:
    """Delete non-terminal leaves until every leaf is a terminal."""
    _require_tree(tree)
    adj = {v: set(tree.neighbors(v)) for v in tree.vertices}
    stack = [v for v in adj if v not in tree.terminals and len(adj[v]) <= 1]
    removed = set()
    while stack:
        v = stack.pop()
        if v in removed or len(adj[v]) > 1:
            continue
        removed.add(v)
        for w in adj.pop(v):
            adj[w].discard(v)
            if w not in tree.terminals and len(adj[w]) <= 1:
                stack.append(w)
    if not removed:
        return tree
    return CapacitatedGraph(
        tree.vertices - removed,
        tree.terminals,
        ((u, v, c) for (u, v), c in tree.edges.items() if u not in removed and v not in removed),
    )


def contract_degree2_nonterminals(
    tree: CapacitatedGraph, keep: Iterable[str] = ()
) -> CapacitatedGraph:
    """Splice out every degree-2 non-terminal of a unit-capacity tree.

    Only unit trees are accepted: the spliced edge keeps capacity 1, which
    preserves terminal flows exactly in that case and nowhere else. Vertices
    in ``keep`` are left in place even if they have degree 2.
    """
    _require_tree(tree)
    _require_unit(tree)
    keep = set(keep)
    adj = {v: set(tree.neighbors(v)) for v in tree.vertices}
    for v in sorted(tree.nonterminals - keep):
        if len(adj[v]) == 2:
            a, b = adj.pop(v)
            adj[a].discard(v)
            adj[b].discard(v)
            adj[a].add(b)
            adj[b].add(a)
    edges = {(u, w) for u in adj for w in adj[u] if u < w}
    return CapacitatedGraph(adj, tree.terminals, sorted(edges))


def split_at_internal_terminals(
    tree: CapacitatedGraph,
) -> tuple[list[CapacitatedGraph], MergePlan]:
    """Cut the tree at every internal terminal.

    Each piece is either a connected block of non-terminals together with
    the terminals bordering it, or a single terminal-terminal edge. A
    terminal shared by several pieces keeps its own name in the first piece
    and gets a fresh copy name (``t#<piece>``) in the others.
    """
    _require_tree(tree)
    terms = tree.terminals
    seen: set[str] = set()
    raw: list[tuple[set[str], list[tuple[str, str, Fraction]]]] = []
    for start in sorted(tree.nonterminals):
        if start in seen:
            continue
        block = {start}
        stack = [start]
        seen.add(start)
        while stack:
            u = stack.pop()
            for w in tree.neighbors(u):
                if w not in terms and w not in seen:
                    seen.add(w)
                    block.add(w)
                    stack.append(w)
        edges = [
            (u, v, c)
            for (u, v), c in tree.edges.items()
            if (u in block or v in block)
        ]
        verts = block | {x for e in edges for x in e[:2]}
        raw.append((verts, edges))
    for (u, v), c in tree.edges.items():
        if u in terms and v in terms:
            raw.append(({u, v}, [(u, v, c)]))

    if not raw:
        # a single terminal vertex
        return [tree], MergePlan()

    taken = set(tree.vertices)
    owner: dict[str, int] = {}
    pieces: list[CapacitatedGraph] = []
    steps = []
    for idx, (verts, edges) in enumerate(raw):
        rename: dict[str, str] = {}
        corr: dict[str, str] = {}
        for t in sorted(verts & terms):
            if t in owner:
                copy = fresh_name(t, taken, str(idx))
                rename[t] = copy
                corr[t] = copy
            else:
                owner[t] = idx
        piece = CapacitatedGraph(verts, verts & terms, edges).relabel(rename)
        pieces.append(piece)
        if idx > 0:
            steps.append((0, idx, corr))
    return pieces, MergePlan(tuple(steps))


@dataclass(frozen=True)
class RootedTree:
    """A tree with parent/child structure and per-vertex levels.

    ``children`` lists are sorted by identifier. ``degenerate`` marks the
    two-terminal single edge, which has no non-terminal to root at; it is
    rooted at its smaller terminal.
    """

    graph: CapacitatedGraph
    root: str
    parent: dict
    children: dict
    level: dict
    degenerate: bool = False

    @property
    def terminals(self) -> frozenset[str]:
        return self.graph.terminals

    def child_count(self, v: str) -> int:
        return len(self.children[v])

    def nonterminals(self) -> list[str]:
        return sorted(self.graph.nonterminals)

    def leaves(self) -> list[str]:
        return sorted(v for v in self.graph.vertices if not self.children[v])

    def is_leaf_terminal_form(self) -> bool:
        return set(self.leaves()) == set(self.graph.terminals)

    def root_path(self, v: str) -> list[str]:
        """Vertices from ``v`` up to the root, inclusive."""
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def tree_edges(self) -> list[tuple[str, str]]:
        """Edges as ``(child, parent)``."""
        return [(v, p) for v, p in sorted(self.parent.items()) if p is not None]


def root_tree(tree: CapacitatedGraph, root: str | None = None) -> RootedTree:
    """Root at the smallest non-terminal (or at ``root`` if given)."""
    _require_tree(tree)
    degenerate = False
    if root is None:
        root = default_root(tree)
        if root is None and tree.n <= 2:
            root = min(tree.vertices)
            degenerate = tree.n == 2
        elif root is None:
            raise NoNonterminalAvailable(
                f"tree with {tree.n} vertices has no non-terminal to root at"
            )
    parent: dict = {root: None}
    level = {root: 0}
    children: dict = {v: [] for v in tree.vertices}
    order = [root]
    for u in order:
        for w in sorted(tree.neighbors(u)):
            if w not in parent:
                parent[w] = u
                level[w] = level[u] + 1
                children[u].append(w)
                order.append(w)
    return RootedTree(tree, root, parent, children, level, degenerate)


def default_root(tree: CapacitatedGraph) -> str | None:
    nts = tree.nonterminals
    return min(nts) if nts else None


def preprocess(
    tree: CapacitatedGraph, *, contract: bool = True
) -> tuple[list[CapacitatedGraph], MergePlan]:
    """Prune, split and contract a unit tree into leaf-terminal pieces.

    Contraction spares each piece's root (its smallest non-terminal). A
    non-root degree-2 vertex has a single child, so removing it leaves the
    random 0-extension distribution unchanged; a degree-2 root has two
    children and removing it would not.
    """
    _require_tree(tree)
    _require_unit(tree)
    pieces, plan = split_at_internal_terminals(prune_nonterminal_leaves(tree))
    if contract:
        pieces = [
            contract_degree2_nonterminals(p, keep=[r] if (r := default_root(p)) else [])
            for p in pieces
        ]
    return pieces, plan
