"""Instance text format and sparsifier JSON.

Instance files::

    # comment
    graph <n> <m> <k>
    terminals <id> ...
    edge <u> <v> [<cap>]

``cap`` is an integer or ``p/q`` and defaults to 1. Floats are rejected.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .errors import InvalidInstance, ParseError
from .model import CapacitatedGraph

_CAP = re.compile(r"^[+-]?\d+(/\d+)?$")
SPARSIFIER_FORMAT = "sparsetree/sparsifier"


def parse_capacity(token: str, line: int | None = None) -> Fraction:
    if not _CAP.match(token):
        raise ParseError(f"capacity {token!r} is not an integer or p/q rational", line)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise ParseError(f"capacity {token!r} has zero denominator", line) from None


def parse_instance(text: str) -> CapacitatedGraph:
    header = None
    terminals: list[str] | None = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        word = parts[0]
        if word == "graph":
            if header is not None:
                raise ParseError("duplicate graph header", lineno)
            if len(parts) != 4 or not all(p.isdigit() for p in parts[1:]):
                raise ParseError("expected 'graph <n> <m> <k>'", lineno)
            header = tuple(int(p) for p in parts[1:])
        elif word == "terminals":
            if header is None:
                raise ParseError("'terminals' before 'graph' header", lineno)
            if terminals is not None:
                raise ParseError("duplicate terminals line", lineno)
            terminals = parts[1:]
        elif word == "edge":
            if header is None:
                raise ParseError("'edge' before 'graph' header", lineno)
            if len(parts) not in (3, 4):
                raise ParseError("expected 'edge <u> <v> [<cap>]'", lineno)
            cap = parse_capacity(parts[3], lineno) if len(parts) == 4 else Fraction(1)
            edges.append((parts[1], parts[2], cap, lineno))
        else:
            raise ParseError(f"unknown directive {word!r}", lineno)
    if header is None:
        raise ParseError("missing 'graph' header")
    if terminals is None:
        raise ParseError("missing 'terminals' line")
    n, m, k = header
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}")
    if len(set(terminals)) != len(terminals) or len(terminals) != k:
        raise ParseError(f"header declares {k} distinct terminals, found {terminals}")
    try:
        g = CapacitatedGraph(terminals, terminals, [(u, v, c) for u, v, c, _ in edges])
    except InvalidInstance as exc:
        bad = next(
            (ln for u, v, c, ln in edges if u == v or c <= 0), None
        )
        raise ParseError(str(exc), bad) from exc
    if g.n != n:
        raise ParseError(f"header declares {n} vertices, found {g.n}")
    return g


def _cap_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def serialize_instance(g: CapacitatedGraph) -> str:
    isolated = [v for v in g.sorted_vertices() if g.degree(v) == 0 and v not in g.terminals]
    if isolated:
        raise InvalidInstance(f"isolated non-terminals cannot be written: {isolated}")
    lines = [f"graph {g.n} {g.m} {g.k}", "terminals " + " ".join(g.sorted_terminals())]
    for (u, v), c in g.edges.items():
        lines.append(f"edge {u} {v}" + ("" if c == 1 else f" {_cap_text(c)}"))
    return "\n".join(lines) + "\n"


def sparsifier_to_dict(
    h: CapacitatedGraph,
    *,
    algorithm: str,
    seed: int | None = None,
    variant: str = "",
    certificate: dict | None = None,
) -> dict[str, Any]:
    out: dict[str, Any] = {
        "format": SPARSIFIER_FORMAT,
        "vertices": h.sorted_vertices(),
        "terminals": h.sorted_terminals(),
        "edges": [
            {"u": u, "v": v, "num": c.numerator, "den": c.denominator, "approx": float(c)}
            for (u, v), c in h.edges.items()
        ],
        "provenance": {"algorithm": algorithm, "seed": seed, "paperVariant": variant},
    }
    if certificate is not None:
        out["certificate"] = certificate
    return out


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def sparsifier_from_dict(data: dict) -> CapacitatedGraph:
    if data.get("format") != SPARSIFIER_FORMAT:
        raise ParseError(f"not a sparsifier file (format={data.get('format')!r})")
    edges = []
    for e in data["edges"]:
        c = Fraction(int(e["num"]), int(e["den"]))
        if c.numerator != e["num"] or c.denominator != e["den"]:
            raise ParseError(f"edge {e['u']}-{e['v']} capacity not in lowest terms")
        edges.append((e["u"], e["v"], c))
    return CapacitatedGraph(data["vertices"], data["terminals"], edges)


def load_graph(text: str) -> CapacitatedGraph:
    """Parse either an instance file or a sparsifier JSON document."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        return sparsifier_from_dict(data)
    return parse_instance(text)
