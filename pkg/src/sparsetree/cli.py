"""Command-line interface: sparsify, sample, verify, lowerbound, bench.

Exit codes: 0 success / verified, 1 verification failure, 2 usage or parse
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import generators
from .errors import SparsifierError
from .fileio import (
    dump_json,
    load_graph,
    parse_capacity,
    serialize_instance,
    sparsifier_to_dict,
)
from .model import CapacitatedGraph, Demand
from .quasibip import exact_qb_sparsifier, is_quasi_bipartite, qb_sparsifier
from .treeprep import preprocess, root_tree
from .verify import (
    enumerate_cut_quality,
    flow_quality_tree,
    max_concurrent_flow,
    star_cut_lp,
    star_lower_bound,
    verify_exact,
)
from .zeroext import expected_sparsifier, iter_samples

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MODES = {
    "tree": ("expected-zero-extension", "closed-form expectation of random connected 0-extensions; root exempt from degree-2 contraction"),
    "qb": ("weighted-star-merge", "weighted star sparsifiers glued at shared terminals"),
    "qb-exact": ("type-merge", "non-terminals of equal terminal neighbourhood merged with capacity = group size"),
}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def flow_lp_quality(g: CapacitatedGraph, h: CapacitatedGraph) -> Fraction:
    """Flow quality of a terminal-only ``h`` as ``1 / lambda_G(d_H)``."""
    sol = max_concurrent_flow(g, Demand.from_graph(h))
    if not sol.objective:
        raise SparsifierError("sparsifier demand cannot be routed in the input graph")
    return 1 / sol.objective


def flow_lp_certificate(g: CapacitatedGraph, h: CapacitatedGraph) -> dict:
    q = flow_lp_quality(g, h)
    return {"kind": "flow-lp", "quality": str(q), "qualityApprox": float(q)}


def build_sparsifier(g: CapacitatedGraph, mode: str) -> CapacitatedGraph:
    if mode == "tree":
        return expected_sparsifier(g)
    if mode == "qb":
        return qb_sparsifier(g)
    if mode == "qb-exact":
        return exact_qb_sparsifier(g)
    raise UsageError(f"unknown mode {mode!r}")


def certify(g: CapacitatedGraph, h: CapacitatedGraph, mode: str) -> dict:
    if mode == "tree":
        return flow_quality_tree(g, h).to_dict()
    if mode == "qb":
        return flow_lp_certificate(g, h)
    return enumerate_cut_quality(g, h).to_dict()


def cmd_sparsify(args) -> int:
    g = load_graph(_read(args.input))
    if args.mode == "tree" and not g.is_tree():
        raise UsageError("mode 'tree' needs a tree instance")
    if args.mode in ("qb", "qb-exact") and not is_quasi_bipartite(g):
        raise UsageError(f"mode {args.mode!r} needs a quasi-bipartite instance (non-terminals independent)")
    h = build_sparsifier(g, args.mode)
    cert = certify(g, h, args.mode) if args.certify else None
    if args.format == "text":
        _emit(serialize_instance(h), args.out)
    else:
        algo, variant = MODES[args.mode]
        _emit(dump_json(sparsifier_to_dict(h, algorithm=algo, variant=variant, certificate=cert)), args.out)
    return EXIT_OK


def sample_records(g: CapacitatedGraph, seed: int, count: int):
    """Sampled 0-extensions of a tree, one JSON-able record each."""
    pieces, plan = preprocess(g, contract=False)
    rooted = [root_tree(p) for p in pieces]
    original = {}
    for _, _, corr in plan.steps:
        original.update({copy: t for t, copy in corr.items()})
    streams = [iter_samples(rt, seed * 1_000_003 + i, count) for i, rt in enumerate(rooted)]
    for index in range(count):
        exts = [next(s) for s in streams]
        retraction = {}
        for ext in exts:
            for v, t in ext.retraction.items():
                retraction[original.get(v, v)] = original.get(t, t)
        induced = plan.replay([e.induced for e in exts])
        yield {
            "index": index,
            "retraction": dict(sorted(retraction.items())),
            "edges": [[u, v, str(c)] for (u, v), c in induced.edges.items()],
        }


def cmd_sample(args) -> int:
    g = load_graph(_read(args.input))
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    lines = [json.dumps(r, sort_keys=False) + "\n" for r in sample_records(g, args.seed, args.count)]
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = load_graph(_read(args.graph))
    h = load_graph(_read(args.sparsifier))
    threshold = parse_capacity(args.max_quality) if args.max_quality else None
    ok = True
    if args.kind == "cut":
        rep = enumerate_cut_quality(g, h)
        report = rep.to_dict()
        ok = rep.dominates and (threshold is None or rep.max_ratio <= threshold)
    elif args.kind == "flow-tree":
        cert = flow_quality_tree(g, h)
        cut = enumerate_cut_quality(g, h)
        report = cert.to_dict()
        report["cutDomination"] = cut.to_dict()
        ok = cut.dominates and (threshold is None or cert.quality <= threshold)
    else:
        demands = [
            generators.random_demand(g.terminals, args.seed * 7919 + i)
            for i in range(args.demands)
        ]
        rep = verify_exact(g, h, demands)
        report = rep.to_dict()
        ok = rep.ok
    report["verified"] = ok
    _emit(dump_json(report), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def lowerbound_report(k: int, lp_max_k: int = 5) -> dict:
    lb = star_lower_bound(k)
    out = {
        "k": k,
        "lowerBound": str(lb.value),
        "lowerBoundApprox": float(lb.value),
        "sparsifier": sparsifier_to_dict(lb.sparsifier, algorithm="uniform-complete", variant=f"weight 2/{k}"),
        "certificate": lb.report.to_dict(),
    }
    if k <= lp_max_k:
        opt, _ = star_cut_lp(k)
        out["lpOptimum"] = str(opt)
        out["lpConfirms"] = opt == lb.value
    return out


def cmd_lowerbound(args) -> int:
    if not 2 <= args.k <= 16:
        raise UsageError("k must be in 2..16")
    _emit(dump_json(lowerbound_report(args.k)), args.out)
    return EXIT_OK


BENCH_FIELDS = ["instance", "algorithm", "n", "k", "size", "quality", "quality_approx", "wall_time"]


def _bench_instances(config: dict):
    for entry_i, entry in enumerate(config.get("instances", [])):
        gen = entry.get("generator")
        for seed in entry.get("seeds", []):
            if gen == "tree":
                g = generators.random_unit_tree(entry["n"], entry["k"], seed)
                yield f"tree-n{entry['n']}-k{entry['k']}-s{seed}", g, entry.get("modes", ["tree"])
            elif gen == "qb":
                g = generators.random_quasi_bipartite(
                    entry["k"], entry["centers"], seed, max_types=entry.get("max_types")
                )
                yield f"qb-k{entry['k']}-c{entry['centers']}-s{seed}", g, entry.get("modes", ["qb", "qb-exact"])
            elif gen == "star":
                g = generators.star(entry["k"])
                yield f"star-k{entry['k']}", g, entry.get("modes", ["tree"])
            else:
                raise UsageError(f"instance entry {entry_i}: unknown generator {gen!r}")


def bench_rows(config: dict, timing: bool = False) -> list[dict]:
    rows = []
    for name, g, modes in _bench_instances(config):
        for mode in modes:
            t0 = time.perf_counter()
            h = build_sparsifier(g, mode)
            elapsed = time.perf_counter() - t0
            if mode == "tree":
                q = flow_quality_tree(g, h).quality
            elif mode == "qb":
                q = flow_lp_quality(g, h)
            else:
                q = enumerate_cut_quality(g, h).max_ratio
            rows.append({
                "instance": name,
                "algorithm": MODES[mode][0],
                "n": g.n,
                "k": g.k,
                "size": h.n,
                "quality": str(q),
                "quality_approx": f"{float(q):.6f}",
                "wall_time": f"{elapsed:.6f}" if timing else "",
            })
    return rows


def bench_csv(config: dict, timing: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(bench_rows(config, timing))
    return buf.getvalue()


def cmd_bench(args) -> int:
    try:
        config = json.loads(_read(args.config))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config line {exc.lineno}: {exc.msg}") from None
    try:
        table = bench_csv(config, args.timing)
    except KeyError as exc:
        raise UsageError(f"config entry is missing key {exc}") from None
    _emit(table, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsetree", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sparsify", help="build a sparsifier")
    s.add_argument("input")
    s.add_argument("--mode", choices=sorted(MODES), required=True)
    s.add_argument("--certify", action="store_true")
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sparsify)

    s = sub.add_parser("sample", help="sample random connected 0-extensions of a tree")
    s.add_argument("input")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("verify", help="check a sparsifier against its input graph")
    s.add_argument("graph")
    s.add_argument("sparsifier")
    s.add_argument("--kind", choices=["cut", "flow-tree", "exact"], default="cut")
    s.add_argument("--max-quality")
    s.add_argument("--demands", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("lowerbound", help="star lower bound and its certificate")
    s.add_argument("k", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lowerbound)

    s = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    s.add_argument("config")
    s.add_argument("--timing", action="store_true", help="fill wall_time (makes output non-reproducible)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SparsifierError) as exc:
        print(f"sparsetree: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
