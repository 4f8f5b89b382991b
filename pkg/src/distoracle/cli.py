"""Command line front end: ``generate``, ``build``, ``query`` and ``bench``."""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict

from . import archive
from .bench import build_engine, expand_configs, parse_graph_spec, run_bench, write_csv
from .graph import (GeneratorParams, GraphError, dijkstra_from, format_graph, generate_graph,
                    save_graph)
from .tz_core import NotApplicableError, QueryTrace


class CLIError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def cmd_generate(args) -> int:
    lo, hi = (float(x) for x in args.weights.split(","))
    params = GeneratorParams(n=args.n, m=args.m, rows=args.rows, cols=args.cols, weight_range=(lo, hi))
    g = generate_graph(args.model, params, args.seed)
    if args.out:
        save_graph(g, args.out)
    else:
        sys.stdout.write(format_graph(g))
    return 0


def cmd_build(args) -> int:
    g = parse_graph_spec(args.graph, args.graph_seed)
    if args.engine == "const" and args.k < 4:
        raise NotApplicableError(f"engine 'const' needs k >= 4, got {args.k}")
    t0 = time.perf_counter()
    oracle = build_engine(g, args.engine, args.k, args.seed, args.eps, args.blackbox)
    elapsed = time.perf_counter() - t0
    size = archive.save(oracle, args.out, args.seed)
    summary = {"engine": args.engine, "n": g.n, "m": g.m, "k": args.k, "seed": args.seed,
               "bunch_total": oracle.bunches.total_size(), "archive_bytes": size,
               "build_seconds": round(elapsed, 4)}
    if args.engine == "const":
        summary.update(eps=args.eps, blackbox=args.blackbox, **oracle.stats())
    print(json.dumps(summary))
    return 0


def _read_pairs(path: str, n: int) -> list[tuple[int, int]]:
    pairs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                u, v = (int(x) for x in parts)
            except ValueError:
                raise CLIError(f"{path}:{lineno}: expected 'u v', got {line!r}") from None
            for x in (u, v):
                if not 0 <= x < n:
                    raise CLIError(f"{path}:{lineno}: vertex {x} out of range [0, {n})")
            pairs.append((u, v))
    return pairs


def cmd_query(args) -> int:
    oracle, _ = archive.load(args.archive)
    n = oracle.graph.n
    if args.pairs == "all-pairs":
        pairs = [(u, v) for u in range(n) for v in range(n)]
    else:
        pairs = _read_pairs(args.pairs, n)
    exact_rows: dict[int, list[float]] = {}
    out = sys.stdout
    for u, v in pairs:
        tr = QueryTrace()
        est = oracle.query(u, v, tr)
        rec = {"u": u, "v": v, "estimate": est, "probes": tr.probes, "steps": tr.steps}
        if args.exact_check:
            if u not in exact_rows:
                exact_rows[u] = dijkstra_from(oracle.graph, u)
            d = exact_rows[u][v]
            rec["exact"] = d
            rec["stretch"] = est / d if d > 0 else None
        out.write(json.dumps(rec) + "\n")
    return 0


def cmd_bench(args) -> int:
    configs = expand_configs(args.graph, _str_list(args.engine), _int_list(args.k), _float_list(args.eps),
                             _str_list(args.blackbox), _int_list(args.seed), args.sample, args.graph_seed)
    rows = run_bench(configs, args.jobs)
    for row in rows:
        print(json.dumps({k: (None if isinstance(x, float) and math.isnan(x) else x)
                          for k, x in asdict(row).items()}))
    if args.csv:
        write_csv(rows, args.csv)
    bad = [r for r in rows if r.status == "VIOLATION"]
    if bad:
        print(f"stretch ceiling violated in {len(bad)} configuration(s)", file=sys.stderr)
        return 1
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distoracle", description="Approximate distance oracles")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a generated graph in text format")
    gen.add_argument("--model", choices=("gnm", "grid", "path"), default="gnm")
    gen.add_argument("--n", type=int, default=0)
    gen.add_argument("--m", type=int, default=0)
    gen.add_argument("--rows", type=int, default=0)
    gen.add_argument("--cols", type=int, default=0)
    gen.add_argument("--weights", default="1,100", help="lo,hi uniform weight range")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    b = sub.add_parser("build", help="build an oracle and write an archive")
    b.add_argument("--graph", required=True, help="graph file or gnm:n:m / grid:r:c / path:n")
    b.add_argument("--graph-seed", type=int, default=0)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--eps", type=float, default=1.0)
    b.add_argument("--engine", choices=("tz", "logk", "const"), default="tz")
    b.add_argument("--blackbox", default="rounded", help="rounded | inflated:<beta> (beta may be e.g. 64k)")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="answer pairs from an archive as JSON lines")
    q.add_argument("archive")
    q.add_argument("--pairs", default="all-pairs", help="file with one 'u v' per line, or all-pairs")
    q.add_argument("--exact-check", action="store_true")
    q.set_defaults(func=cmd_query)

    be = sub.add_parser("bench", help="stretch and probe statistics over configurations")
    be.add_argument("--graph", default="gnm:256:2048")
    be.add_argument("--graph-seed", type=int, default=0)
    be.add_argument("--k", default="2,3,5")
    be.add_argument("--eps", default="1")
    be.add_argument("--engine", default="tz,logk")
    be.add_argument("--blackbox", default="rounded")
    be.add_argument("--seed", default="0")
    be.add_argument("--sample", type=int, default=10000)
    be.add_argument("--jobs", type=int, default=1)
    be.add_argument("--csv")
    be.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, GraphError, NotApplicableError, archive.ArchiveError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
