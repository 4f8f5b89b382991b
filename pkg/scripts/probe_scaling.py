"""Maximum probes (+ comb steps) per query as n grows, for the logk and constant-time engines.

The O(log k) and O(1/eps) query bounds predict flat rows.
"""
import argparse
import csv
import sys

from distoracle.bench import build_engine, parse_graph_spec, sample_pairs
from distoracle.graph import build_exact_oracle
from distoracle.tz_core import QueryTrace


def max_ops(oracle, n: int, pairs: int, seed: int) -> tuple[int, float]:
    top, total, count = 0, 0, 0
    for u, v in sample_pairs(n, pairs, seed):
        tr = QueryTrace()
        oracle.query(u, v, tr)
        ops = tr.probes + tr.steps
        top = max(top, ops)
        total += ops
        count += 1
    return top, total / count


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="128,256,512,1024")
    ap.add_argument("--density", type=int, default=8, help="edges per vertex")
    ap.add_argument("--graphs", type=int, default=3, help="graph instances pooled per size")
    ap.add_argument("--pairs", type=int, default=5000)
    ap.add_argument("--csv", default="probe_scaling.csv")
    args = ap.parse_args(argv)

    setups = [("logk", 16, 0.0, ""), ("logk", 32, 0.0, ""), ("const", 6, 0.5, "rounded"),
              ("const", 6, 1.0, "rounded"), ("const", 6, 1.0, "inflated:64k")]
    out = []
    for engine, k, eps, bb in setups:
        for n in (int(x) for x in args.sizes.split(",")):
            top, mean = 0, 0.0
            for gs in range(args.graphs):
                g = parse_graph_spec(f"gnm:{n}:{args.density * n}", 100 + gs)
                exact = build_exact_oracle(g) if engine == "const" else None
                o = build_engine(g, engine, k, gs, eps, bb or "rounded", exact)
                t, m = max_ops(o, n, args.pairs, gs)
                top, mean = max(top, t), mean + m / args.graphs
            row = dict(engine=engine, k=k, eps=eps, blackbox=bb, n=n, max_ops=top, mean_ops=round(mean, 3))
            out.append(row)
            print(row, flush=True)
    with open(args.csv, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(out[0]))
        w.writeheader()
        w.writerows(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
