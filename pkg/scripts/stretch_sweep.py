"""Stretch and probe statistics for every engine over a k grid; writes CSV and JSON lines.

    python3 scripts/stretch_sweep.py --graph gnm:256:2048 --k 2,3,4,5,6,8,16,32 --csv sweep.csv
"""
import argparse
import json
import sys
from dataclasses import asdict

from distoracle.bench import expand_configs, run_bench, write_csv


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", default="gnm:256:2048")
    ap.add_argument("--graph-seed", type=int, default=0)
    ap.add_argument("--k", default="2,3,4,5,6,8,16,32")
    ap.add_argument("--eps", default="0.5,1")
    ap.add_argument("--blackbox", default="rounded,inflated:64k")
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--sample", type=int, default=10000)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--csv", default="stretch_sweep.csv")
    args = ap.parse_args(argv)

    ks = [int(x) for x in args.k.split(",")]
    configs = expand_configs(args.graph, ["tz", "logk", "const"], ks, [float(x) for x in args.eps.split(",")],
                             args.blackbox.split(","), [int(x) for x in args.seeds.split(",")],
                             args.sample, args.graph_seed)
    rows = run_bench(configs, args.jobs)
    for r in rows:
        print(json.dumps({k: v for k, v in asdict(r).items() if k not in ("graph",)}))
    write_csv(rows, args.csv)
    bad = [r for r in rows if r.status == "VIOLATION"]
    print(f"{len(rows)} configurations, {len(bad)} violations, csv -> {args.csv}", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
