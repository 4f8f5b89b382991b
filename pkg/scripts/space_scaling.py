"""Mean total bunch size against k n^(1+1/k) over seeds."""
import argparse
import sys

import numpy as np

from distoracle.bench import parse_graph_spec
from distoracle.tz_core import compute_bunches, compute_pivots, sample_levels


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--density", type=int, default=8)
    ap.add_argument("--k", default="2,3,4,5,6,7,8")
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args(argv)

    n = args.n
    print("k,mean_total,k_n_pow,ratio")
    for k in (int(x) for x in args.k.split(",")):
        totals = []
        for seed in range(args.seeds):
            g = parse_graph_spec(f"gnm:{n}:{args.density * n}", seed)
            levels = sample_levels(n, k, seed)
            pivots = compute_pivots(g, levels)
            totals.append(compute_bunches(g, levels, pivots).total_size())
        ref = k * n ** (1 + 1 / k)
        print(f"{k},{np.mean(totals):.1f},{ref:.1f},{np.mean(totals) / ref:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
