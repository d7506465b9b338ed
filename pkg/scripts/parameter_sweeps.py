"""One-parameter sweeps around a design vector (default: the reference optimum).

Writes ``sweep_<param>.csv`` with columns ``value,eta1,eta2,eta``.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from diskcouple.optimize import REFERENCE_VECTOR, DesignContext, DesignVector, parameter_sweep

RANGES = {"r1": (0.02, 0.3), "t1": (0.02, None), "s1": (2.0, 3.2), "r2": (0.02, 0.3), "t2": (0.02, None),
          "s2": (0.3, 2.0), "h": (0.4, 0.8)}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/sweeps")
    parser.add_argument("--P", type=int, default=13)
    parser.add_argument("--num", type=int, default=41)
    parser.add_argument("--params", default="r1,t1,s1,r2,t2,s2")
    parser.add_argument("--vector", help="comma-separated h,r1,s1,t1,r2,s2,t2")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    vec = DesignVector.from_array(args.vector.split(",")) if args.vector else REFERENCE_VECTOR
    ctx = DesignContext()
    for name in args.params.split(","):
        lo, hi = RANGES[name]
        rows = parameter_sweep(vec, name, np.linspace(lo, vec.h if hi is None else hi, args.num), args.P, ctx)
        with open(out / f"sweep_{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["value", "eta1", "eta2", "eta"])
            w.writerows(rows)
        eta = np.array([r[3] for r in rows])
        i = int(np.nanargmax(eta))
        print(f"{name}: max eta {eta[i]:.4f} at {rows[i][0]:.3f} (nominal {getattr(vec, name):.3f})")


if __name__ == "__main__":
    main()
