"""Particle-swarm optimisation for every resonant order in a range.

Writes ``per_P.csv`` and one convergence trace per order.
"""

import argparse
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from diskcouple.farfield import AngularGrid
from diskcouple.optimize import REFERENCE_VECTOR, DesignContext, PsoConfig, evaluate_vector, optimize_over_P


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/optimize")
    parser.add_argument("--P-min", type=int, default=9)
    parser.add_argument("--P-max", type=int, default=16)
    parser.add_argument("--swarm", type=int, default=40)
    parser.add_argument("--iterations", type=int, default=200)
    parser.add_argument("--grid", default="61x72", help="coarse grid for the search")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ctx = DesignContext(grid=AngularGrid.parse(args.grid))
    config = PsoConfig(swarm_size=args.swarm, iterations=args.iterations, seed=args.seed)
    Ps = range(args.P_min, args.P_max + 1)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results, best_P = optimize_over_P(Ps, None, config, ctx, [REFERENCE_VECTOR],
                                              map_fn=lambda f, xs: pool.map(f, xs, chunksize=4))
    else:
        results, best_P = optimize_over_P(Ps, None, config, ctx, [REFERENCE_VECTOR])

    with open(out / "per_P.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["P", "best_eta", *REFERENCE_VECTOR.names()])
        for r in results:
            w.writerow([r.P, r.best_eta, *r.best_vector.to_array()])
            with open(out / f"trace_P{r.P}.csv", "w", newline="") as tf:
                tw = csv.writer(tf)
                tw.writerow(["iteration", "best_eta"])
                tw.writerows(enumerate(r.trace))
            print(f"P={r.P:>2}  eta={r.best_eta:.4f}")

    best = next(r for r in results if r.P == best_P)
    # re-score the winner on the default fine grid
    rep = evaluate_vector(best.best_vector, best.P, DesignContext())
    print(f"best P={best.P}: {asdict(best.best_vector)}")
    print(f"fine grid: eta={rep.eta:.4f} eta1={rep.eta1:.4f} eta2={rep.eta2_at_na:.4f} F={rep.F:.1f}")


if __name__ == "__main__":
    main()
