"""Far fields of a single ring for L = 0, 1, 2 and the bare-disk reference.

Writes one ``farfield_L<k>.csv`` per ring, an ``eta2_vs_na.csv`` table and
prints the collection efficiency at NA = 0.6.
"""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from diskcouple.efficiency import cone_fraction, eta2, upward_fraction
from diskcouple.farfield import AngularGrid, GratingDesign, GratingRing, far_field_sum, polarizability_from_hole
from diskcouple.modes import resonant_mode


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/farfield")
    parser.add_argument("--P", type=int, default=13)
    parser.add_argument("--hole-radius-nm", type=float, default=30.0)
    parser.add_argument("--grid", default="181x360")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lam, n = 637e-9, 2.41
    mode = resonant_mode(args.P, lam, 0.57 * lam / n)
    A = polarizability_from_hole(args.hole_radius_nm * 1e-9, mode.geometry.h, n)
    grid = AngularGrid.parse(args.grid)
    print(f"R = {mode.geometry.R * 1e9:.1f} nm, rim n_eff = {mode.n_eff:.4f}, ring at r_peak = {mode.r_peak * 1e9:.1f} nm")

    nas = np.arange(1, 101) / 100
    curves = {}
    for L in (0, 1, 2):
        ff = far_field_sum(mode, GratingDesign((GratingRing(args.P - L, mode.r_peak, A),)), grid)
        th, ps = np.meshgrid(ff.theta_grid, ff.psi_grid, indexing="ij")
        with open(out / f"farfield_L{L}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta_rad", "psi_rad", "intensity"])
            w.writerows(zip(th.ravel(), ps.ravel(), ff.intensity.ravel()))
        curves[L] = [cone_fraction(ff, math.asin(na)) for na in nas]
        I = ff.intensity
        print(f"L={L}: eta2(0.6) = {eta2(ff, 0.6):.4f}  I(0)/max = {I[0, 0] / I.max():.3g}  "
              f"upward = {upward_fraction(ff):.3f}")

    with open(out / "eta2_vs_na.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["na", "L0", "L1", "L2"])
        w.writerows(zip(nas, curves[0], curves[1], curves[2]))


if __name__ == "__main__":
    main()
