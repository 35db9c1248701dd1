"""Gap widths versus eps for the three preset bottoms, with log-log fits.

    python scripts/gap_scaling_study.py --h 1.0 --N 24
"""
import argparse

import numpy as np

from dnobloch import BathymetryProfile, Truncation, band_edges, band_sweep, fit_gap_scaling, theta_grid
from dnobloch.perturbation import analytic_gap_formulas
from dnobloch.spectrum import closed_threshold

CASES = [
    ("cosx", 1, "cosx_gap1", [0.005, 0.01, 0.02, 0.04]),
    ("cosx", 2, "cosx_gap2_full", [0.04, 0.06, 0.08, 0.10, 0.12]),
    ("cos13", 2, "cos13_gap2", [0.01, 0.02, 0.04, 0.08]),
    ("cos2x", 1, None, [0.01, 0.02, 0.05]),
    ("cos2x", 2, None, [0.01, 0.02, 0.05, 0.1]),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=1.0)
    ap.add_argument("--N", type=int, default=24)
    ap.add_argument("--theta-points", type=int, default=257)
    args = ap.parse_args()

    thetas = theta_grid(args.theta_points)
    for name, gap, preset, ladder in CASES:
        reps = [band_edges(band_sweep(BathymetryProfile.preset(name, args.h, e), thetas,
                                      Truncation(args.N), n_max=gap + 1))[gap - 1] for e in ladder]
        widths = [r.width for r in reps]
        fit = fit_gap_scaling(ladder, widths, [closed_threshold(r.upper_edge) for r in reps])
        print(f"{name} gap {gap}")
        for e, w in zip(ladder, widths):
            extra = ""
            if preset:
                extra = f"  analytic {analytic_gap_formulas(preset, args.h, e):.6e}"
            print(f"  eps={e:<6g} width={w:.6e}{extra}")
        if fit.closed:
            print("  closed at every eps")
        else:
            print(f"  exponent {fit.exponent:.4f}  coefficient {fit.coefficient:.6g}")


if __name__ == "__main__":
    main()
