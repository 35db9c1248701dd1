"""Write the first few bands over theta to CSV for plotting.

    python scripts/band_structure_table.py --profile cosx --eps 0.3 --out bands.csv
"""
import argparse

import numpy as np

from dnobloch import BathymetryProfile, Truncation, band_edges, band_sweep, theta_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--profile", default="cosx", choices=["cosx", "cos2x", "cos13"])
    ap.add_argument("--h", type=float, default=1.0)
    ap.add_argument("--eps", type=float, default=0.3)
    ap.add_argument("--N", type=int, default=32)
    ap.add_argument("--bands", type=int, default=5)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="bands.csv")
    args = ap.parse_args()

    prof = BathymetryProfile.preset(args.profile, args.h, args.eps)
    bs = band_sweep(prof, theta_grid(), Truncation(args.N), n_max=args.bands - 1,
                    workers=args.threads)
    header = "theta," + ",".join(f"lambda_{n}" for n in range(args.bands))
    np.savetxt(args.out, np.column_stack([bs.theta, bs.bands]), delimiter=",",
               header=header, comments="", fmt="%.15e")
    for g in band_edges(bs):
        state = "closed" if g.closed else f"width {g.width:.4e}"
        print(f"gap {g.n}: [{g.lower_edge:.6f}, {g.upper_edge:.6f}] {state}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
