"""Series truncation error against the finite-difference reference.

Shows the order-p error falling with eps and the reference converging with
grid refinement.

    python scripts/oracle_convergence.py --theta 0.3
"""
import argparse

import numpy as np

from dnobloch import (BathymetryProfile, FourierField, OracleResolution, Truncation,
                      apply_dno_oracle, assemble_G_theta)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--profile", default="cosx")
    ap.add_argument("--theta", type=float, default=0.3)
    ap.add_argument("--N", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--fine", action="store_true", help="also run the 256 x 96 grid")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    m = np.arange(-args.N, args.N + 1)
    psi = (rng.normal(size=m.size) + 1j * rng.normal(size=m.size)) * np.exp(-np.abs(m))
    grids = [(64, 24), (128, 48)] + ([(256, 96)] if args.fine else [])

    for eps in (0.025, 0.05, 0.1):
        prof = BathymetryProfile.preset(args.profile, eps=eps)
        print(f"eps = {eps}")
        for nx, ns in grids:
            ref = apply_dno_oracle(prof, args.theta, FourierField(psi), OracleResolution(nx, ns)).coeffs
            errs = []
            for order in range(1, 5):
                G = assemble_G_theta(prof, args.theta, Truncation(args.N), order)
                errs.append(np.linalg.norm(G @ psi - ref) / np.linalg.norm(ref))
            print(f"  grid {nx:>3} x {ns:<3} " + "  ".join(f"p{p + 1}: {e:.2e}" for p, e in enumerate(errs)))


if __name__ == "__main__":
    main()
