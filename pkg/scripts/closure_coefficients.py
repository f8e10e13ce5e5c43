"""c, c_tilde, lambda, gamma and theta_c against density for n = 2, 3, 4."""

import argparse
from pathlib import Path

import numpy as np

from align_kinetics.gci import coefficient_arrays
from align_kinetics.tables import emit_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--factor", type=float, default=10.0, help="sweep rho over (n, factor * n]")
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--N", type=int, default=3000)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for n in (2, 3, 4):
        rho = np.linspace(n, args.factor * n, args.steps + 1)[1:]
        d = coefficient_arrays(n, rho, args.N)
        rows = zip(d["rho"], d["kappa"], d["c"], d["c_tilde"], d["lam"], d["gamma"], d["theta_c"])
        path = emit_table(
            rows,
            ("rho", "kappa", "c", "c_tilde", "lambda", "gamma", "theta_c"),
            args.out_dir / f"coefficients_n{n}.csv",
            comment=f"closure coefficients, n={n}, N={args.N}",
        )
        print(f"n={n}: max lambda = {d['lam'].max():.3e}, wrote {path}")


if __name__ == "__main__":
    main()
