"""Label the (rho, theta) plane by the macroscopic model that applies."""

import argparse
from collections import Counter
from pathlib import Path

from align_kinetics.macro import region_map
from align_kinetics.tables import emit_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--rho-max", type=float, default=10.0)
    ap.add_argument("--cells", type=int, default=100)
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--out", type=Path, default=Path("results/regime_map.csv"))
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    m = region_map(args.n, (0.0, args.rho_max), eps=args.eps, rho_cells=args.cells, theta_cells=args.cells)
    emit_table(m.rows(), ("rho", "theta", "label"), args.out, comment=f"macroscopic regimes, n={args.n}, eps={args.eps:g}")
    counts = Counter(label for _, _, label in m.rows())
    for label, k in sorted(counts.items()):
        print(f"{label:24s} {k}")


if __name__ == "__main__":
    main()
