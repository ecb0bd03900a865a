"""Shell-by-shell Busemann volumes of standard and bent cusps.

Prints the shell values, consecutive ratios and the flag for each bundled
volume configuration; pass --samples to trade accuracy for speed.
"""

import argparse

import numpy as np

from bending.cusps import CuspLattice, cusp_volume_estimate, standard_shell_exact
from bending.examples import load_example


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=10**6)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    for name in ("volume_standard_d3", "volume_bent_d3", "volume_bent_d2"):
        cfg = load_example(name)
        d = cfg["dimension"]
        lattice = CuspLattice(cfg["kind"], cfg["basis"])
        series = cusp_volume_estimate(cfg["kind"], d, lattice, shells=cfg["shells"],
                                      samples=args.samples, seed=args.seed)
        print(f"\n{name}: flag={series.flag or 'none'}")
        print(f"{'X':>10} {'value':>12} {'stderr':>10} {'ratio':>8} {'exact':>12}")
        ratios = np.concatenate([[np.nan], series.ratios()])
        for X, est, r in zip(series.X, series.estimates, ratios):
            exact = standard_shell_exact(lattice, X) if cfg["kind"] == "standard" else np.nan
            print(f"{X:10.4g} {est.value:12.6g} {est.stderr:10.2g} {r:8.4f} {exact:12.6g}")
        print(f"partial sum {series.partial_sums()[-1]:.6g}")


if __name__ == "__main__":
    main()
