"""Show how the defect parameter lifts the flat-space oscillator degeneracy.

In flat space E = omega (2k + l + 3/2), so levels with equal 2k + l coincide.
For alpha < 1 the effective index j = sqrt(l'^2/alpha^2 + l'/alpha^2 + 1/4)
no longer grows by 1 per unit of l and the shells split.

Usage: python scripts/degeneracy_scan.py [--alpha 0.6] [--phi 0.0]
"""

import argparse

from monopole_qes.model import DefectGeometry, FluxField, PotentialSpec
from monopole_qes.oracle import solve_radial_spectrum


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=0.6)
    parser.add_argument("--phi", type=float, default=0.0)
    args = parser.parse_args()

    spec = PotentialSpec.pseudoharmonic(0.5)  # omega = 1
    flux = FluxField(args.phi)
    levels = {}
    for alpha in (1.0, args.alpha):
        for l in range(4):
            levels[alpha, l] = solve_radial_spectrum(spec, DefectGeometry(alpha), l, flux, count=2).energies
    print(f"{'shell':>5} {'k':>3} {'l':>3} {'E(alpha=1)':>12} {f'E(alpha={args.alpha:g})':>14}")
    for shell in range(4):
        for l in range(shell % 2, shell + 1, 2):
            k = (shell - l) // 2
            flat, curved = levels[1.0, l][k], levels[args.alpha, l][k]
            print(f"{shell:>5} {k:>3} {l:>3} {flat:>12.6f} {curved:>14.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
