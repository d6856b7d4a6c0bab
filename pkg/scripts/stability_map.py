"""Floquet stability map near the critical point with Hill-determinant boundaries overlaid."""

import numpy as np

from _common import parser, save
from vacrad.model import ModelParams
from vacrad.stability import hill_boundary_scan, stability_map

GAMMA, EPS = 3e-3, 1 / 30


def main():
    ap = parser(__doc__)
    ap.add_argument("--size", type=int, default=60)
    args = ap.parse_args()
    base = ModelParams.from_ratios(gamma_over_omega_a=GAMMA, eta_over_eta_c=0.999, epsilon_over_gamma=EPS, omega_d=0.1)
    wd = np.linspace(0.01, 0.15, args.size)
    ratios = np.linspace(0.995, 0.9999, args.size)
    smap = stability_map(base, wd, ratios * base.eta_c)
    rows = [[float(a), float(r), int(smap.stable[i, j]), float(smap.margin[i, j])]
            for i, a in enumerate(wd) for j, r in enumerate(ratios)]
    save(args.out, "stability_map.csv", ["omega_d_over_omega_a", "eta_over_eta_c", "stable", "margin"], rows,
         unstable_fraction=smap.unstable_fraction)

    rows = []
    for r in ratios[:: max(1, args.size // 12)]:
        p = base.replace(eta0=float(r) * base.eta_c)
        for b in hill_boundary_scan(p, "omega_d", (wd[0], wd[-1]), n_samples=120):
            rows.append([float(r), b.value, b.parity])
    save(args.out, "stability_hill_boundaries.csv", ["eta_over_eta_c", "omega_d_over_omega_a", "parity"], rows)


if __name__ == "__main__":
    main()
