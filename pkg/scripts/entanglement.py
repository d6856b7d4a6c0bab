"""Logarithmic negativity and nonclassicality witness against coupling.

Also writes reduced Wigner axes ratios across temperature at a fixed coupling.
"""

import numpy as np

from _common import parser, resonant, save
from vacrad.gaussian import covariance_matrix, log_negativity, nonclassicality_witness, principal_axis_ratio

GAMMA, EPS = 1e-2, 1e-2


def main():
    args = parser(__doc__).parse_args()
    etas = np.concatenate([np.linspace(0.8, 0.99, 20), np.linspace(0.991, 0.9995, 18)])
    rows = []
    for th in (0.0, 0.07, 0.14):
        for eta in etas:
            p = resonant(GAMMA, float(eta), EPS, th=th)
            w = 0.5 * p.omega_d + 1e-7
            rows.append([th, float(eta), log_negativity(covariance_matrix(p, w)), nonclassicality_witness(p, w)])
    save(args.out, "entanglement.csv", ["omega_th_over_omega_a", "eta_over_eta_c", "log_negativity", "witness"],
         rows, log_base="e")

    rows = []
    for th in (0.0, 0.05, 0.1, 0.2, 0.4):
        p = resonant(3e-2, 0.96, 1.67e-2, th=th)
        rows.append([th, principal_axis_ratio(covariance_matrix(p, 0.5 * p.omega_d + 1e-7))])
    save(args.out, "wigner_axis_ratio.csv", ["omega_th_over_omega_a", "axis_ratio"], rows)


if __name__ == "__main__":
    main()
