"""Squeezing spectra at zero and finite temperature, and peak squeezing vs coupling."""

import numpy as np

from _common import parser, resonant, save
from vacrad.gaussian import squeeze_scan, squeezing_spectrum

GAMMA = 1e-2


def main():
    args = parser(__doc__).parse_args()
    d = np.linspace(-0.05, 0.05, 201)
    rows = []
    for eta in (0.9, 0.95, 0.99, 0.999):
        p = resonant(GAMMA, eta, 1e-2)
        res = squeeze_scan(p, d * p.omega_d)
        rows += [[eta, float(x), float(s)] for x, s in zip(d, res.spectrum.values)]
        print(f"eta/eta_c = {eta}: S_min = {res.s_min:.5f} ({res.percent:.2f}%), theta_opt = {res.theta_opt:.4f}")
    save(args.out, "squeezing_T0.csv", ["eta_over_eta_c", "delta_over_omega_d", "S"], rows)

    rows = []
    for eta in np.linspace(0.9, 0.999, 34):
        for eps in (2.5e-3, 5e-3, 1e-2, 2e-2):
            p = resonant(GAMMA, float(eta), eps)
            s = squeezing_spectrum(p, 1e-7)
            rows.append([float(eta), eps, s, 100 * (1 - s)])
    save(args.out, "squeezing_percent.csv", ["eta_over_eta_c", "epsilon_over_gamma", "S", "percent"], rows)

    rows = []
    for th in (0.0, 0.05, 0.1, 0.2):
        p = resonant(GAMMA, 0.99, 1e-2, th=th)
        s = squeezing_spectrum(p, d * p.omega_d)
        rows += [[th, float(x), float(v)] for x, v in zip(d, s)]
    save(args.out, "squeezing_thermal.csv", ["omega_th_over_omega_a", "delta_over_omega_d", "S"], rows)


if __name__ == "__main__":
    main()
