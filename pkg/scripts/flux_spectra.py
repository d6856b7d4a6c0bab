"""Output photon-flux density across frequency for several couplings.

Writes one table per coupling on the resonant drive, plus a detuned-drive
spectrum showing the split peaks at omega_tilde and omega_d - omega_tilde.
"""

import numpy as np

from _common import parser, resonant, save
from vacrad.correlators import auto_order, flux_density
from vacrad.model import ModelParams

GAMMA, EPS = 3e-2, 5 / 3 * 1e-2


def main():
    args = parser(__doc__).parse_args()
    for eta in (0.5, 0.8, 0.95, 0.99):
        p = resonant(GAMMA, eta, EPS)
        w = np.linspace(0.002, 2.5, 1250) * p.omega_d
        n = flux_density(p, w)
        save(args.out, f"flux_density_eta{eta}.csv", ["omega_over_omega_d", "n_out"],
             [[float(a / p.omega_d), float(b)] for a, b in zip(w, n)], eta_over_eta_c=eta, n_harmonics=p.n_harmonics)

    for drive in (1.1, 1.3):
        p = ModelParams.from_ratios(gamma_over_omega_a=GAMMA, eta_over_eta_c=0.8, epsilon_over_gamma=EPS, omega_d=drive)
        p = p.replace(n_harmonics=auto_order(p))
        w = np.linspace(0.002, 0.998, 800) * p.omega_d
        save(args.out, f"flux_density_detuned_wd{drive}.csv", ["omega_over_omega_d", "n_out"],
             [[float(a / p.omega_d), float(b)] for a, b in zip(w, flux_density(p, w))], omega_d=drive)


if __name__ == "__main__":
    main()
