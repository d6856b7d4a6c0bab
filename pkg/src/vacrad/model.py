"""Physical parameters and the scalar functions every other module builds on.

All frequencies are angular frequencies in a common unit; the toolkit works
with ``omega_a = 1`` internally and only converts to physical units on output.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError, SupercriticalError, ValidationError

# exp(x) - 1 overflows near x = 709; the Bose factor is below 1e-300 there anyway
_BOSE_CUTOFF = 700.0


@dataclass(frozen=True)
class ModelParams:
    """Full physical configuration of the modulated mode.

    The coupling is ``eta(t) = eta0 + epsilon * cos(omega_d * t)``.
    Construction does not validate; call :func:`validate` where the
    invariants matter (the stability classifier deliberately accepts
    supercritical points).
    """

    omega_a: float = 1.0
    eta0: float = 0.0
    epsilon: float = 0.0
    omega_d: float = 1.0
    gamma: float = 0.0
    omega_th: float = 0.0
    n_harmonics: int = 1

    @classmethod
    def from_ratios(
        cls,
        *,
        gamma_over_omega_a: float,
        eta_over_eta_c: float,
        epsilon_over_gamma: float = 0.0,
        omega_d: float | str = "resonant",
        omega_th_over_omega_a: float = 0.0,
        n_harmonics: int = 1,
        omega_a: float = 1.0,
    ) -> "ModelParams":
        """Build parameters from dimensionless ratios (the usual way runs are specified).

        ``omega_d`` is either a number (in units of ``omega_a``), ``"resonant"``
        (``omega_d = 2 * omega_tilde``) or ``"resonant:n"`` (``n * omega_d = 2 * omega_tilde``).
        """
        gamma = gamma_over_omega_a * omega_a
        eta0 = eta_over_eta_c * critical_coupling(omega_a)
        if isinstance(omega_d, str):
            drive = resonant_drive(omega_a, eta0, _parse_resonant(omega_d))
        else:
            drive = float(omega_d) * omega_a
        return cls(
            omega_a=omega_a,
            eta0=eta0,
            epsilon=epsilon_over_gamma * gamma,
            omega_d=drive,
            gamma=gamma,
            omega_th=omega_th_over_omega_a * omega_a,
            n_harmonics=int(n_harmonics),
        )

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    @property
    def eta_c(self) -> float:
        return critical_coupling(self.omega_a)

    @property
    def omega_tilde_sq(self) -> float:
        """Squared closed-system frequency; negative above the critical point."""
        return self.omega_a**2 - 4.0 * self.eta0 * self.omega_a


@dataclass(frozen=True)
class DerivedQuantities:
    eta_c: float
    omega_tilde: float
    coupling_ratio: float


def _parse_resonant(token: str) -> int:
    token = token.strip().lower()
    if token == "resonant":
        return 1
    head, sep, tail = token.partition(":")
    if head != "resonant" or not sep:
        raise InvalidParameterError(f"unrecognised drive token {token!r}")
    try:
        order = int(tail)
    except ValueError:
        raise InvalidParameterError(f"unrecognised drive token {token!r}") from None
    if order < 1:
        raise InvalidParameterError(f"resonance order must be >= 1, got {order}")
    return order


def critical_coupling(omega_a: float) -> float:
    """Coupling at which the closed-system frequency softens to zero."""
    if not omega_a > 0:
        raise InvalidParameterError(f"omega_a must be positive, got {omega_a}")
    return omega_a / 4.0


def effective_frequency(params: ModelParams) -> float:
    """Closed-system eigenfrequency ``sqrt(omega_a**2 - 4 eta0 omega_a)``."""
    if params.eta0 > critical_coupling(params.omega_a):
        raise SupercriticalError(
            f"eta0 = {params.eta0} exceeds the critical coupling {params.eta_c}"
        )
    return float(np.sqrt(params.omega_tilde_sq))


def resonant_drive(omega_a: float, eta0: float, order: int = 1) -> float:
    """Drive frequency satisfying ``order * omega_d = 2 * omega_tilde``."""
    wt = effective_frequency(ModelParams(omega_a=omega_a, eta0=eta0))
    if wt == 0.0:
        raise SupercriticalError("no resonant drive exists at the critical point")
    return 2.0 * wt / order


def derived(params: ModelParams) -> DerivedQuantities:
    eta_c = critical_coupling(params.omega_a)
    return DerivedQuantities(
        eta_c=eta_c,
        omega_tilde=effective_frequency(params),
        coupling_ratio=params.eta0 / eta_c,
    )


def char_poly(params: ModelParams, omega):
    """Characteristic polynomial ``D(w) = w**2 + i gamma w - omega_tilde**2``.

    Accepts scalars or arrays. Uses the signed ``omega_tilde**2`` so it stays
    defined above the critical point.
    """
    omega = np.asarray(omega, dtype=float)
    out = omega**2 - params.omega_tilde_sq + 1j * params.gamma * omega
    return out if out.ndim else complex(out)


def thermal_occupation(omega, omega_th: float):
    """Bose-Einstein occupation ``1 / (exp(w / w_th) - 1)`` of an input mode.

    Zero temperature (``omega_th == 0``) returns zeros. Only positive
    frequencies are accepted.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("thermal occupation is only defined for positive frequencies")
    if omega_th < 0:
        raise InvalidParameterError(f"omega_th must be non-negative, got {omega_th}")
    if omega_th == 0:
        out = np.zeros_like(w)
    else:
        out = np.zeros_like(w)
        ok = w <= _BOSE_CUTOFF * omega_th  # avoids forming w / omega_th when it overflows
        out[ok] = 1.0 / np.expm1(w[ok] / omega_th)
    return out if out.ndim else float(out)


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises :class:`ValidationError` listing every violated constraint.
    """
    bad = []
    p = params
    if not p.omega_a > 0:
        bad.append(("omega_a", f"must be > 0, got {p.omega_a}"))
    if not p.gamma >= 0:
        bad.append(("gamma", f"must be >= 0, got {p.gamma}"))
    if not p.epsilon >= 0:
        bad.append(("epsilon", f"must be >= 0, got {p.epsilon}"))
    if not p.omega_d > 0:
        bad.append(("omega_d", f"drive frequency must be > 0, got {p.omega_d}"))
    if not p.omega_th >= 0:
        bad.append(("omega_th", f"must be >= 0, got {p.omega_th}"))
    if not (isinstance(p.n_harmonics, (int, np.integer)) and p.n_harmonics >= 1):
        bad.append(("n_harmonics", f"must be an integer >= 1, got {p.n_harmonics!r}"))
    if p.omega_a > 0:
        eta_c = p.omega_a / 4.0
        if not p.eta0 + p.epsilon < eta_c:
            bad.append((
                "eta0+epsilon",
                f"modulation crosses the critical point: {p.eta0 + p.epsilon} >= eta_c = {eta_c}",
            ))
    if bad:
        raise ValidationError(bad)
    return params


def physical_scale(omega_a_phys: float, unit: str = "rad/s") -> float:
    """Angular frequency in rad/s represented by ``omega_a = 1``.

    ``unit="rad/s"`` reads ``omega_a_phys`` as an angular frequency,
    ``unit="Hz"`` as an ordinary one (multiplied by ``2 pi``).
    """
    if not omega_a_phys > 0:
        raise InvalidParameterError(f"physical omega_a must be positive, got {omega_a_phys}")
    if unit == "rad/s":
        return float(omega_a_phys)
    if unit == "Hz":
        return float(2.0 * np.pi * omega_a_phys)
    raise InvalidParameterError(f"unit must be 'rad/s' or 'Hz', got {unit!r}")
