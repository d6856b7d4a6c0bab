"""Two-mode Gaussian description of an output frequency pair.

Modes are ``b+ = c_out(omega)`` and ``b- = c_out(2 Omega - omega)`` with
quadratures ``q = (b + b^dag)/sqrt2`` and ``p = i (b - b^dag)/sqrt2``,
ordered ``(q-, p-, q+, p+)``. Everything reduces to three numbers per pair:
the two photon-flux densities and the symmetrized anomalous amplitude
``A = <b- b+ + b+ b->``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .correlators import SpectrumSeries, anomalous_from, flux_density_from
from .errors import DomainError, InvalidStateError, UndefinedAngleError
from .harmonics import scattering_coefficients
from .model import ModelParams

VACUUM_FLOOR = 0.5 - 1e-12
RADICAND_FLOOR = -1e-12
ANGLE_RTOL = 1e-14


@dataclass(frozen=True)
class PairMoments:
    """Flux densities of both modes and their pair correlations.

    ``ordered`` is ``<b- b+>``, which enters the homodyne spectrum;
    ``anomalous`` is the symmetrized ``<b- b+ + b+ b->`` of the covariance
    matrix. The two agree (``anomalous = 2 ordered``) once the harmonic
    truncation has converged.
    """

    n_minus: float
    n_plus: float
    anomalous: complex
    omega_minus: float
    omega_plus: float
    ordered: complex = None

    def __post_init__(self):
        if self.ordered is None:
            object.__setattr__(self, "ordered", 0.5 * self.anomalous)

    @property
    def noise_floor(self) -> float:
        """``1 + n- + n+``: the angle-independent part of the squeezing spectrum."""
        return 1.0 + self.n_minus + self.n_plus


@dataclass(frozen=True)
class CovMatrix4:
    entries: np.ndarray
    omega_minus: float = float("nan")
    omega_plus: float = float("nan")

    def __post_init__(self):
        v = np.asarray(self.entries, dtype=float)
        if v.shape != (4, 4):
            raise InvalidStateError(f"covariance must be 4x4, got {v.shape}")
        if not np.allclose(v, v.T, rtol=0, atol=1e-12 * max(1.0, np.abs(v).max())):
            raise InvalidStateError("covariance matrix is not symmetric")
        object.__setattr__(self, "entries", 0.5 * (v + v.T))

    @property
    def anomalous(self) -> complex:
        """Recover ``<b- b+ + b+ b->`` from the off-diagonal block."""
        v = self.entries
        return complex(2.0 * v[0, 2], -2.0 * v[0, 3])

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))


@dataclass(frozen=True)
class SqueezeResult:
    spectrum: SpectrumSeries
    theta: float
    theta_opt: float
    s_min: float
    percent: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "percent", 100.0 * (1.0 - self.s_min))


def _pair_frequencies(omega, Omega):
    w_plus = float(omega)
    w_minus = 2.0 * float(Omega) - w_plus
    if not (w_plus > 0 and w_minus > 0):
        raise DomainError("both modes of the pair need positive frequency")
    return w_minus, w_plus


def pair_moments(params: ModelParams, omega: float, Omega: float | None = None, n: int | None = None) -> PairMoments:
    Omega = 0.5 * params.omega_d if Omega is None else Omega
    w_minus, w_plus = _pair_frequencies(omega, Omega)
    k_minus = scattering_coefficients(params, w_minus, n)
    k_plus = scattering_coefficients(params, w_plus, n)
    return PairMoments(
        n_minus=float(flux_density_from(params, k_minus)),
        n_plus=float(flux_density_from(params, k_plus)),
        anomalous=complex(anomalous_from(params, k_minus, k_plus, symmetric=True)),
        omega_minus=w_minus,
        omega_plus=w_plus,
        ordered=complex(anomalous_from(params, k_minus, k_plus)),
    )


def covariance_from_moments(m: PairMoments) -> CovMatrix4:
    s_minus = 1.0 + 2.0 * m.n_minus
    s_plus = 1.0 + 2.0 * m.n_plus
    a, b = m.anomalous.real, m.anomalous.imag
    v = 0.5 * np.array([
        [s_minus, 0.0, a, -b],
        [0.0, s_minus, -b, -a],
        [a, -b, s_plus, 0.0],
        [-b, -a, 0.0, s_plus],
    ])
    return CovMatrix4(v, m.omega_minus, m.omega_plus)


def covariance_matrix(params: ModelParams, omega: float, Omega: float | None = None, n: int | None = None) -> CovMatrix4:
    """Symmetrized covariance of ``(q-, p-, q+, p+)``; ``Omega`` defaults to ``omega_d / 2``."""
    return covariance_from_moments(pair_moments(params, omega, Omega, n))


def _spectrum_at(m: PairMoments, theta):
    return m.noise_floor + 2.0 * np.real(np.exp(2j * np.asarray(theta)) * m.ordered)


def optimal_angle(source) -> float:
    """Squeezing-optimal homodyne angle in ``(-pi/2, pi/2]``.

    ``source`` is a :class:`PairMoments` or :class:`CovMatrix4`. The arctan
    branch is picked by evaluating the spectrum at both candidates.
    """
    if isinstance(source, CovMatrix4):
        amp = source.anomalous
        scale = float(np.trace(source.entries))
    else:
        amp = 2.0 * source.ordered
        scale = 2.0 * source.noise_floor
    if abs(amp) <= ANGLE_RTOL * scale:
        raise UndefinedAngleError("anomalous amplitude vanishes; no squeezing angle")
    base = 0.5 * np.arctan2(-amp.imag, amp.real)  # maximises Re(e^{2i theta} A)
    candidates = []
    for t in (base, base + 0.5 * np.pi):
        t = (t + 0.5 * np.pi) % np.pi - 0.5 * np.pi
        if t <= -0.5 * np.pi:
            t += np.pi
        candidates.append(t)
    values = [np.real(np.exp(2j * t) * amp) for t in candidates]
    return float(candidates[int(np.argmin(values))])


def squeezing_spectrum(params: ModelParams, delta_omega, theta="opt", Omega: float | None = None, n: int | None = None):
    """Normalized quadrature noise ``S(delta_omega)``: 1 for vacuum, 0 for perfect squeezing.

    ``theta="opt"`` uses the optimal angle at each detuning.
    """
    Omega = 0.5 * params.omega_d if Omega is None else Omega
    deltas = np.atleast_1d(np.asarray(delta_omega, dtype=float))
    out = np.empty(deltas.shape)
    for i, d in enumerate(deltas):
        m = pair_moments(params, Omega + d, Omega, n)
        if isinstance(theta, str):
            if theta != "opt":
                raise ValueError(f"theta must be a number or 'opt', got {theta!r}")
            try:
                t = optimal_angle(m)
            except UndefinedAngleError:
                t = 0.0
        else:
            t = float(theta)
        out[i] = _spectrum_at(m, t)
    if np.any(out < RADICAND_FLOOR):
        raise InvalidStateError(f"negative squeezing spectrum {out.min()}")
    return out if np.ndim(delta_omega) else float(out[0])


def squeeze_scan(params: ModelParams, deltas, theta=None, Omega: float | None = None, n: int | None = None) -> SqueezeResult:
    """Spectrum over ``deltas`` at one fixed angle (default: optimum at the smallest ``|delta|``)."""
    deltas = np.asarray(deltas, dtype=float)
    Omega = 0.5 * params.omega_d if Omega is None else Omega
    d0 = deltas[np.argmin(np.abs(deltas))]
    try:
        t_opt = optimal_angle(pair_moments(params, Omega + d0, Omega, n))
    except UndefinedAngleError:
        t_opt = float("nan")
    t = t_opt if theta is None else float(theta)
    values = squeezing_spectrum(params, deltas, 0.0 if np.isnan(t) else t, Omega, n)
    spec = SpectrumSeries(deltas, np.atleast_1d(values), {"observable": "S", "theta": t})
    return SqueezeResult(spectrum=spec, theta=t, theta_opt=t_opt, s_min=float(np.min(values)))


# --------------------------------------------------------------------------
# state-level quantities
# --------------------------------------------------------------------------

def _check_positive(cov: CovMatrix4):
    try:
        np.linalg.cholesky(cov.entries)
    except np.linalg.LinAlgError:
        raise InvalidStateError("covariance matrix is not positive definite") from None


def wigner_value(cov: CovMatrix4, r) -> float:
    """Zero-mean Gaussian Wigner density at quadrature point(s) ``r`` (last axis of length 4)."""
    _check_positive(cov)
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 4:
        raise ValueError("quadrature vector must have length 4")
    v = cov.entries
    quad = np.einsum("...i,ij,...j->...", r, np.linalg.inv(v), r)
    out = np.exp(-0.5 * quad) / ((2.0 * np.pi) ** 2 * np.sqrt(np.linalg.det(v)))
    return out if out.ndim else float(out)


def partial_transpose_eigenvalue(cov: CovMatrix4) -> float:
    """Smallest symplectic eigenvalue of the partially transposed covariance."""
    # Partial transposition flips p+. The symplectic spectrum is read off the
    # Hermitian matrix sqrt(V) (i Omega) sqrt(V), which stays well conditioned
    # when the two eigenvalues coincide (the closed-form discriminant does not).
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    v = flip @ cov.entries @ flip
    w, u = np.linalg.eigh(v)
    if w[0] <= 0:
        raise InvalidStateError("covariance matrix is not positive definite")
    root = (u * np.sqrt(w)) @ u.T
    omega = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.linalg.eigvalsh(root @ (1j * omega) @ root)
    return float(np.min(np.abs(ev)))


def log_negativity(cov: CovMatrix4) -> float:
    """``max(0, -ln(2 nu-))``, natural logarithm."""
    nu = partial_transpose_eigenvalue(cov)
    if nu == 0.0:
        raise InvalidStateError("vanishing symplectic eigenvalue")
    return max(0.0, -float(np.log(2.0 * nu)))


def tmsv_covariance(r: float, n_thermal: float = 0.0) -> CovMatrix4:
    """Canonical two-mode squeezed (thermal) state with squeezing parameter ``r``."""
    c = 0.5 * (1.0 + 2.0 * n_thermal) * np.cosh(2.0 * r)
    s = 0.5 * (1.0 + 2.0 * n_thermal) * np.sinh(2.0 * r)
    z = np.diag([1.0, -1.0])
    v = np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])
    return CovMatrix4(v)


def rotate_locally(cov: CovMatrix4, phi_minus: float, phi_plus: float = None) -> CovMatrix4:
    """Apply phase-space rotations to each mode (``b -> e^{-i phi} b``)."""
    phi_plus = phi_minus if phi_plus is None else phi_plus

    def rot(p):
        c, s = np.cos(p), np.sin(p)
        return np.array([[c, -s], [s, c]])

    r = np.zeros((4, 4))
    r[:2, :2] = rot(phi_minus)
    r[2:, 2:] = rot(phi_plus)
    return CovMatrix4(r @ cov.entries @ r.T, cov.omega_minus, cov.omega_plus)


def reduced_axis_covariance(cov: CovMatrix4) -> np.ndarray:
    """Covariance of ``(q- + q+, p- + p+)`` divided by 2, the plane of the Wigner projections."""
    proj = np.array([[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]) / np.sqrt(2.0)
    return proj @ cov.entries @ proj.T


def principal_axis_ratio(cov: CovMatrix4) -> float:
    """Ratio of the principal standard deviations of :func:`reduced_axis_covariance`."""
    ev = np.linalg.eigvalsh(reduced_axis_covariance(cov))
    if ev[0] <= 0:
        raise InvalidStateError("reduced covariance is not positive definite")
    return float(np.sqrt(ev[1] / ev[0]))


# --------------------------------------------------------------------------
# nonclassicality witness
# --------------------------------------------------------------------------

def witness_from_moments(m: PairMoments, theta) -> float:
    """Normal-ordered ``<:f^dag f:>`` of the two-mode quadrature combination."""
    return 2.0 * (m.n_minus + m.n_plus) - 2.0 * np.real(np.exp(2j * np.asarray(theta)) * m.anomalous)


def nonclassicality_witness(params: ModelParams, omega: float, Omega: float | None = None, theta="opt", n: int | None = None) -> float:
    """Witness value; negative certifies a nonclassical pair.

    ``theta="opt"`` minimizes over the angle.
    """
    m = pair_moments(params, omega, Omega, n)
    if isinstance(theta, str):
        if theta != "opt":
            raise ValueError(f"theta must be a number or 'opt', got {theta!r}")
        return witness_minimum(m)[0]
    return float(witness_from_moments(m, theta))


def witness_minimum(m: PairMoments) -> tuple[float, float]:
    """Minimum over angles and the minimizing angle in ``(-pi/2, pi/2]``.

    The minimizer is the squeezing-optimal angle shifted by ``pi/2``.
    """
    try:
        t = optimal_angle(m) + 0.5 * np.pi
    except UndefinedAngleError:
        return float(witness_from_moments(m, 0.0)), float("nan")
    if t > 0.5 * np.pi:
        t -= np.pi
    return float(witness_from_moments(m, t)), float(t)


def reduced_wigner(cov: CovMatrix4, lam1, lam2):
    """Wigner marginal in the ``(lambda1, lambda2)`` plane of :func:`reduced_axis_covariance`."""
    c = reduced_axis_covariance(cov)
    if np.linalg.eigvalsh(c)[0] <= 0:
        raise InvalidStateError("reduced covariance is not positive definite")
    x = np.stack(np.broadcast_arrays(np.asarray(lam1, float), np.asarray(lam2, float)), axis=-1)
    quad = np.einsum("...i,ij,...j->...", x, np.linalg.inv(c), x)
    out = np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(np.linalg.det(c)))
    return out if out.ndim else float(out)
