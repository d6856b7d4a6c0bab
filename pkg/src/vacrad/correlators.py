"""Output-field two-point functions under thermal (or vacuum) input.

The frequency-selection filter of the infinite-time power spectrum keeps only
exactly frequency-matched input pairings, so every observable reduces to sums
over harmonic channels:

* ``<c_out^dag(w) c_out(w)>`` pairs channel ``j`` with itself;
* ``<c_out(w1) c_out(w2)>`` pairs channel ``j1`` of ``w1`` with channel ``j2``
  of ``w2`` whenever ``w1 + j1 wd = -(w2 + j2 wd)``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IntegrationError
from .harmonics import HarmonicCoefficients, converged_coefficients, scattering_coefficients
from .model import ModelParams, char_poly, effective_frequency, thermal_occupation

MATCH_TOL = 1e-9
FLUX_FLOOR = -1e-12


@dataclass(frozen=True)
class SpectrumSeries:
    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if len(self.grid) > 1 and np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")


@dataclass(frozen=True)
class PairCorrelation:
    omega1: float
    omega2: float
    harmonic: int
    value: complex


def _occupation(nu: np.ndarray, omega_th: float) -> np.ndarray:
    """Bose factor at ``|nu|``; zero where ``nu == 0`` (those channels carry no amplitude)."""
    a = np.abs(nu)
    out = np.zeros_like(a)
    pos = a > 0
    if np.any(pos):
        out[pos] = thermal_occupation(a[pos], omega_th)
    return out


def channel_weights(params: ModelParams, nu: np.ndarray) -> np.ndarray:
    """Normal-ordered input weight of each channel: ``n`` or ``1 + n``."""
    occ = _occupation(nu, params.omega_th)
    return np.where(nu > 0, occ, np.where(nu < 0, 1.0 + occ, 0.0))


def _coefficients(params: ModelParams, omega, n) -> HarmonicCoefficients:
    return scattering_coefficients(params, omega, n)


def flux_density_from(params: ModelParams, coeffs: HarmonicCoefficients) -> np.ndarray:
    nu = coeffs.channel_frequencies(params.omega_d)
    out = np.sum(np.abs(coeffs.k) ** 2 * channel_weights(params, nu), axis=-1)
    if np.any(out < FLUX_FLOOR):
        raise ArithmeticError(f"flux density negative beyond round-off: {out.min()}")
    return np.maximum(out, 0.0)


def flux_density(params: ModelParams, omega, n: int | None = None):
    """Photon-flux density ``n_out(omega)``; ``n`` defaults to ``params.n_harmonics``."""
    out = flux_density_from(params, _coefficients(params, omega, n))
    return out if np.ndim(out) else float(out)


def linearized_flux_density(params: ModelParams, omega):
    """Zero-temperature vacuum emission to second order in ``epsilon``.

    ``16 eps^2 gamma^2 wa^2 w (wd - w) / (|D(w)|^2 |D(w - wd)|^2)`` for ``0 < w < wd``.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)) or np.any(~(w < params.omega_d)):
        raise DomainError("linearized emission requires 0 < omega < omega_d")
    v = params.omega_d - w
    # |D(w - wd)| = |D(wd - w)| makes the expression manifestly symmetric under w <-> wd - w
    num = 16.0 * params.epsilon**2 * params.gamma**2 * params.omega_a**2 * w * v
    den = np.abs(char_poly(params, w)) ** 2 * np.abs(char_poly(params, v)) ** 2
    out = num / den
    return out if out.ndim else float(out)


def flux_density_spectrum(params: ModelParams, grid, n: int | None = None) -> SpectrumSeries:
    grid = np.asarray(grid, dtype=float)
    values = flux_density(params, grid, n)
    return SpectrumSeries(
        grid=grid,
        values=np.atleast_1d(values),
        meta={"observable": "n_out", "params": params, "n_harmonics": n or params.n_harmonics},
    )


def harmonic_index(params: ModelParams, omega1, omega2, tol: float = MATCH_TOL):
    """Integer ``m`` with ``omega1 + omega2 = m omega_d``, or -1 where none matches."""
    total = np.asarray(omega1, dtype=float) + np.asarray(omega2, dtype=float)
    m = np.rint(total / params.omega_d)
    ok = (np.abs(total - m * params.omega_d) < tol * params.omega_a) & (m >= 1)
    return np.where(ok, m, -1).astype(int)


def anomalous_from(
    params: ModelParams,
    k1: HarmonicCoefficients,
    k2: HarmonicCoefficients,
    symmetric: bool = False,
) -> np.ndarray:
    """Pair correlation from precomputed coefficients at ``omega1`` and ``omega2``.

    With ``symmetric=False`` returns ``<c(w1) c(w2)>``: a pairing contributes
    ``k k (1 + n)`` when the first factor addresses an annihilation channel
    and ``k k n`` when it addresses a creation channel. With
    ``symmetric=True`` returns ``<c(w1) c(w2) + c(w2) c(w1)>``, where every
    pairing carries ``1 + 2 n``.
    """
    if k1.order != k2.order:
        raise ValueError("coefficient sets must share the truncation order")
    n = k1.order
    w1, w2 = np.broadcast_arrays(np.asarray(k1.omega, float), np.asarray(k2.omega, float))
    m = harmonic_index(params, w1, w2)
    shape = w1.shape
    K1 = np.broadcast_to(k1.k, shape + (2 * n + 1,))
    K2 = np.broadcast_to(k2.k, shape + (2 * n + 1,))
    out = np.zeros(shape, dtype=complex)
    for j1 in range(-n, n + 1):
        j2 = -m - j1
        valid = (m >= 1) & (np.abs(j2) <= n)
        if not np.any(valid):
            continue
        j2c = np.clip(j2, -n, n) + n
        a = K1[..., j1 + n]
        b = np.take_along_axis(K2, j2c[..., None], axis=-1)[..., 0]
        nu = w1 + j1 * params.omega_d
        occ = _occupation(nu, params.omega_th)
        if symmetric:
            weight = np.where(nu != 0, 1.0 + 2.0 * occ, 0.0)
        else:
            weight = np.where(nu > 0, 1.0 + occ, np.where(nu < 0, occ, 0.0))
        out += np.where(valid, a * b * weight, 0.0)
    return out


def anomalous_correlator(params: ModelParams, omega1, omega2, n: int | None = None):
    """``<c_out(omega1) c_out(omega2)>``; zero unless ``omega1 + omega2`` is a drive harmonic."""
    w1 = np.asarray(omega1, dtype=float)
    w2 = np.asarray(omega2, dtype=float)
    out = anomalous_from(params, _coefficients(params, w1, n), _coefficients(params, w2, n))
    return out if out.ndim else complex(out)


def pair_correlation(params: ModelParams, omega1: float, omega2: float, n: int | None = None) -> PairCorrelation:
    m = int(harmonic_index(params, omega1, omega2))
    return PairCorrelation(
        omega1=float(omega1),
        omega2=float(omega2),
        harmonic=m,
        value=anomalous_correlator(params, omega1, omega2, n),
    )


def voltage_noise_integrand(params: ModelParams, omega, n: int | None = None):
    """``2 Re <c_out(wd/2 - w) c_out(wd/2 + w)>`` for ``|w| < wd/2``."""
    w = np.asarray(omega, dtype=float)
    half = 0.5 * params.omega_d
    if np.any(~(np.abs(w) < half)):
        raise DomainError("voltage-noise integrand requires |omega| < omega_d / 2")
    out = 2.0 * np.real(anomalous_correlator(params, half - w, half + w, n))
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# total photon flux
# --------------------------------------------------------------------------

_GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


@dataclass
class FluxQuadrature:
    value: float
    error: float
    n_harmonics: int
    panels: list
    window: tuple


def _gl(params, n, a, b):
    """Gauss-Legendre on [a, b] and on its two halves; returns (coarse, fine)."""
    mid = 0.5 * (a + b)
    xs = np.concatenate([
        0.5 * (b - a) * _GL_X + mid,
        0.25 * (b - a) * _GL_X + 0.5 * (a + mid),
        0.25 * (b - a) * _GL_X + 0.5 * (mid + b),
    ])
    f = flux_density_from(params, scattering_coefficients(params, xs, n))
    m = _GL_ORDER
    coarse = 0.5 * (b - a) * np.dot(_GL_W, f[:m])
    fine = 0.25 * (b - a) * (np.dot(_GL_W, f[m : 2 * m]) + np.dot(_GL_W, f[2 * m :]))
    return coarse, fine


def flux_breakpoints(params: ModelParams, lo: float, hi: float, n: int) -> np.ndarray:
    """Panel edges: window ends, channel sign flips, and a width-scaled ladder around resonances."""
    wd = params.omega_d
    wt = effective_frequency(params)
    width = max(params.gamma, 1e-6 * params.omega_a)
    pts = [lo, hi]
    for m in range(0, n + 2):
        pts.append(m * wd)
        for r in (abs(m * wd + wt), abs(m * wd - wt)):
            pts.append(r)
            for s in (1.0, 4.0, 16.0, 64.0):
                pts.extend([r - s * width, r + s * width])
    pts = np.unique(np.asarray(pts))
    return pts[(pts >= lo) & (pts <= hi)]


def flux_quadrature(
    params: ModelParams,
    window: tuple | None = None,
    n: int | None = None,
    rel_tol: float = 1e-8,
    max_panels: int = 20000,
) -> FluxQuadrature:
    """Globally adaptive composite Gauss-Legendre integral of ``n_out``.

    Panels are split (worst error first) until the summed error estimate is
    below ``rel_tol`` times the integral.
    """
    n = params.n_harmonics if n is None else int(n)
    if window is None:
        window = (1e-3 * params.omega_a, (n + 1) * params.omega_d)
    lo, hi = map(float, window)
    if not 0 < lo < hi:
        raise DomainError("integration window must satisfy 0 < omega_min < omega_max")
    edges = flux_breakpoints(params, lo, hi, n)
    heap = []
    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        coarse, fine = _gl(params, n, a, b)
        e = abs(fine - coarse)
        heapq.heappush(heap, (-e, a, b, fine))
        total += fine
        err += e
    while err > rel_tol * abs(total) and err > 1e-300:
        if len(heap) >= max_panels:
            raise IntegrationError(
                f"flux quadrature did not reach rel_tol={rel_tol} within {max_panels} panels"
            )
        neg_e, a, b, val = heapq.heappop(heap)
        total -= val
        err += neg_e
        mid = 0.5 * (a + b)
        for aa, bb in ((a, mid), (mid, b)):
            coarse, fine = _gl(params, n, aa, bb)
            e = abs(fine - coarse)
            heapq.heappush(heap, (-e, aa, bb, fine))
            total += fine
            err += e
    panels = sorted((a, b) for _, a, b, _ in heap)
    return FluxQuadrature(value=total, error=err, n_harmonics=n, panels=panels, window=(lo, hi))


def integrate_on_panels(params: ModelParams, panels, n: int) -> float:
    """Fixed composite rule on given panels (each halved once)."""
    return float(sum(_gl(params, n, a, b)[1] for a, b in panels))


def photon_flux(params: ModelParams, window: tuple | None = None, n: int | None = None, rel_tol: float = 1e-8) -> float:
    """Total emitted photon rate ``N_out = int n_out(w) dw`` in units of ``omega_a``."""
    return flux_quadrature(params, window, n, rel_tol).value


def auto_order(params: ModelParams, probes=None, rel_tol: float = 1e-8, n_max: int = 512) -> int:
    """Converged truncation order over a set of probe frequencies.

    The default probes are half the drive frequency and every resonance
    ``|m wd +- w_tilde|`` below ``8 wd`` together with a few generic points.
    """
    if probes is None:
        wd = params.omega_d
        wt = effective_frequency(params)
        cand = [0.5 * wd, 0.37 * wd, 1.61 * wd]
        for m in range(0, 8):
            cand += [abs(m * wd + wt), abs(m * wd - wt)]
        probes = np.array([c for c in cand if c > 0])
    _, n = converged_coefficients(params, np.asarray(probes, dtype=float), rel_tol=rel_tol, n_max=n_max)
    return n
