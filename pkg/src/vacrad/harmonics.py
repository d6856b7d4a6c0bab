"""Multi-harmonic scattering coefficients of the modulated mode.

Evaluating the scalar recursion for ``y = (1, 1) v`` at the shifted frequencies
``omega + j omega_d`` (``j = -N..N``) gives a complex-symmetric tridiagonal
system ``T y = y_in`` with diagonal ``-D(omega + j omega_d) / (2 omega_a)`` and
constant off-diagonal ``-epsilon``. The output field at ``omega > 0`` is then

    c_out(omega) = sum_j k_j(omega) c_in(omega + j omega_d)

where a negative channel frequency addresses a creation operator, and

    k_j = delta_j0 - (2 i gamma / D(omega)) sqrt(omega |omega + j omega_d|)
          * [delta_j0 + epsilon (Tinv[+1, j] + Tinv[-1, j])].

Everything here is vectorised over arrays of output frequencies: channel
arrays carry a trailing axis of length ``2N + 1`` indexed by ``j + N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, OutOfRegimeError, SingularSystemError
from .model import ModelParams, char_poly

PIVOT_RTOL = 1e-13
DEFAULT_REL_TOL = 1e-8
DEFAULT_MAX_ORDER = 512


@dataclass(frozen=True)
class TridiagonalSystem:
    """Truncated harmonic system at one or many output frequencies.

    ``diagonal`` has shape ``omega.shape + (2N+1,)``, ordered by ascending
    harmonic shift ``j``.
    """

    omega: np.ndarray
    order: int
    diagonal: np.ndarray
    off_diagonal: float

    @property
    def size(self) -> int:
        return 2 * self.order + 1

    def dense(self) -> np.ndarray:
        n = self.size
        out = np.zeros(self.diagonal.shape + (n,), dtype=complex)
        idx = np.arange(n)
        out[..., idx, idx] = self.diagonal
        out[..., idx[:-1], idx[1:]] = self.off_diagonal
        out[..., idx[1:], idx[:-1]] = self.off_diagonal
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Apply the matrix to ``x`` of shape ``(..., n)`` or ``(..., n, r)``."""
        x = np.asarray(x)
        vec = x.ndim == self.diagonal.ndim
        if vec:
            x = x[..., None]
        y = self.diagonal[..., None] * x
        y[..., 1:, :] += self.off_diagonal * x[..., :-1, :]
        y[..., :-1, :] += self.off_diagonal * x[..., 1:, :]
        return y[..., 0] if vec else y


@dataclass(frozen=True)
class HarmonicCoefficients:
    """Scattering amplitudes ``k_j(omega)`` for ``j = -N..N``."""

    omega: np.ndarray
    order: int
    k: np.ndarray

    def __getitem__(self, j: int) -> np.ndarray:
        if abs(j) > self.order:
            return np.zeros(np.shape(self.omega), dtype=complex)
        return self.k[..., j + self.order]

    @property
    def shifts(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    def channel_frequencies(self, omega_d: float) -> np.ndarray:
        return np.asarray(self.omega)[..., None] + self.shifts * omega_d


def _as_omega(omega) -> np.ndarray:
    return np.asarray(omega, dtype=float)


def _order(params: ModelParams, n: int | None) -> int:
    n = params.n_harmonics if n is None else int(n)
    if n < 1:
        raise ValueError(f"truncation order must be >= 1, got {n}")
    return n


def build_tridiagonal(params: ModelParams, omega, n: int | None = None) -> TridiagonalSystem:
    """Assemble the ``(2N+1)``-dimensional harmonic system at ``omega``."""
    n = _order(params, n)
    w = _as_omega(omega)
    shifts = np.arange(-n, n + 1)
    channels = w[..., None] + shifts * params.omega_d
    D = char_poly(params, channels)
    if params.gamma == 0:
        scale = np.max(np.abs(D), axis=-1, keepdims=True)
        if np.any(np.abs(D) <= PIVOT_RTOL * scale):
            raise SingularSystemError("undamped channel sits on a pole of 1/D")
    return TridiagonalSystem(
        omega=w, order=n, diagonal=-D / (2.0 * params.omega_a), off_diagonal=-params.epsilon
    )


def thomas_solve(lower, diag, upper, rhs, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Tridiagonal elimination, batched over leading axes.

    ``diag`` has shape ``(..., n)``; ``lower``/``upper`` broadcast against
    ``(..., n-1)``; ``rhs`` has shape ``(..., n, r)``. Cost is O(n r) per
    system. A pivot smaller than ``pivot_rtol`` times the largest diagonal
    magnitude raises :class:`SingularSystemError`.
    """
    diag = np.asarray(diag, dtype=complex)
    n = diag.shape[-1]
    lower = np.broadcast_to(np.asarray(lower, dtype=complex), diag.shape[:-1] + (n - 1,))
    upper = np.broadcast_to(np.asarray(upper, dtype=complex), diag.shape[:-1] + (n - 1,))
    rhs = np.asarray(rhs, dtype=complex)
    rhs = np.broadcast_to(rhs, diag.shape + rhs.shape[-1:])

    floor = pivot_rtol * np.max(np.abs(diag), axis=-1)
    cp = np.empty(diag.shape[:-1] + (max(n - 1, 1),), dtype=complex)
    rp = np.empty(rhs.shape, dtype=complex)
    for i in range(n):
        piv = diag[..., i].copy()
        r = rhs[..., i, :].copy()
        if i > 0:
            piv -= lower[..., i - 1] * cp[..., i - 1]
            r -= lower[..., i - 1, None] * rp[..., i - 1, :]
        if np.any(np.abs(piv) <= floor):
            raise SingularSystemError(f"vanishing pivot at row {i} of the harmonic system")
        if i < n - 1:
            cp[..., i] = upper[..., i] / piv
        rp[..., i, :] = r / piv[..., None]
    x = np.empty_like(rp)
    x[..., n - 1, :] = rp[..., n - 1, :]
    for i in range(n - 2, -1, -1):
        x[..., i, :] = rp[..., i, :] - cp[..., i, None] * x[..., i + 1, :]
    return x


def solve_harmonic_response(system: TridiagonalSystem, rhs=None, pivot_rtol: float = PIVOT_RTOL):
    """Solve ``T x = rhs``; with ``rhs=None`` return the full inverse.

    A 1-D ``rhs`` of length ``n`` is one vector shared by every batched
    system; otherwise ``rhs`` has shape ``(..., n, r)`` (r columns). The
    inverse is assembled column by column from unit right-hand sides.
    """
    n = system.size
    if rhs is None:
        rhs = np.eye(n, dtype=complex)
        vec = False
    else:
        rhs = np.asarray(rhs, dtype=complex)
        vec = rhs.ndim == 1
        if vec:
            rhs = rhs[:, None]
    off = system.off_diagonal
    x = thomas_solve(off, system.diagonal, off, rhs, pivot_rtol=pivot_rtol)
    return x[..., 0] if vec else x


def _channel_factor(params: ModelParams, w: np.ndarray, n: int):
    shifts = np.arange(-n, n + 1)
    channels = w[..., None] + shifts * params.omega_d
    return shifts, np.sqrt(w[..., None] * np.abs(channels))


def scattering_coefficients(params: ModelParams, omega, n: int | None = None) -> HarmonicCoefficients:
    """General-``N`` coefficients ``k_j(omega)`` from the tridiagonal inverse."""
    n = _order(params, n)
    w = _as_omega(omega)
    if np.any(~(w > 0)):
        raise DomainError("output frequencies must be positive")
    system = build_tridiagonal(params, w, n)
    # Tinv is symmetric, so rows +-1 equal the columns solved for e_{+-1}
    unit = np.zeros((system.size, 2), dtype=complex)
    unit[n + 1, 0] = 1.0
    unit[n - 1, 1] = 1.0
    cols = solve_harmonic_response(system, unit)
    rows_sum = cols[..., 0] + cols[..., 1]

    shifts, root = _channel_factor(params, w, n)
    delta = (shifts == 0).astype(float)
    D0 = np.asarray(char_poly(params, w))
    pref = (2j * params.gamma / D0)[..., None]
    k = delta - pref * root * (delta + params.epsilon * rows_sum)
    return HarmonicCoefficients(omega=w, order=n, k=k)


def coefficients_from_central_row(params: ModelParams, omega, n: int | None = None) -> HarmonicCoefficients:
    """Same coefficients via ``k_j = delta_j0 + i (gamma/omega_a) sqrt(omega |omega_j|) Tinv[0, j]``.

    Algebraically identical to :func:`scattering_coefficients`; kept as an
    independent assembly route for cross-checks.
    """
    n = _order(params, n)
    w = _as_omega(omega)
    if np.any(~(w > 0)):
        raise DomainError("output frequencies must be positive")
    system = build_tridiagonal(params, w, n)
    unit = np.zeros(system.size, dtype=complex)
    unit[n] = 1.0
    row0 = solve_harmonic_response(system, unit)
    shifts, root = _channel_factor(params, w, n)
    k = (shifts == 0) + 1j * (params.gamma / params.omega_a) * root * row0
    return HarmonicCoefficients(omega=w, order=n, k=k)


def analytic_first_harmonic(params: ModelParams, omega) -> HarmonicCoefficients:
    """Closed-form ``N = 1`` coefficients, valid for ``0 < omega < omega_d``."""
    w = _as_omega(omega)
    if np.any(~(w > 0)) or np.any(~(w < params.omega_d)):
        raise OutOfRegimeError("closed form requires 0 < omega < omega_d")
    wa, eps, wd = params.omega_a, params.epsilon, params.omega_d
    D0 = char_poly(params, w)
    Dp = char_poly(params, w + wd)
    Dm = char_poly(params, w - wd)
    ktilde = (2j * params.gamma * w / D0) / (1.0 - 4.0 * eps**2 * wa**2 * (Dp + Dm) / (D0 * Dp * Dm))
    k = np.stack(
        [
            2.0 * eps * wa * ktilde / Dm * np.sqrt((wd - w) / w),
            1.0 - ktilde,
            2.0 * eps * wa * ktilde / Dp * np.sqrt((w + wd) / w),
        ],
        axis=-1,
    )
    return HarmonicCoefficients(omega=w, order=1, k=k)


def linearized_coefficients(params: ModelParams, omega) -> HarmonicCoefficients:
    """First order in ``epsilon`` of the ``N = 1`` coefficients."""
    w = _as_omega(omega)
    if np.any(~(w > 0)):
        raise DomainError("output frequencies must be positive")
    wa, eps, wd, g = params.omega_a, params.epsilon, params.omega_d, params.gamma
    D0 = char_poly(params, w)
    Dp = char_poly(params, w + wd)
    Dm = char_poly(params, w - wd)
    k = np.stack(
        [
            4j * eps * g * wa * np.sqrt(w * np.abs(wd - w)) / (D0 * Dm),
            1.0 - 2j * g * w / D0,
            4j * eps * g * wa * np.sqrt(w * (w + wd)) / (D0 * Dp),
        ],
        axis=-1,
    )
    return HarmonicCoefficients(omega=w, order=1, k=k)


def _changed(old: HarmonicCoefficients, new: HarmonicCoefficients, rel_tol: float, abs_floor: float) -> bool:
    lo = old.order
    k_new = new.k[..., new.order - lo : new.order + lo + 1]
    diff = np.abs(k_new - old.k)
    scale = np.maximum(np.abs(k_new), abs_floor)
    return bool(np.any(diff > rel_tol * scale))


def converged_coefficients(
    params: ModelParams,
    omega,
    rel_tol: float = DEFAULT_REL_TOL,
    n_start: int = 2,
    n_max: int = DEFAULT_MAX_ORDER,
    abs_floor: float = 1e-14,
) -> tuple[HarmonicCoefficients, int]:
    """Double the truncation until no coefficient moves by more than ``rel_tol``.

    Coefficients smaller than ``abs_floor`` are compared absolutely. Returns
    the coefficients at the smallest order certified by its doubling, and
    that order. Raises :class:`ConvergenceError` past ``n_max``.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    n = n_start
    current = scattering_coefficients(params, omega, n)
    while 2 * n <= n_max:
        finer = scattering_coefficients(params, omega, 2 * n)
        if not _changed(current, finer, rel_tol, abs_floor):
            return current, n
        n, current = 2 * n, finer
    raise ConvergenceError(
        f"harmonic expansion not converged at N = {n} (ceiling {n_max}); "
        "the drive may sit inside an instability region"
    )


def sum_rule_deviation(params: ModelParams, coeffs: HarmonicCoefficients) -> np.ndarray:
    """``sum_annih |k_j|^2 - sum_creat |k_j|^2 - 1`` at each output frequency."""
    nu = coeffs.channel_frequencies(params.omega_d)
    w2 = np.abs(coeffs.k) ** 2
    return np.sum(np.where(nu > 0, w2, 0.0), axis=-1) - np.sum(np.where(nu < 0, w2, 0.0), axis=-1) - 1.0
