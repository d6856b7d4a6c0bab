"""Parametric stability of the mean-field damped Mathieu equation.

    x'' + gamma x' + (omega_tilde**2 - 4 eps omega_a cos(omega_d t)) x = 0

Two independent classifiers are provided: truncated Hill determinants from
harmonic balance (fast, used to trace boundaries) and the Floquet monodromy
over one drive period (the arbiter).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, IntegrationError
from .model import ModelParams

MARGIN_TOL = 1e-9
BISECT_RTOL = 1e-10


@dataclass(frozen=True)
class HillSystem:
    parity: str
    truncation: int
    matrix: np.ndarray
    labels: tuple

    def sign_logdet(self) -> tuple[float, float]:
        return np.linalg.slogdet(self.matrix)


def build_hill(params: ModelParams, parity: str, K: int) -> HillSystem:
    """Harmonic-balance matrix on Fourier coefficients at ``n omega_d / 2``.

    The even system uses ``x = a0/2 + sum a_n cos + b_n sin`` over
    ``n = 2, 4, .., 2K`` (size ``2K + 1``); the odd system uses
    ``n = 1, 3, .., 2K - 1`` (size ``2K``).
    """
    if K < 1:
        raise ValueError(f"truncation K must be >= 1, got {K}")
    w2 = params.omega_tilde_sq
    g = params.gamma
    c = 2.0 * params.epsilon * params.omega_a
    if parity == "even":
        orders = [2 * k for k in range(1, K + 1)]
        labels = ["a0"]
        for n in orders:
            labels += [f"a{n}", f"b{n}"]
    elif parity == "odd":
        orders = [2 * k - 1 for k in range(1, K + 1)]
        labels = []
        for n in orders:
            labels += [f"a{n}", f"b{n}"]
    else:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    idx = {lab: i for i, lab in enumerate(labels)}
    m = np.zeros((len(labels), len(labels)))

    if parity == "even":
        m[0, 0] = w2
        if "a2" in idx:
            m[0, idx["a2"]] = -2.0 * c
    for n in orders:
        wn = 0.5 * n * params.omega_d
        ra, rb = idx[f"a{n}"], idx[f"b{n}"]
        m[ra, ra] = w2 - wn**2
        m[ra, rb] = g * wn
        m[rb, rb] = w2 - wn**2
        m[rb, ra] = -g * wn
        # cos(omega_d t) couples n to n +- 2
        for nb in (n - 2, n + 2):
            if nb == -1:  # a_{-1} = a_1, b_{-1} = -b_1
                m[ra, idx["a1"]] -= c
                m[rb, idx["b1"]] += c
            elif nb == 0:
                m[ra, idx["a0"]] -= c
            elif nb > 0 and f"a{nb}" in idx:
                m[ra, idx[f"a{nb}"]] -= c
                m[rb, idx[f"b{nb}"]] -= c
    return HillSystem(parity, K, m, tuple(labels))


def hill_determinant(params: ModelParams, parity: str, K: int) -> float:
    """Sign-carrying determinant, returned as ``sign * exp(min(logdet, 700))``."""
    s, ld = build_hill(params, parity, K).sign_logdet()
    return float(s * np.exp(min(ld, 700.0)))


def hill_sign(params: ModelParams, parity: str, K: int) -> float:
    return float(build_hill(params, parity, K).sign_logdet()[0])


def default_hill_order(params: ModelParams) -> int:
    """Enough harmonic pairs to cover every resonance ``n omega_d = 2 omega_tilde`` with margin."""
    wt = np.sqrt(max(params.omega_tilde_sq, 0.0))
    n_res = int(np.ceil(2.0 * wt / params.omega_d)) if params.omega_d > 0 else 1
    return max(4, n_res + 4)


@dataclass(frozen=True)
class BoundaryPoint:
    value: float
    parity: str
    axis: str


def _bisect(f, lo, hi, f_lo, rtol):
    while abs(hi - lo) > rtol * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == f_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_signs(f, grid, rtol):
    signs = [f(x) for x in grid]
    roots = []
    for i in range(len(grid) - 1):
        if signs[i] != signs[i + 1] and signs[i] != 0 and signs[i + 1] != 0:
            roots.append(_bisect(f, grid[i], grid[i + 1], signs[i], rtol))
    return roots


def hill_boundary_scan(
    params: ModelParams,
    axis: str,
    bracket: tuple,
    K: int | str = "auto",
    n_samples: int = 200,
    rtol: float = BISECT_RTOL,
    k_tol: float = 1e-6,
    k_max: int = 256,
) -> list[BoundaryPoint]:
    """Boundaries along ``axis`` ("epsilon", "omega_d" or "eta0") inside ``bracket``.

    Sign changes of the even and odd determinants on a uniform sample are
    refined by bisection. ``K="auto"`` doubles the truncation until every
    boundary moves by less than ``k_tol`` relative.
    """
    grid = np.linspace(bracket[0], bracket[1], n_samples)

    def at(K_):
        pts = []
        for parity in ("even", "odd"):
            f = lambda x, par=parity: hill_sign(params.replace(**{axis: x}), par, K_)
            pts += [BoundaryPoint(r, parity, axis) for r in _scan_signs(f, grid, rtol)]
        return sorted(pts, key=lambda b: b.value)

    if K != "auto":
        return at(int(K))
    K_ = max(default_hill_order(params.replace(**{axis: bracket[1]})), default_hill_order(params.replace(**{axis: bracket[0]})))
    prev = at(K_)
    while True:
        K_ *= 2
        if K_ > k_max:
            raise ConvergenceError(f"Hill boundaries not converged up to K = {k_max}")
        cur = at(K_)
        if len(cur) == len(prev) and all(
            a.parity == b.parity and abs(a.value - b.value) <= k_tol * max(abs(a.value), 1e-300)
            for a, b in zip(cur, prev)
        ):
            return cur
        prev = cur


# --------------------------------------------------------------------------
# Floquet oracle
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FloquetResult:
    stable: bool
    multiplier: float
    margin: float
    marginal: bool
    monodromy: np.ndarray


def floquet_monodromy(params: ModelParams, rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """One-period propagator of ``(x, x')`` with period ``2 pi / omega_d``."""
    w2 = params.omega_tilde_sq
    g = params.gamma
    c = 4.0 * params.epsilon * params.omega_a
    wd = params.omega_d

    def rhs(t, y):
        k = w2 - c * np.cos(wd * t)
        return np.array([y[1], -g * y[1] - k * y[0], y[3], -g * y[3] - k * y[2]])

    period = 2.0 * np.pi / wd
    sol = solve_ivp(rhs, (0.0, period), [1.0, 0.0, 0.0, 1.0], method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"monodromy integration failed: {sol.message}")
    y = sol.y[:, -1]
    return np.array([[y[0], y[2]], [y[1], y[3]]])


def floquet_classify(params: ModelParams, tol: float = MARGIN_TOL) -> FloquetResult:
    """Largest Floquet multiplier magnitude; unstable iff it exceeds ``1 + tol``."""
    m = floquet_monodromy(params)
    mu = float(np.max(np.abs(np.linalg.eigvals(m))))
    margin = mu - 1.0
    return FloquetResult(
        stable=not margin > tol,
        multiplier=mu,
        margin=margin,
        marginal=abs(margin) <= tol,
        monodromy=m,
    )


def floquet_crossings(params: ModelParams, axis: str, bracket: tuple, n_samples: int = 200, rtol: float = BISECT_RTOL) -> list[float]:
    """Points along ``axis`` where the largest multiplier magnitude crosses 1."""
    grid = np.linspace(bracket[0], bracket[1], n_samples)

    def f(x):
        return float(np.sign(floquet_classify(params.replace(**{axis: x})).margin))

    return _scan_signs(f, grid, rtol)


# --------------------------------------------------------------------------
# maps
# --------------------------------------------------------------------------

@dataclass
class StabilityMap:
    omega_d: np.ndarray
    second_axis: str
    second: np.ndarray
    stable: np.ndarray
    margin: np.ndarray
    marginal: np.ndarray

    @property
    def unstable_fraction(self) -> float:
        return float(np.mean(~self.stable))


def stability_map(
    params: ModelParams,
    omega_d_grid,
    second_grid,
    second_axis: str = "eta0",
    threads: int | None = None,
) -> StabilityMap:
    """Floquet classification over ``omega_d`` x (``eta0`` or ``epsilon``)."""
    if second_axis not in ("eta0", "epsilon"):
        raise ValueError("second axis must be 'eta0' or 'epsilon'")
    wd = np.asarray(omega_d_grid, dtype=float)
    sec = np.asarray(second_grid, dtype=float)
    cells = [(i, j) for i in range(len(wd)) for j in range(len(sec))]

    def work(ij):
        i, j = ij
        return floquet_classify(params.replace(omega_d=wd[i], **{second_axis: sec[j]}))

    threads = threads or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(work, cells))
    shape = (len(wd), len(sec))
    stable = np.empty(shape, dtype=bool)
    margin = np.empty(shape)
    marginal = np.empty(shape, dtype=bool)
    for (i, j), r in zip(cells, results):
        stable[i, j], margin[i, j], marginal[i, j] = r.stable, r.margin, r.marginal
    return StabilityMap(wd, second_axis, sec, stable, margin, marginal)
