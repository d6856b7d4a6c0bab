"""Task implementations behind the command line: one table per task plus a scalar summary."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import correlators, gaussian, stability
from .config import RunConfig
from .errors import NumericalError
from .model import ModelParams, critical_coupling, effective_frequency, physical_scale


class PointError(NumericalError):
    """A numerical failure tagged with the grid point that caused it."""

    def __init__(self, point, cause: Exception):
        self.point = point
        self.cause = cause
        super().__init__(f"at grid point {point}: {type(cause).__name__}: {cause}")


@dataclass
class TaskOutput:
    columns: list
    units: list
    rows: list
    n_harmonics: int | None
    summary: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)


def resolve_order(cfg: RunConfig, params: ModelParams) -> ModelParams:
    n = cfg["model.n_harmonics"]
    if n == "auto":
        n = correlators.auto_order(params)
    return params.replace(n_harmonics=int(n))


def _grid(cfg: RunConfig, default_start: float, default_stop: float) -> np.ndarray:
    start = cfg["grid.start"] if cfg["grid.start"] is not None else default_start
    stop = cfg["grid.stop"] if cfg["grid.stop"] is not None else default_stop
    num = cfg["grid.num"]
    if cfg["grid.scale"] == "log":
        return np.geomspace(start, stop, num)
    return np.linspace(start, stop, num)


def _pointwise(grid, fn):
    out = []
    for x in grid:
        try:
            out.append(fn(x))
        except NumericalError as exc:
            raise PointError(float(x), exc) from exc
    return out


def _detuning_default(p: ModelParams) -> float:
    return min(10.0 * p.gamma, 0.45 * p.omega_d) if p.gamma > 0 else 0.1 * p.omega_d


def task_flux_density(cfg, p):
    grid = _grid(cfg, 1e-3 * p.omega_a, 2.0 * p.omega_d)
    vals = _pointwise(grid, lambda w: correlators.flux_density(p, w))
    cols, units = ["omega_over_omega_a", "n_out"], ["omega_a", "1"]
    rows = [[float(w), float(v)] for w, v in zip(grid, vals)]
    if cfg["output.omega_a"] is not None:
        scale = cfg["output.omega_a"]
        cols.append("omega_phys")
        units.append(cfg["output.unit"])
        rows = [r + [r[0] * scale] for r in rows]
    i = int(np.argmax(vals))
    return TaskOutput(cols, units, rows, p.n_harmonics, {"peak_n_out": float(vals[i]), "omega_at_peak": float(grid[i])})


def task_flux(cfg, p):
    lo = cfg["task.window_min"] if cfg["task.window_min"] is not None else 1e-3 * p.omega_a
    hi = cfg["task.window_max"] if cfg["task.window_max"] is not None else (p.n_harmonics + 1) * p.omega_d
    try:
        q = correlators.flux_quadrature(p, (lo, hi), rel_tol=cfg["task.rel_tol"])
    except NumericalError as exc:
        raise PointError((lo, hi), exc) from exc
    cols = ["window_min", "window_max", "N_out_over_omega_a", "quadrature_error"]
    units = ["omega_a", "omega_a", "1", "1"]
    row = [lo, hi, q.value, q.error]
    summary = {"N_out": q.value}
    if cfg["output.omega_a"] is not None:
        rate = q.value * physical_scale(cfg["output.omega_a"], cfg["output.unit"])
        cols.append("N_out_rate")
        units.append("1/s")
        row.append(rate)
        summary["N_out_rate"] = rate
    return TaskOutput(cols, units, [row], p.n_harmonics, summary)


def task_pair_correlation(cfg, p):
    m = cfg["task.harmonic"]
    total = m * p.omega_d
    grid = _grid(cfg, 0.01 * total, 0.99 * total)
    vals = _pointwise(grid, lambda w: correlators.anomalous_correlator(p, w, total - w))
    rows = [[float(w), float(total - w), v.real, v.imag, abs(v)] for w, v in zip(grid, vals)]
    cols = ["omega1_over_omega_a", "omega2_over_omega_a", "re", "im", "abs"]
    return TaskOutput(cols, ["omega_a", "omega_a", "1", "1", "1"], rows, p.n_harmonics,
                      {"max_abs": float(max(abs(v) for v in vals))})


def task_voltage_noise(cfg, p):
    half = 0.5 * p.omega_d
    grid = _grid(cfg, 1e-3 * half, 0.98 * half)
    vals = _pointwise(grid, lambda w: correlators.voltage_noise_integrand(p, w))
    rows = [[float(w), float(v)] for w, v in zip(grid, vals)]
    return TaskOutput(["omega_over_omega_a", "integrand"], ["omega_a", "1"], rows, p.n_harmonics,
                      {"max_abs": float(np.max(np.abs(vals)))})


def task_squeezing(cfg, p):
    d = _detuning_default(p)
    grid = _grid(cfg, -d, d)
    theta = cfg["task.theta"]
    try:
        res = gaussian.squeeze_scan(p, grid, None if theta == "opt" else float(theta))
    except NumericalError as exc:
        raise PointError("squeezing scan", exc) from exc
    rows = [[float(x), float(v)] for x, v in zip(res.spectrum.grid, res.spectrum.values)]
    return TaskOutput(
        ["delta_omega_over_omega_a", "S"], ["omega_a", "1"], rows, p.n_harmonics,
        {"s_min": res.s_min, "theta": res.theta, "theta_opt": res.theta_opt, "percent": res.percent},
        {"theta": res.theta},
    )


def task_wigner(cfg, p):
    half = 0.5 * p.omega_d
    cov = gaussian.covariance_matrix(p, half + cfg["task.delta"])
    c = gaussian.reduced_axis_covariance(cov)
    span = 4.0 * float(np.sqrt(np.max(np.linalg.eigvalsh(c))))
    grid = _grid(cfg, -span, span)
    rows = []
    for a in grid:
        for b in grid:
            rows.append([float(a), float(b), float(gaussian.reduced_wigner(cov, a, b))])
    return TaskOutput(["lambda1", "lambda2", "W"], ["1", "1", "1"], rows, p.n_harmonics,
                      {"axis_ratio": gaussian.principal_axis_ratio(cov)})


def _pair_scan(cfg, p, fn):
    d = _detuning_default(p)
    half = 0.5 * p.omega_d
    grid = _grid(cfg, 1e-6 * p.omega_a, d)
    return grid, _pointwise(grid, lambda x: fn(gaussian.pair_moments(p, half + x)))


def task_negativity(cfg, p):
    def one(m):
        cov = gaussian.covariance_from_moments(m)
        return gaussian.partial_transpose_eigenvalue(cov), gaussian.log_negativity(cov)

    grid, vals = _pair_scan(cfg, p, one)
    rows = [[float(x), nu, ln] for x, (nu, ln) in zip(grid, vals)]
    return TaskOutput(["delta_omega_over_omega_a", "nu_minus", "log_negativity"], ["omega_a", "1", "1"], rows,
                      p.n_harmonics, {"max_log_negativity": float(max(v[1] for v in vals))}, {"log_base": "e"})


def task_witness(cfg, p):
    def one(m):
        if cfg["task.theta"] == "opt":
            return gaussian.witness_minimum(m)
        t = float(cfg["task.theta"])
        return float(gaussian.witness_from_moments(m, t)), t

    grid, vals = _pair_scan(cfg, p, one)
    rows = [[float(x), w, t] for x, (w, t) in zip(grid, vals)]
    return TaskOutput(["delta_omega_over_omega_a", "witness", "theta"], ["omega_a", "1", "rad"], rows,
                      p.n_harmonics, {"min_witness": float(min(v[0] for v in vals))})


def task_stability(cfg, p, threads=None):
    try:
        wt = effective_frequency(p)
    except Exception:
        wt = 0.0
    wd_default = 2.0 * wt if wt > 0 else 0.1 * p.omega_a
    wd = _grid(cfg, 0.5 * wd_default, 1.5 * wd_default)
    s0 = cfg["grid.second_start"] if cfg["grid.second_start"] is not None else 0.99
    s1 = cfg["grid.second_stop"] if cfg["grid.second_stop"] is not None else 1.0
    ratios = np.linspace(s0, s1, cfg["grid.second_num"])
    eta_c = critical_coupling(p.omega_a)
    smap = stability.stability_map(p, wd, ratios * eta_c, "eta0", threads=threads)
    rows = []
    for i, w in enumerate(wd):
        for j, r in enumerate(ratios):
            rows.append([float(w), float(r), int(smap.stable[i, j]), float(smap.margin[i, j]), int(smap.marginal[i, j])])
    cols = ["omega_d_over_omega_a", "eta_over_eta_c", "stable", "margin", "marginal"]
    return TaskOutput(cols, ["omega_a", "1", "bool", "1", "bool"], rows, None,
                      {"unstable_fraction": smap.unstable_fraction})


TASK_FUNCS = {
    "flux-density": task_flux_density,
    "flux": task_flux,
    "pair-correlation": task_pair_correlation,
    "voltage-noise": task_voltage_noise,
    "squeezing": task_squeezing,
    "wigner": task_wigner,
    "negativity": task_negativity,
    "witness": task_witness,
    "stability": task_stability,
}


def summary_keys(cfg: RunConfig) -> list:
    """Names of the scalar summary fields a task reports (the sweep columns)."""
    keys = {
        "flux-density": ["peak_n_out", "omega_at_peak"],
        "flux": ["N_out"],
        "pair-correlation": ["max_abs"],
        "voltage-noise": ["max_abs"],
        "squeezing": ["s_min", "theta", "theta_opt", "percent"],
        "wigner": ["axis_ratio"],
        "negativity": ["max_log_negativity"],
        "witness": ["min_witness"],
        "stability": ["unstable_fraction"],
    }[cfg["task"]]
    if cfg["task"] == "flux" and cfg["output.omega_a"] is not None:
        keys = keys + ["N_out_rate"]
    return keys


def execute(cfg: RunConfig, threads: int | None = None) -> TaskOutput:
    params = cfg.model_params()
    task = cfg["task"]
    if task == "stability":
        return task_stability(cfg, params, threads)
    params = resolve_order(cfg, params)
    return TASK_FUNCS[task](cfg, params)
