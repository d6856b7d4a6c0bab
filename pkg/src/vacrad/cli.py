"""Command-line front end.

    vacrad run   --config fig3a.cfg --set model.eta_over_eta_c=0.99 --out n.csv
    vacrad sweep --task flux --axis model.epsilon_over_gamma=1e-4:1e-2:9:log --out scaling.csv

Exit status: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import itertools
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import SCHEMA, ConfigError, RunConfig
from .errors import DomainError, InvalidParameterError, NumericalError, VacradError
from .table import ResultTable, _fmt
from .tasks import execute, summary_keys

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _provenance(cfg: RunConfig, n_harmonics, extra=None) -> dict:
    prov = {
        "config_hash": cfg.digest(),
        "task": cfg["task"],
        "n_harmonics": n_harmonics,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat(),
    }
    prov.update(extra or {})
    return prov


def _emit(table: ResultTable, cfg: RunConfig):
    fmt = cfg["output.format"]
    path = cfg["output.path"]
    text = table.to_json() if fmt == "json" else table.to_csv()
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def run(cfg: RunConfig, threads: int | None = None) -> ResultTable:
    out = execute(cfg, threads)
    extra = dict(out.meta)
    extra["summary"] = out.summary
    table = ResultTable(out.columns, out.units, out.rows, _provenance(cfg, out.n_harmonics, extra))
    _emit(table, cfg)
    return table


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------

def parse_axis(spec: str) -> tuple[str, list]:
    """``key=v1,v2,...`` or ``key=start:stop:num[:log]``."""
    key, sep, rhs = spec.partition("=")
    key = key.strip()
    if not sep:
        raise ConfigError(spec, "axis must look like key=values")
    if key not in SCHEMA:
        raise ConfigError(key, "unknown configuration key")
    rhs = rhs.strip()
    if not rhs:
        raise ConfigError(key, "empty sweep")
    parser = SCHEMA[key][0]
    try:
        if ":" in rhs and not rhs.startswith("resonant"):
            parts = rhs.split(":")
            if len(parts) not in (3, 4):
                raise ValueError("range must be start:stop:num[:log]")
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError("empty sweep")
            log = len(parts) == 4 and parts[3] == "log"
            values = list(np.geomspace(a, b, n) if log else np.linspace(a, b, n))
            values = [parser(repr(float(v))) for v in values]
        else:
            values = [parser(v.strip()) for v in rhs.split(",") if v.strip()]
    except (ValueError, InvalidParameterError) as exc:
        raise ConfigError(key, f"invalid sweep values ({exc})") from None
    if not values:
        raise ConfigError(key, "empty sweep")
    return key, values


def _point_key(values) -> tuple:
    return tuple(_fmt(v) for v in values)


def _load_existing(cfg: RunConfig, axes_keys) -> dict:
    path = cfg["output.path"]
    if path == "-" or not Path(path).exists():
        return {}
    try:
        old = ResultTable.read(path, cfg["output.format"])
    except (OSError, ValueError):
        return {}
    if old.provenance.get("config_hash") != cfg.digest() or old.provenance.get("axes") != list(axes_keys):
        return {}
    done = {}
    n_axes = len(axes_keys)
    err_i = old.columns.index("error") if "error" in old.columns else None
    for row in old.rows:
        if err_i is not None and row[err_i] not in ("", None):
            continue  # retry failed points
        done[_point_key(row[:n_axes])] = row
    return done


def sweep(cfg: RunConfig, axes: list, threads: int | None = None) -> ResultTable:
    """Cartesian-product sweep; each point contributes one summary row.

    Rows already present in a compatible output file are reused, so an
    interrupted sweep resumes where it stopped.
    """
    if not axes:
        raise ConfigError("axis", "empty sweep")
    if len(axes) > 2:
        raise ConfigError("axis", "at most two sweep axes are supported")
    keys = [k for k, _ in axes]
    points = list(itertools.product(*[v for _, v in axes]))
    done = _load_existing(cfg, keys)

    def work(values):
        pc = cfg
        for k, v in zip(keys, values):
            pc = pc.with_value(k, v)
        try:
            out = execute(pc, 1)
            return out.summary, out.n_harmonics, ""
        except (VacradError, ArithmeticError, ValueError) as exc:
            return None, None, f"{type(exc).__name__}: {exc}".replace("\n", " ")

    skeys = summary_keys(cfg)
    columns = keys + skeys + ["n_harmonics", "error"]
    units = [""] * len(keys) + ["1"] * len(skeys) + ["1", ""]
    table = ResultTable(columns, units, [], _provenance(cfg, None, {"axes": keys}))
    todo = [pt for pt in points if _point_key(pt) not in done]
    results = {}
    with ThreadPoolExecutor(max_workers=threads or 1) as pool:
        # rows are emitted in sweep order as soon as every earlier point is known
        pending = iter(points)
        nxt = next(pending, None)
        for pt, res in zip(todo, pool.map(work, todo)):
            results[_point_key(pt)] = res
            while nxt is not None and (_point_key(nxt) in done or _point_key(nxt) in results):
                table.rows.append(_sweep_row(nxt, done, results, skeys))
                nxt = next(pending, None)
            if cfg["output.path"] != "-":
                _emit(table, cfg)
        while nxt is not None:
            table.rows.append(_sweep_row(nxt, done, results, skeys))
            nxt = next(pending, None)
    _emit(table, cfg)
    return table


def _sweep_row(pt, done, results, skeys):
    pk = _point_key(pt)
    if pk in done:
        return done[pk]
    s, n, err = results[pk]
    vals = [s.get(k, math.nan) if s else math.nan for k in skeys]
    return list(pt) + vals + [n if n is not None else math.nan, err]


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--task", help="observable to compute")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    common.add_argument("--out", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--threads", type=int, default=None)

    ap = argparse.ArgumentParser(prog="vacrad", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="evaluate one task")
    sw = sub.add_parser("sweep", parents=[common], help="sweep one or two configuration keys")
    sw.add_argument("--axis", action="append", default=[], metavar="KEY=SPEC")
    return ap


def _config_from_args(args) -> RunConfig:
    overrides = list(args.overrides)
    if args.task:
        overrides.append(f"task={args.task}")
    if args.out:
        overrides.append(f"output.path={args.out}")
    if args.format:
        overrides.append(f"output.format={args.format}")
    return RunConfig.load(args.config, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "run":
            run(cfg, args.threads)
        else:
            sweep(cfg, [parse_axis(a) for a in args.axis], args.threads)
    except (ConfigError, InvalidParameterError, DomainError) as exc:
        print(f"vacrad: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"vacrad: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
