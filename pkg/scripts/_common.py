"""Shared helpers for the experiment scripts."""

import argparse
from pathlib import Path

from vacrad import __version__
from vacrad.correlators import auto_order
from vacrad.model import ModelParams
from vacrad.table import ResultTable


def parser(doc):
    ap = argparse.ArgumentParser(description=doc.strip().splitlines()[0])
    ap.add_argument("--out", default="results", help="output directory")
    return ap


def resonant(gamma, eta, eps, th=0.0, n="auto"):
    p = ModelParams.from_ratios(gamma_over_omega_a=gamma, eta_over_eta_c=eta, epsilon_over_gamma=eps,
                                omega_d="resonant", omega_th_over_omega_a=th)
    return p.replace(n_harmonics=auto_order(p) if n == "auto" else n)


def save(out_dir, name, columns, rows, **provenance):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance.setdefault("version", __version__)
    table = ResultTable(columns, ["1"] * len(columns), rows, provenance)
    path = out / name
    table.write(path)
    print(f"wrote {path} ({len(rows)} rows)")
    return path
