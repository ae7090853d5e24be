#!/usr/bin/env python3
"""Batch plots from the lab's CSV artifacts.

Three plot kinds, one per CSV schema:

  heatmap      field.csv       (m,n,x,t,u)      space-time color map
  convergence  study.csv       (dx,dt,error,order)  log-log error vs dx
  amplitudes   amplitudes.csv  (n,max_abs_u)    per-step peak, log scale

Usage:
  render.py --kind heatmap --in field.csv --out field.png

The scripts read only the documented CSV schemas; they share no code with
the solver, so they can plot artifacts from any run.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("heatmap", "convergence", "amplitudes")

SCHEMAS = {
    "heatmap": ["m", "n", "x", "t", "u"],
    "convergence": ["dx", "dt", "error", "order"],
    "amplitudes": ["n", "max_abs_u"],
}


class SchemaError(ValueError):
    """CSV header does not match the expected artifact schema."""


def read_columns(path: Path, kind: str) -> dict[str, list[str]]:
    expected = SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != expected:
            raise SchemaError(
                f"{path}: header {header} does not match the {kind} "
                f"schema {expected}"
            )
        cols: dict[str, list[str]] = {name: [] for name in expected}
        for row in reader:
            if len(row) != len(expected):
                raise SchemaError(f"{path}: ragged row {row}")
            for name, cell in zip(expected, row):
                cols[name].append(cell)
    if not cols[expected[0]]:
        raise SchemaError(f"{path}: no data rows")
    return cols


def render_heatmap(in_path: Path, out_path: Path) -> None:
    cols = read_columns(in_path, "heatmap")
    x = np.array(cols["x"], dtype=float)
    t = np.array(cols["t"], dtype=float)
    u = np.array(cols["u"], dtype=float)

    fig, ax = plt.subplots(figsize=(7, 5))
    tri = ax.tripcolor(x, t, u, shading="gouraud", cmap="inferno")
    fig.colorbar(tri, ax=ax, label="u")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title("Approximate solution on the triangular grid")
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def fit_convergence_slope(dx: np.ndarray, err: np.ndarray) -> float:
    """Least-squares slope of log(error) against log(dx)."""
    return float(np.polyfit(np.log(dx), np.log(err), 1)[0])


def render_convergence(in_path: Path, out_path: Path) -> float:
    cols = read_columns(in_path, "convergence")
    dx = np.array(cols["dx"], dtype=float)
    err = np.array(cols["error"], dtype=float)
    keep = err > 0  # a finest-mesh reference row carries error 0
    dx, err = dx[keep], err[keep]
    slope = fit_convergence_slope(dx, err)

    fig, ax = plt.subplots(figsize=(6, 5))
    ax.loglog(dx, err, "o-", label=f"measured (slope {slope:.2f})")
    guide = err[0] * (dx / dx[0]) ** 2
    ax.loglog(dx, guide, "k--", alpha=0.6, label="slope 2 guide")
    ax.set_xlabel("dx")
    ax.set_ylabel("sup-norm error")
    ax.set_title("Refinement study")
    ax.annotate(
        f"fitted slope = {slope:.2f}",
        xy=(dx[-1], err[-1]),
        xytext=(10, 10),
        textcoords="offset points",
    )
    ax.legend()
    ax.invert_xaxis()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return slope


def render_amplitudes(in_path: Path, out_path: Path) -> float:
    cols = read_columns(in_path, "amplitudes")
    n = np.array(cols["n"], dtype=float)
    amps = np.array(cols["max_abs_u"], dtype=float)
    keep = amps > 0
    ratio = math.exp(
        float(np.polyfit(n[keep], np.log(amps[keep]), 1)[0])
    )

    fig, ax = plt.subplots(figsize=(6, 5))
    ax.semilogy(n, amps, "o-")
    ax.set_xlabel("step n")
    ax.set_ylabel("max |U| at level n")
    ax.set_title("Alternating-mode amplitude")
    ax.annotate(
        f"x{ratio:.3f} per step (log slope {math.log(ratio):.4f})",
        xy=(n[-1], amps[-1]),
        xytext=(-10, -15),
        textcoords="offset points",
        ha="right",
    )
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return ratio


def render(kind: str, in_path: Path, out_path: Path):
    if kind == "heatmap":
        return render_heatmap(in_path, out_path)
    if kind == "convergence":
        return render_convergence(in_path, out_path)
    if kind == "amplitudes":
        return render_amplitudes(in_path, out_path)
    raise ValueError(f"unknown kind {kind!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="in_path", required=True, type=Path)
    parser.add_argument("--out", dest="out_path", required=True, type=Path)
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.in_path, args.out_path)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
