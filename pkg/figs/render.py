#!/usr/bin/env python3
"""Render benchmark aggregate CSVs as figures.

Three figure kinds, all reading the column-oriented CSVs the benchmark
harness writes:

* ``phase``: grayscale success-rate map over two grid columns
  (0 = black = complete failure, 1 = white = complete success);
* ``curve``: one log-scale error curve per series value;
* ``hist``:  histogram of a per-trial column on logarithmic bins.

Output is SVG by default (PNG when the output path ends in .png) and is
a pure function of the input bytes and the figure description: no
timestamps, fixed hash salt, fonts rendered as paths.

Usage:
    render.py --input agg.csv --figure phase --x delta_f --y K \
              --z success_rate --out phase.svg
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figs-render"
matplotlib.rcParams["svg.fonttype"] = "path"

import matplotlib.pyplot as plt
import numpy as np

FIGURES = ("phase", "curve", "hist")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str
    x: str
    y: str = None
    z: str = None
    out: str = "figure.svg"
    xlim: tuple = None
    ylim: tuple = None

    def __post_init__(self):
        if self.kind not in FIGURES:
            raise ValueError(f"figure kind must be one of {FIGURES}")


class MissingColumn(KeyError):
    def __init__(self, column, path):
        super().__init__(f"column {column!r} not present in {path}")
        self.column = column


def _read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = reader.fieldnames or []
    return header, rows


def _column(rows, header, name, path):
    if name not in header:
        raise MissingColumn(name, path)
    return [row[name] for row in rows]


def _floats(values):
    return np.array([float(v) for v in values])


def _phase(ax, spec, header, rows):
    xs = _floats(_column(rows, header, spec.x, spec.input_csv))
    ys = _floats(_column(rows, header, spec.y, spec.input_csv))
    zcol = spec.z or "success_rate"
    zs = _floats(_column(rows, header, zcol, spec.input_csv))
    xvals = np.unique(xs)
    yvals = np.unique(ys)
    grid = np.full((len(yvals), len(xvals)), np.nan)
    for x, y, z in zip(xs, ys, zs):
        grid[np.searchsorted(yvals, y), np.searchsorted(xvals, x)] = z
    ax.imshow(
        grid,
        cmap="gray",
        vmin=0.0,
        vmax=1.0,
        origin="lower",
        aspect="auto",
        interpolation="nearest",
        extent=(
            xvals[0] - 0.5 * _step(xvals),
            xvals[-1] + 0.5 * _step(xvals),
            yvals[0] - 0.5 * _step(yvals),
            yvals[-1] + 0.5 * _step(yvals),
        ),
    )
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    ax.set_title(zcol)


def _step(vals):
    return float(vals[1] - vals[0]) if len(vals) > 1 else 1.0


def _curve(ax, spec, header, rows):
    xs = _floats(_column(rows, header, spec.x, spec.input_csv))
    ys = _floats(_column(rows, header, spec.y, spec.input_csv))
    if spec.z:
        series = _column(rows, header, spec.z, spec.input_csv)
    else:
        series = ["all"] * len(xs)
    markers = ["o", "s", "^", "d", "v", "*"]
    for i, name in enumerate(sorted(set(series))):
        sel = [j for j, s in enumerate(series) if s == name]
        order = np.argsort(xs[sel])
        ax.semilogy(
            xs[sel][order], ys[sel][order], marker=markers[i % len(markers)], label=str(name)
        )
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    ax.grid(True, which="both", alpha=0.3)
    if len(set(series)) > 1 or spec.z:
        ax.legend()


def _hist(ax, spec, header, rows):
    xs = _floats(_column(rows, header, spec.x, spec.input_csv))
    xs = xs[np.isfinite(xs)]
    positive = xs[xs > 0]
    floor = positive.min() if positive.size else 1e-16
    xs = np.maximum(xs, floor)
    bins = np.logspace(np.floor(np.log10(floor)) - 1, np.ceil(np.log10(xs.max())) + 1, 40)
    ax.hist(xs, bins=bins, color="0.4", edgecolor="black")
    ax.set_xscale("log")
    ax.set_xlabel(spec.x)
    ax.set_ylabel("trials")


def render(spec):
    """Draw the figure described by ``spec`` and write it to ``spec.out``."""
    header, rows = _read_table(spec.input_csv)
    fig, ax = plt.subplots(figsize=(5.0, 3.75), dpi=100)
    try:
        if spec.kind == "phase":
            if not spec.y:
                raise ValueError("phase figures need --y")
            _phase(ax, spec, header, rows)
        elif spec.kind == "curve":
            if not spec.y:
                raise ValueError("curve figures need --y")
            _curve(ax, spec, header, rows)
        else:
            _hist(ax, spec, header, rows)
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
        fig.tight_layout()
        fig.savefig(spec.out, metadata={"Date": None} if spec.out.endswith(".svg") else None)
    finally:
        plt.close(fig)
    return spec.out


def main(argv=None):
    parser = argparse.ArgumentParser(prog="render.py", description=__doc__)
    parser.add_argument("--input", required=True, help="CSV file to read")
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--x", required=True, help="x-axis column")
    parser.add_argument("--y", help="y-axis column (phase/curve)")
    parser.add_argument("--z", help="heat column (phase) or series column (curve)")
    parser.add_argument("--out", required=True, help="output image path (.svg or .png)")
    parser.add_argument("--xlim", nargs=2, type=float)
    parser.add_argument("--ylim", nargs=2, type=float)
    args = parser.parse_args(argv)
    spec = FigureSpec(
        kind=args.figure,
        input_csv=args.input,
        x=args.x,
        y=args.y,
        z=args.z,
        out=args.out,
        xlim=tuple(args.xlim) if args.xlim else None,
        ylim=tuple(args.ylim) if args.ylim else None,
    )
    try:
        render(spec)
    except MissingColumn as exc:
        print(f"render.py: {exc.args[0]}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"render.py: i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
