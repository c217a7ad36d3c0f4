#!/usr/bin/env python3
"""Render CSV output of `fraccalc figures` or `fraccalc osc` with matplotlib.

Usage:
    fraccalc figures --id fig7 --out fig7.csv
    python3 scripts/plot_figures.py fig7.csv --out fig7.png

Relaxation (-G) and creep (-J) columns go to separate panels; oscillator
CSVs plot x_closed and x_volterra. Impulse weights from the CSV header are
shown as arrows at t = 0. Infinite samples are skipped.
"""

import argparse
import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    comments, rows = [], []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                rows.append(line)
    reader = csv.reader(rows)
    columns = next(reader)
    data = {c: [] for c in columns}
    for row in reader:
        for c, v in zip(columns, row):
            data[c].append(float(v))
    return comments, columns, data


def impulses(comments):
    out = {}
    for c in comments:
        parts = c.split()
        if len(parts) == 3 and parts[0] == "impulse":
            out[parts[1]] = float(parts[2])
    return out


def finite(t, y):
    pairs = [(a, b) for a, b in zip(t, y) if math.isfinite(b)]
    return [a for a, _ in pairs], [b for _, b in pairs]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", type=Path)
    parser.add_argument("--out", type=Path, help="image path (default: CSV name with .png)")
    args = parser.parse_args()

    comments, columns, data = read(args.csv)
    t = data[columns[0]]
    curves = columns[1:]
    weights = impulses(comments)
    if "x_closed" in curves:
        panels = [("x(t)", ["x_closed", "x_volterra"])]
    else:
        panels = [
            (title, [c for c in curves if c.endswith(suffix)])
            for title, suffix in (("relaxation G(t)", "-G"), ("creep J(t)", "-J"))
        ]
        panels = [p for p in panels if p[1]]

    fig, axes = plt.subplots(1, len(panels), figsize=(6 * len(panels), 4), squeeze=False)
    for ax, (title, names) in zip(axes[0], panels):
        for name in names:
            ts, ys = finite(t, data[name])
            line = ax.plot(ts, ys, label=name)[0]
            w = weights.get(name, 0.0)
            if w:
                top = ax.get_ylim()[1] or 1.0
                ax.annotate("", xy=(0, top), xytext=(0, 0),
                            arrowprops={"arrowstyle": "->", "color": line.get_color()})
                ax.text(0, top, f" {w:g} δ(t)", color=line.get_color(), va="top")
        ax.set_title(title)
        ax.set_xlabel(columns[0])
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.out or args.csv.with_suffix(".png"), dpi=120)


if __name__ == "__main__":
    main()
