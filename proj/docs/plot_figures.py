#!/usr/bin/env python3
"""Plot the CSV files produced by `qtherm figure fig2..fig8`.

Usage:
    qtherm figure fig2 && qtherm figure fig5 && ...
    python3 docs/plot_figures.py fig2.csv fig5.csv ...

Each CSV is plotted against its first column; fig4 (a t1 x t2 grid) is drawn
as a filled contour. Requires matplotlib.
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = [[float(cell) for cell in row] for row in rows[1:]]
    columns = list(zip(*data))
    return header, columns


def plot_lines(path, header, columns):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for name, values in zip(header[1:], columns[1:]):
        ax.plot(columns[0], values, label=name)
    ax.set_xlabel(header[0])
    if len(header) > 2:
        ax.legend(fontsize=8)
    else:
        ax.set_ylabel(header[1])
    fig.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=160)
    print(out)


def plot_contour(path, header, columns):
    t1 = sorted(set(columns[0]))
    t2 = sorted(set(columns[1]))
    grid = [[0.0] * len(t2) for _ in t1]
    index1 = {v: i for i, v in enumerate(t1)}
    index2 = {v: i for i, v in enumerate(t2)}
    for a, b, mu in zip(columns[0], columns[1], columns[2]):
        grid[index1[a]][index2[b]] = mu
    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    cs = ax.contourf(t2, t1, grid, levels=20)
    fig.colorbar(cs, ax=ax, label=header[2])
    ax.set_xlabel(header[1])
    ax.set_ylabel(header[0])
    fig.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=160)
    print(out)


def main():
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    for path in sys.argv[1:]:
        header, columns = load(path)
        if header[:2] == ["t1", "t2"]:
            plot_contour(path, header, columns)
        else:
            plot_lines(path, header, columns)
    return 0


if __name__ == "__main__":
    sys.exit(main())
