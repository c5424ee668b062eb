"""Plot sweep CSVs produced by the bcnet CLI.

    bcnet sweep --var lambda --grid 1e-3:1:40:log \
        --metrics R_bs,var_bs,R_os_opt,var_os_opt > rates.csv
    bcnet sweep --var alpha --grid 2.5:6:36 --metrics c --xi 0.1 --epsilon 0.05 > c_xi01.csv
    bcnet sweep --var alpha --grid 2.5:6:36 --metrics c --xi 1 --epsilon 0.05 > c_xi1.csv
    python scripts/plot_sweeps.py rates.csv c_xi01.csv c_xi1.csv

Needs matplotlib. Any column set works: the first column is the x axis and
every other column becomes a line.
"""

import csv
import sys

import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    cols = {name: [] for name in header}
    for row in body:
        for name, cell in zip(header, row):
            cols[name].append(float(cell) if cell else float("nan"))
    return header, cols


def main(paths):
    for path in paths:
        header, cols = load(path)
        x = header[0]
        fig, ax = plt.subplots()
        for name in header[1:]:
            ax.plot(cols[x], cols[name], label=name)
        if x == "lambda":
            ax.set_xscale("log")
        ax.set_xlabel(x)
        ax.legend()
        ax.set_title(path)
        fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=120)


if __name__ == "__main__":
    main(sys.argv[1:])
