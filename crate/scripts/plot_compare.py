#!/usr/bin/env python3
"""Plot worst idleness, worst delay and summed distance from a `tour-patrol compare` CSV.

Values are averaged over seeds for each method and robot count.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

PANELS = [("wi", "worst idleness"), ("wd", "worst delay"), ("sum_distance", "summed distance")]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="output of `tour-patrol compare`")
    parser.add_argument("-o", "--out", default="compare.png", help="image file to write")
    args = parser.parse_args()

    rows = pd.read_csv(args.csv)
    rows = rows[rows["status"] != "size-cap"]
    means = rows.groupby(["method", "n"])[[c for c, _ in PANELS]].mean().reset_index()

    fig, axes = plt.subplots(1, len(PANELS), figsize=(4 * len(PANELS), 3.5), constrained_layout=True)
    for ax, (column, title) in zip(axes, PANELS):
        for method, group in means.groupby("method"):
            ax.plot(group["n"], group[column], marker="o", label=method)
        ax.set_title(title)
        ax.set_xlabel("robots")
        ax.grid(alpha=0.3)
    axes[0].legend()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
