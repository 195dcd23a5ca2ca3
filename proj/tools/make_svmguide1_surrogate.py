#!/usr/bin/env python3
"""Writes a deterministic 3,000-sample, 4-feature binary LIBSVM dataset shaped
like the unscaled svmguide1 set: dense features whose magnitudes differ by
orders of magnitude across columns, labels in {0, 1} with roughly a 2:1 class
ratio and overlapping classes."""

import sys

import numpy as np

SCALE = np.array([30.0, 100.0, 0.3, 100.0])


def main(path: str) -> None:
    rng = np.random.default_rng(20120626)
    n = 3000
    labels = (rng.random(n) < 0.65).astype(int)
    centers = np.array([[-0.35, 0.25, -0.2, 0.3], [0.3, -0.2, 0.25, -0.25]])
    mixing = np.array(
        [[0.45, 0.10, 0.00, 0.05], [0.10, 0.40, 0.08, 0.00], [0.00, 0.08, 0.35, 0.10], [0.05, 0.00, 0.10, 0.42]]
    )
    feats = np.tanh(centers[labels] + rng.standard_normal((n, 4)) @ mixing) * SCALE
    with open(path, "w", newline="\n") as out:
        for lab, row in zip(labels, feats):
            cols = " ".join(f"{j + 1}:{v:.6g}" for j, v in enumerate(row) if float(f"{v:.6g}") != 0.0)
            out.write(f"{lab} {cols}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "svmguide1_surrogate.libsvm")
