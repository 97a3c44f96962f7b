# Copyright 2026 The Dysta Simulator Authors
# SPDX-License-Identifier: Apache-2.0
"""binary16 rounding table from numpy's float64 -> float16 conversion
(round to nearest even). Inputs beyond the finite range are left out;
saturation is checked separately."""

import os
import random

import numpy as np

from fixture_io import write_csv

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "fixtures", "half", "expected_half.csv")


def main():
    rng = random.Random(16)
    xs = [0.0, 1.0, 1.0 + 2.0 ** -12, 1.0 + 2.0 ** -11, 1.0 + 3 * 2.0 ** -11, 2.0 ** -24, 2.0 ** -25,
          3 * 2.0 ** -26, 6.0e-8, 65504.0, 65519.0, 0.1, 1.0 / 3.0, 2048.5, 2049.0, 2051.0]
    for _ in range(400):
        e = rng.uniform(-26, 15.9)
        xs.append(rng.choice([1, -1]) * 2.0 ** e)
    rows = [(x, float(np.float16(x))) for x in xs]
    write_csv(OUT, ["x", "half"], rows)


if __name__ == "__main__":
    main()
