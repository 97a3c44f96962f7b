# Copyright 2026 The Dysta Simulator Authors
# SPDX-License-Identifier: Apache-2.0
"""100-sample trace pool and its brute-force profile averages.

Model "net" appears under two patterns with different statistics (60 and 40
samples). Samples are drawn with Python's own RNG; the averages use
math.fsum, independent of the C++ summation order.
"""

import math
import os
import random

from fixture_io import write_csv

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "fixtures", "pool100")
LAYERS = 5


def main():
    rng = random.Random(20260101)
    groups = [("net", "pointwise_random", 60, 2e-3, 0.45), ("net", "channelwise", 40, 3e-3, 0.30)]
    rows = []
    per_key = {}
    for model, pattern, n, base, sp in groups:
        for i in range(n):
            layers = []
            for j in range(LAYERS):
                s = min(max(sp + rng.uniform(-0.2, 0.2), 0.0), 1.0)
                lat = base * (1 + 0.1 * j) * (1 - s) / (1 - sp)
                layers.append((lat, s))
                rows.append((model, pattern, "s%d" % i, j, lat, s))
            per_key.setdefault((model, pattern), []).append(layers)
    write_csv(os.path.join(OUT, "traces.csv"),
              ["model_name", "pattern", "sample_id", "layer_idx", "latency_s", "sparsity"], rows)

    expected = []
    for (model, pattern), samples in sorted(per_key.items()):
        for j in range(LAYERS):
            lat = math.fsum(s[j][0] for s in samples) / len(samples)
            sp = math.fsum(s[j][1] for s in samples) / len(samples)
            expected.append((model, pattern, "avg", j, lat, sp))
    write_csv(os.path.join(OUT, "expected_profile.csv"),
              ["model_name", "pattern", "sample_id", "layer_idx", "latency_s", "sparsity"], expected)


if __name__ == "__main__":
    main()
