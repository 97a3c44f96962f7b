# Copyright 2026 The Dysta Simulator Authors
# SPDX-License-Identifier: Apache-2.0
"""Readers for fixture input CSVs (plain csv module, no library code)."""

import csv
import os

from minisim import Profile, Req


def _rows(path):
    with open(path, newline="") as f:
        return [r for r in csv.DictReader(line for line in f if line.strip() and not line.startswith("#"))]


def _grouped(path):
    out = {}
    for r in _rows(path):
        key = (r["model_name"], r["pattern"], r["sample_id"])
        out.setdefault(key, []).append((int(r["layer_idx"]), float(r["latency_s"]), float(r["sparsity"])))
    for v in out.values():
        v.sort()
    return out


def load(fixture_dir, priorities=(1,)):
    profiles = {}
    for (model, pattern, _), layers in _grouped(os.path.join(fixture_dir, "profile.csv")).items():
        profiles[(model, pattern)] = Profile([l for _, l, _ in layers], [s for _, _, s in layers])
    traces = _grouped(os.path.join(fixture_dir, "traces.csv"))

    def requests():
        out = []
        for r in _rows(os.path.join(fixture_dir, "workload.csv")):
            rid = int(r["request_id"])
            layers = traces[(r["model_name"], r["pattern"], r["sample_id"])]
            out.append(Req(rid, (r["model_name"], r["pattern"]), float(r["arrival_s"]), float(r["deadline_s"]),
                           [l for _, l, _ in layers], [s for _, _, s in layers],
                           priorities[rid % len(priorities)]))
        return out

    return profiles, requests


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if x is None else (repr(float(x)) if isinstance(x, float) else x) for x in row])
