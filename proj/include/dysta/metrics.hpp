// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dysta/sim.hpp"
#include "dysta/types.hpp"

namespace dysta {

/// Mean of turnaround / T_isol over completed requests. 1.0 is ideal.
inline double compute_antt(const std::vector<RunRecord>& records) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r.dropped) continue;
    sum += r.turnaround / r.t_isol;
    ++n;
  }
  if (n == 0) throw ValidationError("compute_antt: no completed records");
  return sum / static_cast<double>(n);
}

/// Fraction of requests that missed their SLO (dropped requests count).
inline double compute_violation_rate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ValidationError("compute_violation_rate: no records");
  const auto v = std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return r.violated; });
  return static_cast<double>(v) / static_cast<double>(records.size());
}

/// Completed requests per second of makespan (first arrival to last
/// completion).
inline double compute_stp(const std::vector<RunRecord>& records) {
  Seconds first = std::numeric_limits<Seconds>::infinity();
  Seconds last = -std::numeric_limits<Seconds>::infinity();
  std::size_t done = 0;
  for (const auto& r : records) {
    first = std::min(first, r.arrival);
    if (r.dropped) continue;
    last = std::max(last, r.completion);
    ++done;
  }
  const Seconds span = last - first;
  if (done == 0 || !(span > 0)) throw ValidationError("compute_stp: zero time span");
  return static_cast<double>(done) / span;
}

struct MetricsReport {
  double antt = 0;
  double violation_rate = 0;
  double stp = 0;
  long total_preemptions = 0;
  std::uint64_t seed = 0;
  std::vector<RunRecord> per_request;
};

inline MetricsReport make_report(std::vector<RunRecord> records, std::uint64_t seed) {
  MetricsReport m;
  m.antt = compute_antt(records);
  m.violation_rate = compute_violation_rate(records);
  m.stp = compute_stp(records);
  m.total_preemptions = preemption_accounting(records).total;
  m.seed = seed;
  m.per_request = std::move(records);
  return m;
}

struct Stat {
  double mean = 0;
  double stddev = 0;  // sample (n - 1) standard deviation; 0 for n = 1
};

inline Stat mean_stddev(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

struct SeedSummary {
  Stat antt, violation_rate, stp, preemptions;
  std::size_t seeds = 0;
};

inline SeedSummary aggregate_seeds(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw ValidationError("aggregate_seeds: no reports");
  std::vector<double> a, v, s, p;
  for (const auto& r : reports) {
    a.push_back(r.antt);
    v.push_back(r.violation_rate);
    s.push_back(r.stp);
    p.push_back(static_cast<double>(r.total_preemptions));
  }
  return {mean_stddev(a), mean_stddev(v), mean_stddev(s), mean_stddev(p), reports.size()};
}

}  // namespace dysta
