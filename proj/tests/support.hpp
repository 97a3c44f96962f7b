// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit and acceptance tests.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dysta/csv.hpp"
#include "dysta/presets.hpp"
#include "dysta/profile.hpp"
#include "dysta/rng.hpp"
#include "dysta/workload.hpp"

namespace dysta::test {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(DYSTA_FIXTURES) / rel; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

using Row = std::map<std::string, std::string>;

/// Header-keyed rows of a plain CSV file.
inline std::vector<Row> read_rows(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::string line;
  std::getline(f, line);
  std::vector<std::string> header;
  for (auto h : csv::split(line)) header.emplace_back(h);
  std::vector<Row> rows;
  while (std::getline(f, line)) {
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) r[header[i]] = std::string(fields[i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline double num(const Row& r, const std::string& k) { return std::stod(r.at(k)); }

inline bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1e-300, std::fabs(a), std::fabs(b)}) || a == b;
}

inline SampleTrace trace(ModelPatternKey key, std::string id, std::vector<Seconds> lat, std::vector<double> sp) {
  SampleTrace t{std::move(key), std::move(id), {}};
  for (std::size_t j = 0; j < lat.size(); ++j) t.layers.push_back({lat[j], sp.empty() ? 0.5 : sp[j]});
  return t;
}

inline Request request(RequestId id, const SampleTrace& t, Seconds arrival, double slo = 10) {
  Request r;
  r.id = id;
  r.key = t.key;
  r.arrival = arrival;
  r.trace = t;
  r.deadline = arrival + slo * t.isolated_latency();
  return r;
}

inline ProfileStore store_of(std::initializer_list<ModelProfile> ps) {
  ProfileStore s;
  for (const auto& p : ps) s.insert(p);
  return s;
}

struct Scenario {
  std::vector<SampleTrace> pool;
  ProfileStore profiles;
  std::vector<Request> requests;
};

/// A small randomized scenario drawn from a preset: the pool is the preset
/// with few samples, rate and M are jittered by `seed`.
inline Scenario random_scenario(std::uint64_t seed, int requests = 60, const std::string& preset = "") {
  Rng rng(seed, "test_scenario");
  const auto name = preset.empty() ? (rng.uniform01() < 0.5 ? "attnn" : "cnn") : preset;
  const auto p = preset_by_name(name, 20);
  Scenario s;
  s.pool = preset_pool(p, seed);
  s.profiles = build_profiles(s.pool);
  const double rate = p.default_rate * rng.uniform(0.5, 1.5);
  const double slo = rng.uniform(2, 30);
  s.requests = gen_arrivals(WorkloadSpec{s.pool, rate, requests, slo, seed});
  return s;
}

}  // namespace dysta::test
