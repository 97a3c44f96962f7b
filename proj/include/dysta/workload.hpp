// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Traces, requests and workload generation.
//
// A trace records the ground-truth per-layer latency and sparsity of one
// (model, input) execution on the target accelerator. The simulator replays
// traces verbatim; everything the schedulers know about a request's future
// comes from profiles, never from its own trace.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "dysta/csv.hpp"
#include "dysta/rng.hpp"
#include "dysta/types.hpp"

namespace dysta {

struct LayerTrace {
  Seconds latency = 0;
  double sparsity = 0;  // fraction of zeros, in [0, 1]

  friend bool operator==(const LayerTrace&, const LayerTrace&) = default;
};

struct SampleTrace {
  ModelPatternKey key;
  std::string sample_id;
  std::vector<LayerTrace> layers;

  std::size_t num_layers() const { return layers.size(); }

  /// Uninterrupted isolated execution time.
  Seconds isolated_latency() const {
    Seconds sum = 0;
    for (const auto& l : layers) sum += l.latency;
    return sum;
  }

  friend bool operator==(const SampleTrace&, const SampleTrace&) = default;
};

inline void validate(const SampleTrace& t) {
  const auto name = to_string(t.key) + "#" + t.sample_id;
  if (t.layers.empty()) throw ValidationError(name + ": trace has no layers");
  for (std::size_t j = 0; j < t.layers.size(); ++j) {
    const auto& l = t.layers[j];
    if (!(l.latency >= 0) || !std::isfinite(l.latency)) {
      throw ValidationError(name + ": layer " + std::to_string(j) + " latency must be finite and >= 0");
    }
    if (!(l.sparsity >= 0 && l.sparsity <= 1)) {
      throw ValidationError(name + ": layer " + std::to_string(j) + " sparsity " +
                            csv::fmt(l.sparsity) + " outside [0,1]");
    }
  }
  if (!(t.isolated_latency() > 0)) throw ValidationError(name + ": total latency must be > 0");
}

/// An inference job. The first block of fields is fixed at generation time;
/// the second is execution progress, advanced only by the simulation engine.
struct Request {
  RequestId id = 0;
  ModelPatternKey key;
  Seconds arrival = 0;
  Seconds deadline = 0;
  SampleTrace trace;

  std::size_t next_layer = 0;
  Seconds exec_accum = 0;
  std::optional<Seconds> completion;
  int preempt_count = 0;

  Seconds isolated_latency() const { return trace.isolated_latency(); }
  bool finished() const { return next_layer == trace.num_layers(); }
};

// ---------------------------------------------------------------------------
// Trace files

enum class TraceFormat { Csv };

inline constexpr std::string_view kTraceHeader =
    "model_name,pattern,sample_id,layer_idx,latency_s,sparsity";

/// Parses the trace CSV schema. One trace per (model, pattern, sample) group,
/// in order of first appearance; layer_idx must count up from 0 per group.
inline std::vector<SampleTrace> read_traces(std::istream& in) {
  csv::Reader reader(in, {"model_name", "pattern", "sample_id", "layer_idx", "latency_s", "sparsity"});
  std::vector<SampleTrace> traces;
  std::map<std::tuple<std::string, Pattern, std::string>, std::size_t> index;
  while (auto row = reader.next()) {
    const auto& f = *row;
    auto pattern = parse_pattern(f[1]);
    if (!pattern) throw ParseError(reader.line(), "unknown pattern '" + std::string(f[1]) + "'");
    if (f[0].empty()) throw ParseError(reader.line(), "empty model_name");
    auto layer = reader.integer(f[3], "layer_idx");
    LayerTrace lt{reader.number(f[4], "latency_s"), reader.number(f[5], "sparsity")};
    if (!(lt.sparsity >= 0 && lt.sparsity <= 1)) {
      throw ValidationError("line " + std::to_string(reader.line()) + ": sparsity " + std::string(f[5]) +
                            " outside [0,1]");
    }
    if (!(lt.latency >= 0) || !std::isfinite(lt.latency)) {
      throw ValidationError("line " + std::to_string(reader.line()) + ": latency must be finite and >= 0");
    }
    auto group = std::make_tuple(std::string(f[0]), *pattern, std::string(f[2]));
    auto [it, inserted] = index.try_emplace(group, traces.size());
    if (inserted) traces.push_back(SampleTrace{{std::string(f[0]), *pattern}, std::string(f[2]), {}});
    auto& trace = traces[it->second];
    if (layer != static_cast<std::int64_t>(trace.layers.size())) {
      throw ParseError(reader.line(), "layer_idx " + std::to_string(layer) + " out of sequence (expected " +
                                          std::to_string(trace.layers.size()) + ")");
    }
    trace.layers.push_back(lt);
  }
  if (traces.empty()) throw ParseError(reader.line(), "no trace rows");
  for (const auto& t : traces) validate(t);
  return traces;
}

inline std::vector<SampleTrace> load_traces(const std::string& path, TraceFormat = TraceFormat::Csv) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  return read_traces(in);
}

inline void write_traces(std::ostream& out, const std::vector<SampleTrace>& traces) {
  out << kTraceHeader << '\n';
  for (const auto& t : traces) {
    for (std::size_t j = 0; j < t.layers.size(); ++j) {
      out << t.key.model_name << ',' << to_string(t.key.pattern) << ',' << t.sample_id << ',' << j << ','
          << csv::fmt(t.layers[j].latency) << ',' << csv::fmt(t.layers[j].sparsity) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Synthetic traces

/// Parameters of one synthetic model. Per-layer sparsity of sample i is
///
///   s_ij = clamp(m_j + A*u_i + B*(e_ij - mean_k e_ik), 0, 1)
///
/// with u, e ~ U(-1/2, 1/2). A = relative_range * mean(m) fixes the spread of
/// network sparsity (the per-sample layer mean, which the centred e term does
/// not move), and B is chosen so any two layers have Pearson correlation
/// `correlation`. Layer latency is base_j * ((1 - c) + c * d_ij / (1 - m_j))
/// where d = 1 - s is density and c is `latency_coupling`.
struct SynthSpec {
  std::string model_name = "synth";
  Pattern pattern = Pattern::DynamicAttention;
  int num_samples = 100;
  int num_layers = 12;
  Seconds base_latency = 1e-3;
  double layer_latency_spread = 0;   // per-layer base multiplier in [1-x, 1+x]
  double mean_sparsity = 0.5;
  double layer_sparsity_spread = 0;  // per-layer mean offset in [-x, x]
  double relative_range = 0.28;
  double correlation = 0.9;
  double latency_coupling = 1.0;
};

inline void validate(const SynthSpec& s) {
  auto bad = [&](const std::string& what) { throw ValidationError("synth '" + s.model_name + "': " + what); };
  if (s.num_samples < 1) bad("num_samples must be >= 1");
  if (s.num_layers < 1) bad("num_layers must be >= 1");
  if (!(s.base_latency > 0)) bad("base_latency must be > 0");
  if (!(s.layer_latency_spread >= 0 && s.layer_latency_spread < 1)) bad("layer_latency_spread must be in [0,1)");
  if (!(s.mean_sparsity >= 0 && s.mean_sparsity < 1)) bad("mean_sparsity must be in [0,1)");
  if (!(s.layer_sparsity_spread >= 0)) bad("layer_sparsity_spread must be >= 0");
  if (!(s.relative_range >= 0)) bad("relative_range must be >= 0");
  if (!(s.correlation >= 0 && s.correlation <= 1)) bad("correlation must be in [0,1]");
  if (!(s.latency_coupling >= 0 && s.latency_coupling <= 1)) bad("latency_coupling must be in [0,1]");
}

inline std::vector<SampleTrace> synth_traces(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  const auto stream = "synth/" + spec.model_name + "/" + std::string(to_string(spec.pattern));
  const auto L = static_cast<std::size_t>(spec.num_layers);

  Rng shape(seed, stream + "/shape");
  std::vector<double> base(L), mean_sparsity(L);
  for (std::size_t j = 0; j < L; ++j) {
    base[j] = spec.base_latency * shape.uniform(1 - spec.layer_latency_spread, 1 + spec.layer_latency_spread);
    mean_sparsity[j] = std::clamp(
        spec.mean_sparsity + shape.uniform(-spec.layer_sparsity_spread, spec.layer_sparsity_spread), 0.0, 0.99);
  }
  double overall_mean = 0;
  for (double m : mean_sparsity) overall_mean += m;
  overall_mean /= static_cast<double>(L);

  const double c = spec.correlation;
  const double common = spec.relative_range * overall_mean;
  const double own = (c >= 1) ? 0.0 : common * std::sqrt((1 - c) / (c + (1 - c) / static_cast<double>(L)));

  Rng rng(seed, stream + "/samples");
  std::vector<SampleTrace> out;
  out.reserve(static_cast<std::size_t>(spec.num_samples));
  std::vector<double> e(L);
  for (int i = 0; i < spec.num_samples; ++i) {
    const double u = rng.uniform01() - 0.5;
    double e_mean = 0;
    for (auto& x : e) {
      x = rng.uniform01() - 0.5;
      e_mean += x;
    }
    e_mean /= static_cast<double>(L);

    SampleTrace t{{spec.model_name, spec.pattern}, "s" + std::to_string(i), {}};
    t.layers.reserve(L);
    for (std::size_t j = 0; j < L; ++j) {
      const double s = std::clamp(mean_sparsity[j] + common * u + own * (e[j] - e_mean), 0.0, 1.0);
      const double ratio = (1 - s) / (1 - mean_sparsity[j]);
      const double lat = base[j] * ((1 - spec.latency_coupling) + spec.latency_coupling * ratio);
      t.layers.push_back({lat, s});
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Request streams

struct WorkloadSpec {
  std::vector<SampleTrace> trace_pool;
  double arrival_rate = 30;  // requests per second
  int num_requests = 1000;
  double slo_multiplier = 10;
  std::uint64_t seed = 0;
};

/// Sets deadline = arrival + T_isol * multiplier. Returns false when the
/// multiplier is <= 1, i.e. the SLO cannot be met even in isolation (the
/// deadlines are still assigned).
[[nodiscard]] inline bool assign_slos(std::vector<Request>& requests, double slo_multiplier) {
  for (auto& r : requests) r.deadline = r.arrival + r.isolated_latency() * slo_multiplier;
  return slo_multiplier > 1;
}

inline void sort_by_arrival(std::vector<Request>& requests) {
  std::stable_sort(requests.begin(), requests.end(), [](const Request& a, const Request& b) {
    return a.arrival < b.arrival || (a.arrival == b.arrival && a.id < b.id);
  });
}

/// Poisson arrivals: exponential gaps, the first arrival one gap after t=0.
/// Traces are drawn uniformly with replacement from the pool.
inline std::vector<Request> gen_arrivals(const WorkloadSpec& spec) {
  if (spec.trace_pool.empty()) throw ValidationError("workload: trace pool is empty");
  if (spec.num_requests < 1) throw ValidationError("workload: num_requests must be >= 1");
  if (!(spec.arrival_rate > 0) || !std::isfinite(spec.arrival_rate)) {
    throw ValidationError("workload: arrival_rate must be > 0");
  }
  Rng arrivals(spec.seed, "arrivals");
  Rng choice(spec.seed, "trace_choice");
  std::vector<Request> out;
  out.reserve(static_cast<std::size_t>(spec.num_requests));
  Seconds t = 0;
  for (int i = 0; i < spec.num_requests; ++i) {
    t += arrivals.exponential(spec.arrival_rate);
    const auto& trace = spec.trace_pool[choice.index(spec.trace_pool.size())];
    Request r;
    r.id = static_cast<RequestId>(i);
    r.key = trace.key;
    r.arrival = t;
    r.trace = trace;
    out.push_back(std::move(r));
  }
  sort_by_arrival(out);
  (void)assign_slos(out, spec.slo_multiplier);
  return out;
}

// ---------------------------------------------------------------------------
// Workload files: one request per row, referencing a trace by its group key.

inline std::vector<Request> read_workload(std::istream& in, const std::vector<SampleTrace>& pool) {
  csv::Reader reader(in, {"request_id", "model_name", "pattern", "sample_id", "arrival_s", "deadline_s"});
  std::map<std::tuple<std::string, Pattern, std::string>, const SampleTrace*> by_key;
  for (const auto& t : pool) by_key[{t.key.model_name, t.key.pattern, t.sample_id}] = &t;
  std::vector<Request> out;
  while (auto row = reader.next()) {
    const auto& f = *row;
    auto pattern = parse_pattern(f[2]);
    if (!pattern) throw ParseError(reader.line(), "unknown pattern '" + std::string(f[2]) + "'");
    auto it = by_key.find({std::string(f[1]), *pattern, std::string(f[3])});
    if (it == by_key.end()) {
      throw ParseError(reader.line(), "no trace for " + std::string(f[1]) + "/" + std::string(f[2]) + "#" +
                                          std::string(f[3]));
    }
    Request r;
    r.id = static_cast<RequestId>(reader.integer(f[0], "request_id"));
    r.key = it->second->key;
    r.trace = *it->second;
    r.arrival = reader.number(f[4], "arrival_s");
    r.deadline = reader.number(f[5], "deadline_s");
    out.push_back(std::move(r));
  }
  sort_by_arrival(out);
  return out;
}

inline void write_workload(std::ostream& out, const std::vector<Request>& requests) {
  out << "request_id,model_name,pattern,sample_id,arrival_s,deadline_s\n";
  for (const auto& r : requests) {
    out << r.id << ',' << r.key.model_name << ',' << to_string(r.key.pattern) << ',' << r.trace.sample_id << ','
        << csv::fmt(r.arrival) << ',' << csv::fmt(r.deadline) << '\n';
  }
}

}  // namespace dysta
