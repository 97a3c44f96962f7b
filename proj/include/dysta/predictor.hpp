// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sparse latency prediction.
//
// The runtime monitor records the sparsity of every layer a request has
// executed. The sparsity coefficient gamma compares the observed density
// (1 - sparsity) with the profiled average density of the same layers, and
// scales the profiled latency of the layers still to run:
//
//   remaining = alpha * gamma * sum_{j >= next} avg_latency[j]
//
// gamma is a density ratio: sparser-than-average inputs shrink the estimate.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dysta/profile.hpp"
#include "dysta/types.hpp"
#include "dysta/workload.hpp"

namespace dysta {

struct CoeffStrategy {
  enum class Kind { AverageAll, LastN, LastOne };
  Kind kind = Kind::LastOne;
  int n = 3;  // used by LastN only

  static CoeffStrategy average_all() { return {Kind::AverageAll, 3}; }
  static CoeffStrategy last_n(int n = 3) {
    if (n < 1) throw ValidationError("last_n requires n >= 1");
    return {Kind::LastN, n};
  }
  static CoeffStrategy last_one() { return {Kind::LastOne, 1}; }

  /// Number of most recent layers the estimate uses, given `observed` layers.
  std::size_t window(std::size_t observed) const {
    switch (kind) {
      case Kind::AverageAll: return observed;
      case Kind::LastN: return std::min(observed, static_cast<std::size_t>(n));
      case Kind::LastOne: return std::min<std::size_t>(observed, 1);
    }
    return observed;
  }

  friend bool operator==(const CoeffStrategy&, const CoeffStrategy&) = default;
};

inline std::string to_string(const CoeffStrategy& s) {
  switch (s.kind) {
    case CoeffStrategy::Kind::AverageAll: return "average_all";
    case CoeffStrategy::Kind::LastN: return "last_n";
    case CoeffStrategy::Kind::LastOne: return "last_one";
  }
  return "last_one";
}

inline CoeffStrategy parse_strategy(std::string_view name, int n = 3) {
  if (name == "average_all") return CoeffStrategy::average_all();
  if (name == "last_n") return CoeffStrategy::last_n(n);
  if (name == "last_one") return CoeffStrategy::last_one();
  throw ValidationError("unknown coefficient strategy '" + std::string(name) + "'");
}

struct GammaBounds {
  double min = 0.05;
  double max = 20.0;
};

struct PredictorConfig {
  CoeffStrategy strategy = CoeffStrategy::last_one();
  double alpha = 1.0;
  GammaBounds bounds{};
};

/// Layer sparsities observed so far for one request, oldest first. Layers
/// execute in order, so entry k is the sparsity of layer k.
class MonitorState {
 public:
  void observe(double sparsity) {
    history_.push_back(std::clamp(sparsity, 0.0, 1.0));
    prefix_density_.push_back(prefix_density_.back() + (1 - history_.back()));
  }

  std::size_t count() const { return history_.size(); }
  const std::vector<double>& history() const { return history_; }

  /// Sum of observed densities over layers [first, last).
  double density_sum(std::size_t first, std::size_t last) const {
    return prefix_density_.at(last) - prefix_density_.at(first);
  }

 private:
  std::vector<double> history_;
  std::vector<double> prefix_density_{0.0};
};

inline MonitorState monitor_update(MonitorState state, const LayerTrace& layer) {
  state.observe(layer.sparsity);
  return state;
}

struct Coefficient {
  double gamma = 1.0;
  bool clamped = false;  // hit a bound, or the reference density was zero
};

/// gamma over the strategy's window of the most recent observed layers.
/// With nothing observed yet the static estimate applies (gamma = 1).
inline Coefficient sparsity_coeff(const MonitorState& monitor, const ModelProfile& profile,
                                  const CoeffStrategy& strategy, const GammaBounds& bounds = {}) {
  const auto observed = monitor.count();
  if (observed > profile.num_layers()) {
    throw ValidationError("monitor has more layers than profile " + to_string(profile.key));
  }
  const auto w = strategy.window(observed);
  if (w == 0) return {1.0, false};
  const auto first = observed - w;
  const double reference = profile.density_sum(first, observed);
  if (!(reference > 0)) return {bounds.max, true};
  const double gamma = monitor.density_sum(first, observed) / reference;
  if (gamma < bounds.min) return {bounds.min, true};
  if (gamma > bounds.max) return {bounds.max, true};
  return {gamma, false};
}

inline Seconds predict_remaining(const ModelProfile& profile, double gamma, std::size_t next_layer,
                                 double alpha = 1.0) {
  return alpha * gamma * profile.remaining_latency(next_layer);
}

// ---------------------------------------------------------------------------
// Offline evaluation

struct RmseAccumulator {
  double sum_sq = 0;
  std::size_t count = 0;
  double rmse() const { return count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0; }
};

/// Adds the squared errors of one trace: at every boundary j in [1, L) the
/// remaining latency is predicted from layers < j and compared with the
/// trace's true remainder, both divided by the profile's average total. A
/// single-layer trace contributes its static (gamma = 1) estimate at j = 0.
inline void accumulate_errors(const SampleTrace& trace, const ModelProfile& profile, const PredictorConfig& cfg,
                              RmseAccumulator& acc) {
  const auto L = trace.num_layers();
  if (L != profile.num_layers()) {
    throw ValidationError("trace " + trace.sample_id + " does not match profile " + to_string(profile.key));
  }
  const double norm = profile.avg_total_latency;
  auto add = [&](Seconds predicted, Seconds truth) {
    const double e = (predicted - truth) / norm;
    acc.sum_sq += e * e;
    ++acc.count;
  };
  if (L == 1) {
    add(predict_remaining(profile, 1.0, 0, cfg.alpha), trace.layers[0].latency);
    return;
  }
  std::vector<Seconds> suffix(L + 1, 0.0);
  for (std::size_t j = L; j-- > 0;) suffix[j] = suffix[j + 1] + trace.layers[j].latency;
  MonitorState monitor;
  for (std::size_t j = 1; j < L; ++j) {
    monitor.observe(trace.layers[j - 1].sparsity);
    const auto coeff = sparsity_coeff(monitor, profile, cfg.strategy, cfg.bounds);
    add(predict_remaining(profile, coeff.gamma, j, cfg.alpha), suffix[j]);
  }
}

inline double eval_rmse(const std::vector<SampleTrace>& traces, const ProfileStore& profiles,
                        const PredictorConfig& cfg) {
  if (traces.empty()) throw ValidationError("eval_rmse: no traces");
  RmseAccumulator acc;
  for (const auto& t : traces) accumulate_errors(t, profiles.lookup(t.key), cfg, acc);
  return acc.rmse();
}

/// RMSE per model-pattern key, in key order.
inline std::map<ModelPatternKey, double> eval_rmse_by_key(const std::vector<SampleTrace>& traces,
                                                          const ProfileStore& profiles, const PredictorConfig& cfg) {
  if (traces.empty()) throw ValidationError("eval_rmse: no traces");
  std::map<ModelPatternKey, RmseAccumulator> acc;
  for (const auto& t : traces) accumulate_errors(t, profiles.lookup(t.key), cfg, acc[t.key]);
  std::map<ModelPatternKey, double> out;
  for (const auto& [k, a] : acc) out[k] = a.rmse();
  return out;
}

}  // namespace dysta
