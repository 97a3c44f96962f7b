// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration. The on-disk form is a flat YAML mapping; every key
// is documented in README.md. Scalars and lists are interchangeable for the
// sweep axes (slo_multiplier, arrival_rate, seeds, schedulers).

#pragma once

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dysta/presets.hpp"
#include "dysta/registry.hpp"
#include "dysta/sim.hpp"
#include "dysta/types.hpp"
#include "dysta/workload.hpp"

namespace dysta {

struct ScenarioConfig {
  std::string name = "scenario";

  // Trace source: exactly one of preset, trace_file, synth.
  std::string preset;
  std::string trace_file;
  std::vector<SynthSpec> synth;
  int samples_per_model = 200;

  // Optional fixed request list. Arrivals come from the file; deadlines are
  // kept when keep_deadlines is set, otherwise recomputed per slo_multiplier.
  std::string workload_file;
  bool keep_deadlines = false;

  /// Precomputed profile table; replaces profiling the pool when set.
  std::string profile_file;

  /// Fraction of each key's traces reserved for profiling only (0 = profile
  /// on the whole pool).
  double profile_holdout = 0;

  int num_requests = 1000;
  std::vector<std::string> schedulers{"dysta"};
  std::vector<double> slo_multipliers{10};
  std::vector<double> arrival_rates;  // empty: preset default
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  SchedulerParams params{};
  bool sdrm3_tune = false;
  std::vector<double> sdrm3_grid{0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

  SimConfig sim{};
  std::string output_dir;
};

namespace detail {

template <class T>
std::vector<T> scalar_or_list(const YAML::Node& n, const std::string& key) {
  std::vector<T> out;
  try {
    if (n.IsSequence()) {
      for (const auto& x : n) out.push_back(x.as<T>());
    } else {
      out.push_back(n.as<T>());
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError("key '" + key + "': " + e.msg);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': list must not be empty");
  return out;
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError("key '" + key + "': " + e.msg);
  }
}

inline QueueOverflow parse_overflow(const std::string& s) {
  if (s == "error") return QueueOverflow::Error;
  if (s == "drop") return QueueOverflow::Drop;
  throw ConfigError("queue_overflow must be 'error' or 'drop', got '" + s + "'");
}

inline SynthSpec parse_synth(const YAML::Node& n) {
  if (!n.IsMap()) throw ConfigError("synth entries must be mappings");
  SynthSpec s;
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    const auto& v = kv.second;
    if (k == "model_name") s.model_name = scalar<std::string>(v, k);
    else if (k == "pattern") {
      const auto name = scalar<std::string>(v, k);
      const auto p = parse_pattern(name);
      if (!p) throw ConfigError("unknown pattern '" + name + "'");
      s.pattern = *p;
    }
    else if (k == "num_samples") s.num_samples = scalar<int>(v, k);
    else if (k == "num_layers") s.num_layers = scalar<int>(v, k);
    else if (k == "base_latency") s.base_latency = scalar<double>(v, k);
    else if (k == "layer_latency_spread") s.layer_latency_spread = scalar<double>(v, k);
    else if (k == "mean_sparsity") s.mean_sparsity = scalar<double>(v, k);
    else if (k == "layer_sparsity_spread") s.layer_sparsity_spread = scalar<double>(v, k);
    else if (k == "relative_range") s.relative_range = scalar<double>(v, k);
    else if (k == "correlation") s.correlation = scalar<double>(v, k);
    else if (k == "latency_coupling") s.latency_coupling = scalar<double>(v, k);
    else throw ConfigError("unknown synth key '" + k + "'");
  }
  try {
    validate(s);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace detail

inline void validate(const ScenarioConfig& c) {
  const int sources = !c.preset.empty() + !c.trace_file.empty() + !c.synth.empty();
  if (sources != 1) throw ConfigError("exactly one of preset, trace_file, synth must be given");
  if (!c.preset.empty()) preset_by_name(c.preset);
  if (c.schedulers.empty()) throw ConfigError("schedulers must not be empty");
  for (const auto& s : c.schedulers) {
    if (!is_scheduler_name(s)) throw ConfigError("unknown scheduler '" + s + "'");
  }
  if (std::set<std::string>(c.schedulers.begin(), c.schedulers.end()).size() != c.schedulers.size()) {
    throw ConfigError("schedulers must be distinct");
  }
  if (c.slo_multipliers.empty()) throw ConfigError("slo_multiplier must not be empty");
  for (double m : c.slo_multipliers) {
    if (!(m > 1)) throw ConfigError("slo_multiplier values must be > 1");
  }
  if (c.arrival_rates.empty() && c.preset.empty() && c.workload_file.empty()) {
    throw ConfigError("arrival_rate is required unless a preset or workload_file is given");
  }
  for (double r : c.arrival_rates) {
    if (!(r > 0)) throw ConfigError("arrival_rate values must be > 0");
  }
  if (!c.workload_file.empty() && c.arrival_rates.size() > 1) {
    throw ConfigError("arrival_rate cannot be swept with a fixed workload_file");
  }
  if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (c.num_requests < 1) throw ConfigError("num_requests must be >= 1");
  if (c.samples_per_model < 1) throw ConfigError("samples_per_model must be >= 1");
  if (!(c.profile_holdout >= 0 && c.profile_holdout < 1)) throw ConfigError("profile_holdout must be in [0,1)");
  if (!c.profile_file.empty() && c.profile_holdout > 0) {
    throw ConfigError("profile_holdout and profile_file are mutually exclusive");
  }
  const auto& d = c.params.dysta;
  if (!(d.beta >= 0) || !(d.eta >= 0)) throw ConfigError("beta and eta must be >= 0");
  if (!(d.predictor.alpha > 0)) throw ConfigError("alpha must be > 0");
  if (d.predictor.strategy.kind == CoeffStrategy::Kind::LastN && d.predictor.strategy.n < 1) {
    throw ConfigError("last_n must be >= 1");
  }
  if (!(d.predictor.bounds.min > 0 && d.predictor.bounds.min <= d.predictor.bounds.max)) {
    throw ConfigError("gamma bounds must satisfy 0 < gamma_min <= gamma_max");
  }
  const auto& s = c.params.sdrm3;
  if (!(s.alpha_weight >= 0 && s.alpha_weight <= 1)) throw ConfigError("sdrm3_alpha must be in [0,1]");
  for (double a : c.sdrm3_grid) {
    if (!(a >= 0 && a <= 1)) throw ConfigError("sdrm3_grid values must be in [0,1]");
  }
  for (int p : c.params.prema.priority_cycle) {
    if (p < 1) throw ConfigError("prema_priorities must be positive integers");
  }
  if (c.params.prema.priority_cycle.empty()) throw ConfigError("prema_priorities must not be empty");
  if (c.sim.layer_block < 1) throw ConfigError("layer_block must be >= 1");
  if (!(c.sim.context_switch >= 0)) throw ConfigError("context_switch must be >= 0");
  if (!(c.sim.max_time > 0)) throw ConfigError("max_time must be > 0");
}

inline ScenarioConfig parse_config(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("config root must be a mapping");
  ScenarioConfig c;
  std::optional<std::string> predictor;
  std::optional<int> predictor_n;
  using detail::scalar;
  using detail::scalar_or_list;
  for (const auto& kv : root) {
    const auto k = kv.first.as<std::string>();
    const auto& v = kv.second;
    if (k == "name") c.name = scalar<std::string>(v, k);
    else if (k == "preset") c.preset = scalar<std::string>(v, k);
    else if (k == "trace_file") c.trace_file = scalar<std::string>(v, k);
    else if (k == "synth") {
      if (!v.IsSequence()) throw ConfigError("synth must be a list of mappings");
      for (const auto& s : v) c.synth.push_back(detail::parse_synth(s));
    } else if (k == "samples_per_model") c.samples_per_model = scalar<int>(v, k);
    else if (k == "workload_file") c.workload_file = scalar<std::string>(v, k);
    else if (k == "profile_file") c.profile_file = scalar<std::string>(v, k);
    else if (k == "keep_deadlines") c.keep_deadlines = scalar<bool>(v, k);
    else if (k == "profile_holdout") c.profile_holdout = scalar<double>(v, k);
    else if (k == "num_requests") c.num_requests = scalar<int>(v, k);
    else if (k == "schedulers" || k == "scheduler") c.schedulers = scalar_or_list<std::string>(v, k);
    else if (k == "slo_multiplier") c.slo_multipliers = scalar_or_list<double>(v, k);
    else if (k == "arrival_rate") c.arrival_rates = scalar_or_list<double>(v, k);
    else if (k == "seeds") c.seeds = scalar_or_list<std::uint64_t>(v, k);
    else if (k == "beta") c.params.dysta.beta = scalar<double>(v, k);
    else if (k == "eta") c.params.dysta.eta = scalar<double>(v, k);
    else if (k == "penalty_sign") c.params.dysta.penalty_sign = scalar<double>(v, k);
    else if (k == "sparsity_aware") c.params.dysta.sparsity_aware = scalar<bool>(v, k);
    else if (k == "coeff_strategy") predictor = scalar<std::string>(v, k);
    else if (k == "last_n") predictor_n = scalar<int>(v, k);
    else if (k == "alpha") c.params.dysta.predictor.alpha = scalar<double>(v, k);
    else if (k == "gamma_min") c.params.dysta.predictor.bounds.min = scalar<double>(v, k);
    else if (k == "gamma_max") c.params.dysta.predictor.bounds.max = scalar<double>(v, k);
    else if (k == "score_precision") c.params.dysta.score_precision = parse_precision(scalar<std::string>(v, k));
    else if (k == "sdrm3_alpha") {
      if (v.IsScalar() && v.Scalar() == "tune") {
        c.sdrm3_tune = true;
      } else {
        c.params.sdrm3.alpha_weight = scalar<double>(v, k);
      }
    } else if (k == "sdrm3_grid") c.sdrm3_grid = scalar_or_list<double>(v, k);
    else if (k == "prema_priorities") c.params.prema.priority_cycle = scalar_or_list<int>(v, k);
    else if (k == "layer_block") c.sim.layer_block = scalar<int>(v, k);
    else if (k == "context_switch") c.sim.context_switch = scalar<double>(v, k);
    else if (k == "max_queue") c.sim.max_queue = scalar<std::size_t>(v, k);
    else if (k == "queue_overflow") c.sim.overflow = detail::parse_overflow(scalar<std::string>(v, k));
    else if (k == "max_time") c.sim.max_time = scalar<double>(v, k);
    else if (k == "record_log") c.sim.record_log = scalar<bool>(v, k);
    else if (k == "output_dir") c.output_dir = scalar<std::string>(v, k);
    else throw ConfigError("unknown config key '" + k + "'");
  }
  if (predictor || predictor_n) {
    auto& st = c.params.dysta.predictor.strategy;
    st = parse_strategy(predictor.value_or(to_string(st)), predictor_n.value_or(3));
  }
  validate(c);
  return c;
}

inline ScenarioConfig parse_config_string(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("config: " + e.msg + " (line " + std::to_string(e.mark.line + 1) + ")");
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

/// Relative paths inside the file resolve against the file's directory.
inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto c = parse_config_string(ss.str());
  const auto dir = std::filesystem::path(path).parent_path();
  auto rebase = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (dir / p).lexically_normal().string();
  };
  rebase(c.trace_file);
  rebase(c.workload_file);
  rebase(c.profile_file);
  return c;
}

namespace detail {

// Shortest round-trip text, so emitted configs stay readable.
inline std::string num(double v) { return csv::fmt(v); }

inline std::vector<std::string> nums(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(num(x));
  return out;
}

}  // namespace detail

inline std::string serialize_config(const ScenarioConfig& c) {
  using detail::num;
  using detail::nums;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  if (!c.preset.empty()) out << YAML::Key << "preset" << YAML::Value << c.preset;
  if (!c.trace_file.empty()) out << YAML::Key << "trace_file" << YAML::Value << c.trace_file;
  if (!c.synth.empty()) {
    out << YAML::Key << "synth" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : c.synth) {
      out << YAML::BeginMap;
      out << YAML::Key << "model_name" << YAML::Value << s.model_name;
      out << YAML::Key << "pattern" << YAML::Value << std::string(to_string(s.pattern));
      out << YAML::Key << "num_samples" << YAML::Value << s.num_samples;
      out << YAML::Key << "num_layers" << YAML::Value << s.num_layers;
      out << YAML::Key << "base_latency" << YAML::Value << num(s.base_latency);
      out << YAML::Key << "layer_latency_spread" << YAML::Value << num(s.layer_latency_spread);
      out << YAML::Key << "mean_sparsity" << YAML::Value << num(s.mean_sparsity);
      out << YAML::Key << "layer_sparsity_spread" << YAML::Value << num(s.layer_sparsity_spread);
      out << YAML::Key << "relative_range" << YAML::Value << num(s.relative_range);
      out << YAML::Key << "correlation" << YAML::Value << num(s.correlation);
      out << YAML::Key << "latency_coupling" << YAML::Value << num(s.latency_coupling);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::Key << "samples_per_model" << YAML::Value << c.samples_per_model;
  if (!c.workload_file.empty()) out << YAML::Key << "workload_file" << YAML::Value << c.workload_file;
  if (!c.profile_file.empty()) out << YAML::Key << "profile_file" << YAML::Value << c.profile_file;
  out << YAML::Key << "keep_deadlines" << YAML::Value << c.keep_deadlines;
  out << YAML::Key << "profile_holdout" << YAML::Value << num(c.profile_holdout);
  out << YAML::Key << "num_requests" << YAML::Value << c.num_requests;
  out << YAML::Key << "schedulers" << YAML::Value << YAML::Flow << c.schedulers;
  out << YAML::Key << "slo_multiplier" << YAML::Value << YAML::Flow << nums(c.slo_multipliers);
  if (!c.arrival_rates.empty()) out << YAML::Key << "arrival_rate" << YAML::Value << YAML::Flow << nums(c.arrival_rates);
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.seeds;
  const auto& d = c.params.dysta;
  out << YAML::Key << "beta" << YAML::Value << num(d.beta);
  out << YAML::Key << "eta" << YAML::Value << num(d.eta);
  out << YAML::Key << "penalty_sign" << YAML::Value << num(d.penalty_sign);
  out << YAML::Key << "sparsity_aware" << YAML::Value << d.sparsity_aware;
  out << YAML::Key << "coeff_strategy" << YAML::Value << std::string(to_string(d.predictor.strategy));
  if (d.predictor.strategy.kind == CoeffStrategy::Kind::LastN) {
    out << YAML::Key << "last_n" << YAML::Value << d.predictor.strategy.n;
  }
  out << YAML::Key << "alpha" << YAML::Value << num(d.predictor.alpha);
  out << YAML::Key << "gamma_min" << YAML::Value << num(d.predictor.bounds.min);
  out << YAML::Key << "gamma_max" << YAML::Value << num(d.predictor.bounds.max);
  out << YAML::Key << "score_precision" << YAML::Value
      << std::string(d.score_precision == ScorePrecision::Half ? "half" : "full");
  if (c.sdrm3_tune) {
    out << YAML::Key << "sdrm3_alpha" << YAML::Value << "tune";
  } else {
    out << YAML::Key << "sdrm3_alpha" << YAML::Value << num(c.params.sdrm3.alpha_weight);
  }
  out << YAML::Key << "sdrm3_grid" << YAML::Value << YAML::Flow << nums(c.sdrm3_grid);
  out << YAML::Key << "prema_priorities" << YAML::Value << YAML::Flow << c.params.prema.priority_cycle;
  out << YAML::Key << "layer_block" << YAML::Value << c.sim.layer_block;
  out << YAML::Key << "context_switch" << YAML::Value << num(c.sim.context_switch);
  out << YAML::Key << "max_queue" << YAML::Value << c.sim.max_queue;
  out << YAML::Key << "queue_overflow" << YAML::Value
      << std::string(c.sim.overflow == QueueOverflow::Drop ? "drop" : "error");
  if (std::isfinite(c.sim.max_time)) out << YAML::Key << "max_time" << YAML::Value << num(c.sim.max_time);
  out << YAML::Key << "record_log" << YAML::Value << c.sim.record_log;
  if (!c.output_dir.empty()) out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace dysta
