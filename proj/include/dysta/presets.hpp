// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic benchmark presets. "attnn" mimics a mix of transformer models
// with input-dependent attention sparsity (wide per-input latency swings,
// arrival rates around 10-40 req/s); "cnn" mimics pruned CNNs with ReLU
// activation sparsity (moderate swings, rates around 2-6 req/s).

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dysta/types.hpp"
#include "dysta/workload.hpp"

namespace dysta {

struct BenchmarkPreset {
  std::string name;
  std::vector<SynthSpec> models;
  std::vector<double> rates;  // low, mid, high
  double default_rate = 0;
};

inline SynthSpec synth_model(std::string name, Pattern pattern, int layers, Seconds base, double mean_sparsity,
                             double relative_range, double correlation, double coupling, int samples) {
  SynthSpec s;
  s.model_name = std::move(name);
  s.pattern = pattern;
  s.num_layers = layers;
  s.base_latency = base;
  s.layer_latency_spread = 0.3;
  s.mean_sparsity = mean_sparsity;
  s.layer_sparsity_spread = 0.05;
  s.relative_range = relative_range;
  s.correlation = correlation;
  s.latency_coupling = coupling;
  s.num_samples = samples;
  return s;
}

inline BenchmarkPreset attnn_preset(int samples_per_model = 200) {
  const auto P = Pattern::DynamicAttention;
  return {"attnn",
          {
              synth_model("bert", P, 12, 1.5e-3, 0.80, 0.30, 0.9, 1.0, samples_per_model),
              synth_model("gpt2", P, 12, 2.5e-3, 0.75, 0.30, 0.9, 1.0, samples_per_model),
              synth_model("bart", P, 24, 1.6e-3, 0.85, 0.30, 0.9, 1.0, samples_per_model),
          },
          {10, 30, 40},
          30};
}

inline BenchmarkPreset cnn_preset(int samples_per_model = 200) {
  return {"cnn",
          {
              synth_model("resnet50", Pattern::PointwiseRandom, 16, 15e-3, 0.40, 0.151, 0.9, 1.0, samples_per_model),
              synth_model("resnet50", Pattern::Channelwise, 16, 19e-3, 0.40, 0.151, 0.9, 1.0, samples_per_model),
              synth_model("vgg16", Pattern::PointwiseRandom, 13, 35e-3, 0.35, 0.218, 0.9, 1.0, samples_per_model),
              synth_model("mobilenet", Pattern::Channelwise, 14, 4e-3, 0.30, 0.20, 0.9, 1.0, samples_per_model),
              synth_model("googlenet", Pattern::PointwiseRandom, 22, 9e-3, 0.30, 0.283, 0.9, 1.0, samples_per_model),
              synth_model("inceptionv3", Pattern::BlockNM, 20, 20e-3, 0.35, 0.23, 0.9, 1.0, samples_per_model),
          },
          {2, 3, 6},
          3};
}

inline BenchmarkPreset preset_by_name(std::string_view name, int samples_per_model = 200) {
  if (name == "attnn") return attnn_preset(samples_per_model);
  if (name == "cnn") return cnn_preset(samples_per_model);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

/// Trace pool for a preset. Each model gets its own generator stream.
inline std::vector<SampleTrace> preset_pool(const BenchmarkPreset& preset, std::uint64_t seed) {
  std::vector<SampleTrace> pool;
  for (const auto& m : preset.models) {
    auto traces = synth_traces(m, seed);
    pool.insert(pool.end(), std::make_move_iterator(traces.begin()), std::make_move_iterator(traces.end()));
  }
  return pool;
}

}  // namespace dysta
