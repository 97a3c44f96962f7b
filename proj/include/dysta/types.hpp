// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Core vocabulary shared by every module: time units, sparsity patterns,
// model keys and the exception hierarchy.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dysta {

/// Simulated wall-clock time and durations, in seconds.
using Seconds = double;

using RequestId = std::uint32_t;

enum class Pattern : std::uint8_t {
  Dense,
  PointwiseRandom,
  BlockNM,
  Channelwise,
  DynamicAttention,
};

inline constexpr std::string_view to_string(Pattern p) {
  switch (p) {
    case Pattern::Dense: return "dense";
    case Pattern::PointwiseRandom: return "pointwise_random";
    case Pattern::BlockNM: return "block_nm";
    case Pattern::Channelwise: return "channelwise";
    case Pattern::DynamicAttention: return "dynamic_attention";
  }
  return "dense";
}

inline std::optional<Pattern> parse_pattern(std::string_view s) {
  for (auto p : {Pattern::Dense, Pattern::PointwiseRandom, Pattern::BlockNM,
                 Pattern::Channelwise, Pattern::DynamicAttention}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

struct ModelPatternKey {
  std::string model_name;
  Pattern pattern = Pattern::Dense;

  friend bool operator==(const ModelPatternKey&, const ModelPatternKey&) = default;
  friend auto operator<=>(const ModelPatternKey&, const ModelPatternKey&) = default;
};

inline std::string to_string(const ModelPatternKey& k) {
  return k.model_name + "/" + std::string(to_string(k.pattern));
}

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text; `line` is 1-based, 0 when not applicable.
struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct ValidationError : Error {
  using Error::Error;
};

struct UnknownModelError : Error {
  explicit UnknownModelError(const ModelPatternKey& k)
      : Error("unknown model-pattern pair: " + to_string(k)), key(k) {}
  ModelPatternKey key;
};

struct SimulationError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dysta

template <>
struct std::hash<dysta::ModelPatternKey> {
  std::size_t operator()(const dysta::ModelPatternKey& k) const noexcept {
    std::size_t h = std::hash<std::string>{}(k.model_name);
    return h ^ (static_cast<std::size_t>(k.pattern) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};
