// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "dysta/types.hpp"

namespace dysta {

enum class ScorePrecision { Full, Half };

inline ScorePrecision parse_precision(std::string_view s) {
  if (s == "full") return ScorePrecision::Full;
  if (s == "half") return ScorePrecision::Half;
  throw ValidationError("unknown score precision '" + std::string(s) + "'");
}

inline constexpr double kHalfMax = 65504.0;

/// Rounds to the nearest IEEE binary16 value (ties to even), saturating at
/// the largest finite magnitude instead of overflowing to infinity.
inline double round_to_half(double x) {
  if (x == 0 || std::isnan(x)) return x;
  if (std::isinf(x)) return std::copysign(kHalfMax, x);
  const double ax = std::fabs(x);
  int e = 0;
  std::frexp(ax, &e);  // ax = m * 2^e, m in [0.5, 1)
  const int ulp_exp = std::max(e - 1, -14) - 10;
  double q = std::ldexp(std::nearbyint(std::ldexp(ax, -ulp_exp)), ulp_exp);
  q = std::min(q, kHalfMax);
  return std::copysign(q, x);
}

inline double quantize_score(double score, ScorePrecision p) {
  return p == ScorePrecision::Half ? round_to_half(score) : score;
}

}  // namespace dysta
