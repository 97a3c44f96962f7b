// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "dysta/baselines.hpp"
#include "dysta/dysta.hpp"

namespace dysta {

struct SchedulerParams {
  DystaConfig dysta{};
  Sdrm3Config sdrm3{};
  PremaConfig prema{};
};

inline constexpr std::array<std::string_view, 8> kSchedulerNames = {
    "fcfs", "sjf", "prema", "planaria", "sdrm3", "oracle", "dysta", "dysta_static_only"};

inline bool is_scheduler_name(std::string_view name) {
  for (auto n : kSchedulerNames) {
    if (n == name) return true;
  }
  return false;
}

inline std::unique_ptr<Scheduler> make_scheduler(std::string_view name, const SchedulerParams& p = {}) {
  if (name == "fcfs") return std::make_unique<FcfsScheduler>();
  if (name == "sjf") return std::make_unique<SjfScheduler>();
  if (name == "prema") return std::make_unique<PremaScheduler>(p.prema);
  if (name == "planaria") return std::make_unique<PlanariaScheduler>();
  if (name == "sdrm3") return std::make_unique<Sdrm3Scheduler>(p.sdrm3);
  if (name == "oracle") return std::make_unique<DystaScheduler>(p.dysta, true);
  if (name == "dysta") return std::make_unique<DystaScheduler>(p.dysta);
  if (name == "dysta_static_only") {
    auto cfg = p.dysta;
    cfg.dynamic = false;
    return std::make_unique<DystaScheduler>(cfg);
  }
  throw ConfigError("unknown scheduler '" + std::string(name) + "'");
}

}  // namespace dysta
