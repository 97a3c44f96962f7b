// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference policies. All of them are sparsity-blind: estimates come from the
// profiled average latency of the layers a request has not run yet. Every
// preemptive policy switches only at layer boundaries. docs/BASELINES.md
// describes how each one maps onto time-shared, single-accelerator execution.

#pragma once

#include <algorithm>
#include <limits>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "dysta/dysta.hpp"
#include "dysta/scheduler.hpp"

namespace dysta {

/// Sparsity-blind estimate of the work a request has left.
inline Seconds avg_remaining(const QueuedRequest& r, const ProfileStore& profiles) {
  return profiles.lookup(r.key).remaining_latency(r.next_layer);
}

inline RequestId fcfs_select(std::span<const QueuedRequest> queue, std::optional<RequestId> running) {
  if (running) return *running;
  return pick_min(queue, std::nullopt, [](const QueuedRequest& q) { return q.arrival; });
}

inline RequestId sjf_select(std::span<const QueuedRequest> queue, std::optional<RequestId> running,
                            const ProfileStore& profiles) {
  return pick_min(queue, running, [&](const QueuedRequest& q) { return avg_remaining(q, profiles); });
}

/// Earliest deadline first; equal deadlines favour the shorter remainder.
inline RequestId planaria_select(std::span<const QueuedRequest> queue, std::optional<RequestId> running,
                                 const ProfileStore& profiles) {
  return pick_min(queue, running, [&](const QueuedRequest& q) {
    return std::make_pair(q.deadline, avg_remaining(q, profiles));
  });
}

/// Dysta's dynamic rule driven by true remaining latency.
inline RequestId oracle_select(std::span<const QueuedRequest> queue, Seconds now, std::optional<RequestId> running,
                               const DystaConfig& cfg = {}) {
  const auto scores = oracle_score_all(queue, now, cfg);
  return *select_next(scores, running);
}

struct Sdrm3Config {
  double alpha_weight = 0.5;  // 1 = urgency only, 0 = fairness only
  double pref = 1.0;
  Seconds min_slack = 1e-9;
};

/// MapScore per request: alpha * Urgency + (1 - alpha) * Fairness, each
/// min-max normalised over the queue. Urgency is 1/slack, Fairness is the
/// wait-to-isolated-latency ratio.
inline std::vector<double> sdrm3_scores(std::span<const QueuedRequest> queue, Seconds now,
                                        const ProfileStore& profiles, const Sdrm3Config& cfg) {
  const auto n = queue.size();
  std::vector<double> urgency(n), fairness(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = queue[i];
    const auto& p = profiles.lookup(q.key);
    const Seconds slack = q.deadline - now - p.remaining_latency(q.next_layer);
    urgency[i] = 1.0 / std::max(slack, cfg.min_slack);
    fairness[i] = q.waited(now) / p.avg_total_latency;
  }
  auto normalise = [](std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double min = *lo, span = *hi - *lo;
    for (auto& x : v) x = span > 0 ? (x - min) / span : 0.0;
  };
  normalise(urgency);
  normalise(fairness);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = cfg.pref * (cfg.alpha_weight * urgency[i] + (1 - cfg.alpha_weight) * fairness[i]);
  }
  return out;
}

inline RequestId sdrm3_select(std::span<const QueuedRequest> queue, Seconds now, std::optional<RequestId> running,
                              const ProfileStore& profiles, const Sdrm3Config& cfg) {
  const auto scores = sdrm3_scores(queue, now, profiles, cfg);
  std::vector<ScoredRequest> neg(queue.size());
  for (std::size_t i = 0; i < queue.size(); ++i) neg[i] = {queue[i].id, -scores[i], 0, 0, 0, 1};
  return *select_next(neg, running);
}

// ---------------------------------------------------------------------------

class FcfsScheduler : public Scheduler {
 public:
  std::string name() const override { return "fcfs"; }
  Decision select(const SchedContext& ctx) override { return {fcfs_select(ctx.queue, ctx.running), {}}; }
};

class SjfScheduler : public Scheduler {
 public:
  std::string name() const override { return "sjf"; }
  Decision select(const SchedContext& ctx) override {
    return {sjf_select(ctx.queue, ctx.running, *ctx.profiles), {}};
  }
};

class PlanariaScheduler : public Scheduler {
 public:
  std::string name() const override { return "planaria"; }
  Decision select(const SchedContext& ctx) override {
    return {planaria_select(ctx.queue, ctx.running, *ctx.profiles), {}};
  }
};

class Sdrm3Scheduler : public Scheduler {
 public:
  explicit Sdrm3Scheduler(Sdrm3Config cfg = {}) : cfg_(cfg) {}
  std::string name() const override { return "sdrm3"; }
  Decision select(const SchedContext& ctx) override {
    return {sdrm3_select(ctx.queue, ctx.now, ctx.running, *ctx.profiles, cfg_), {}};
  }

 private:
  Sdrm3Config cfg_;
};

// ---------------------------------------------------------------------------
// PREMA, token-based. Each request holds a token initialised to its priority.
// At every invocation a waiting request earns priority * (elapsed / Lat_avg).
// The threshold is the highest priority present in the queue; requests whose
// token is >= threshold are candidates, and the candidate with the shortest
// estimated remainder runs. A request's token resets to its priority each
// time it is dispatched after waiting.

struct PremaConfig {
  /// Priority of request id i is priority_cycle[i % size].
  std::vector<int> priority_cycle{1};

  int priority(RequestId id) const {
    if (priority_cycle.empty()) return 1;
    return priority_cycle[id % priority_cycle.size()];
  }
};

struct PremaState {
  struct Entry {
    double tokens = 0;
    int priority = 1;
    Seconds last_update = 0;
  };
  std::unordered_map<RequestId, Entry> entries;

  void admit(RequestId id, int priority, Seconds now) { entries[id] = {static_cast<double>(priority), priority, now}; }

  const Entry& at(RequestId id) const { return entries.at(id); }
};

inline RequestId prema_select(PremaState& state, std::span<const QueuedRequest> queue, Seconds now,
                              std::optional<RequestId> running, const ProfileStore& profiles) {
  int threshold = 0;
  for (const auto& q : queue) {
    auto& e = state.entries.at(q.id);
    if (!(running && q.id == *running)) {
      e.tokens += e.priority * (now - e.last_update) / profiles.lookup(q.key).avg_total_latency;
    }
    e.last_update = now;
    threshold = std::max(threshold, e.priority);
  }
  std::vector<QueuedRequest> candidates;
  for (const auto& q : queue) {
    if (state.entries.at(q.id).tokens >= threshold) candidates.push_back(q);
  }
  const auto next = sjf_select(candidates, running, profiles);
  if (!(running && next == *running)) {
    auto& e = state.entries.at(next);
    e.tokens = e.priority;
  }
  return next;
}

class PremaScheduler : public Scheduler {
 public:
  explicit PremaScheduler(PremaConfig cfg = {}) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "prema"; }

  std::optional<double> on_arrival(const QueuedRequest& r, Seconds now, const ProfileStore&) override {
    state_.admit(r.id, cfg_.priority(r.id), now);
    return std::nullopt;
  }

  Decision select(const SchedContext& ctx) override {
    return {prema_select(state_, ctx.queue, ctx.now, ctx.running, *ctx.profiles), {}};
  }

  void on_complete(RequestId id) override { state_.entries.erase(id); }

  const PremaState& state() const { return state_; }

 private:
  PremaConfig cfg_;
  PremaState state_;
};

}  // namespace dysta
