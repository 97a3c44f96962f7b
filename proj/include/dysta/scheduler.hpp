// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// The contract between the simulation engine and scheduling policies.
//
// Policies see requests only through QueuedRequest: arrival, deadline,
// progress and the monitored sparsities of layers already executed. Trace
// entries of layers that have not run are not reachable, except for policies
// that explicitly ask for ground truth (the oracle).

#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dysta/predictor.hpp"
#include "dysta/profile.hpp"
#include "dysta/types.hpp"

namespace dysta {

struct QueuedRequest {
  RequestId id = 0;
  ModelPatternKey key;
  Seconds arrival = 0;
  Seconds deadline = 0;
  std::size_t next_layer = 0;
  std::size_t num_layers = 0;
  Seconds exec_accum = 0;
  const MonitorState* monitor = nullptr;

  // Populated only for schedulers with needs_ground_truth().
  std::optional<Seconds> true_remaining;
  std::optional<Seconds> true_total;

  /// Time spent in the system without executing.
  Seconds waited(Seconds now) const { return now - arrival - exec_accum; }
};

enum class Invocation {
  LayerBoundary,  // the running request just finished a layer (or block)
  IdleDispatch,   // the accelerator was idle and requests arrived
};

struct SchedContext {
  Seconds now = 0;
  Invocation kind = Invocation::LayerBoundary;
  std::span<const QueuedRequest> queue;  // every arrived, unfinished request
  std::optional<RequestId> running;      // holder of the accelerator, if unfinished
  const ProfileStore* profiles = nullptr;
};

struct ScoredRequest {
  RequestId id = 0;
  double score = 0;
  Seconds remaining_est = 0;
  Seconds slack = 0;
  double penalty = 0;
  double gamma = 1;
};

struct Decision {
  RequestId next = 0;
  std::vector<ScoredRequest> scores;  // optional, for the event log
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual std::string name() const = 0;

  virtual bool needs_ground_truth() const { return false; }

  /// Called once per request when it enters the queue. May return an
  /// admission score for the event log.
  virtual std::optional<double> on_arrival(const QueuedRequest&, Seconds /*now*/, const ProfileStore&) {
    return std::nullopt;
  }

  /// Picks the request to run next. The queue is never empty.
  virtual Decision select(const SchedContext& ctx) = 0;

  virtual void on_complete(RequestId) {}
};

/// Argmin of score. Ties go to the running request when it is among the
/// minima, otherwise to the lowest id. Empty input means nothing to run.
inline std::optional<RequestId> select_next(std::span<const ScoredRequest> scored,
                                            std::optional<RequestId> running = std::nullopt) {
  const ScoredRequest* best = nullptr;
  for (const auto& s : scored) {
    if (!best || s.score < best->score) {
      best = &s;
      continue;
    }
    if (s.score == best->score) {
      const bool s_run = running && s.id == *running;
      const bool b_run = running && best->id == *running;
      if (s_run || (!b_run && s.id < best->id)) best = &s;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

/// Request minimising `key` (any totally ordered value, e.g. a tuple), with
/// the same tie rule as select_next.
template <typename KeyFn>
RequestId pick_min(std::span<const QueuedRequest> queue, std::optional<RequestId> running, KeyFn&& key) {
  const QueuedRequest* best = nullptr;
  decltype(key(queue.front())) best_key{};
  for (const auto& q : queue) {
    auto k = key(q);
    if (!best || k < best_key) {
      best = &q;
      best_key = std::move(k);
      continue;
    }
    if (!(best_key < k)) {
      const bool q_run = running && q.id == *running;
      const bool b_run = running && best->id == *running;
      if (q_run || (!b_run && q.id < best->id)) {
        best = &q;
        best_key = std::move(k);
      }
    }
  }
  return best->id;
}

}  // namespace dysta
