// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bi-level sparsity-aware scheduler.
//
// Static level, once per request at admission, from profiled averages only:
//
//   Lat   = avg_total_latency(model, pattern)
//   slack = (deadline - arrival) - Lat
//   score = Lat + beta * slack
//
// Dynamic level, at every layer boundary, for every queued request i:
//
//   rem_i     = alpha * gamma_i * sum of avg latency of layers not yet run
//   slack_i   = deadline_i - now - rem_i
//   penalty_i = (wait_i / (alpha * gamma_i * avg_total_i)) / |queue|
//   score_i   = rem_i + eta * (slack_i + sign * penalty_i)
//
// where gamma_i comes from request i's own monitored sparsities. The request
// with the lowest score runs next.

#pragma once

#include <unordered_map>

#include "dysta/half.hpp"
#include "dysta/predictor.hpp"
#include "dysta/scheduler.hpp"

namespace dysta {

struct DystaConfig {
  double beta = 0.5;
  double eta = 1e-3;
  PredictorConfig predictor{};
  ScorePrecision score_precision = ScorePrecision::Full;
  double penalty_sign = 1.0;  // -1 subtracts the penalty instead
  bool sparsity_aware = true;  // false pins gamma to 1
  bool dynamic = true;         // false ranks by the admission score only
};

inline ScoredRequest static_score(const QueuedRequest& r, const ModelProfile& profile, const DystaConfig& cfg) {
  if (!(profile.key == r.key)) throw UnknownModelError(r.key);
  ScoredRequest s;
  s.id = r.id;
  s.remaining_est = profile.avg_total_latency;
  s.slack = (r.deadline - r.arrival) - s.remaining_est;
  s.score = quantize_score(s.remaining_est + cfg.beta * s.slack, cfg.score_precision);
  return s;
}

/// Dynamic score of one request; `remaining` and `isolated` are the
/// predicted remaining and isolated latency.
inline ScoredRequest dynamic_score(const QueuedRequest& r, Seconds now, std::size_t queue_len, Seconds remaining,
                                   Seconds isolated, double gamma, const DystaConfig& cfg) {
  ScoredRequest s;
  s.id = r.id;
  s.gamma = gamma;
  s.remaining_est = remaining;
  s.slack = r.deadline - now - remaining;
  s.penalty = isolated > 0 ? (r.waited(now) / isolated) / static_cast<double>(queue_len) : 0.0;
  s.score = quantize_score(remaining + cfg.eta * (s.slack + cfg.penalty_sign * s.penalty), cfg.score_precision);
  return s;
}

inline std::vector<ScoredRequest> dynamic_score_all(std::span<const QueuedRequest> queue, Seconds now,
                                                    const ProfileStore& profiles, const DystaConfig& cfg) {
  std::vector<ScoredRequest> out;
  out.reserve(queue.size());
  const auto& pc = cfg.predictor;
  for (const auto& r : queue) {
    const auto& profile = profiles.lookup(r.key);
    double gamma = 1.0;
    if (cfg.sparsity_aware && r.monitor) gamma = sparsity_coeff(*r.monitor, profile, pc.strategy, pc.bounds).gamma;
    const Seconds remaining = predict_remaining(profile, gamma, r.next_layer, pc.alpha);
    const Seconds isolated = pc.alpha * gamma * profile.avg_total_latency;
    out.push_back(dynamic_score(r, now, queue.size(), remaining, isolated, gamma, cfg));
  }
  return out;
}

/// Dynamic scores with every estimate replaced by the request's true
/// remaining and isolated latency (requires ground truth in the view).
inline std::vector<ScoredRequest> oracle_score_all(std::span<const QueuedRequest> queue, Seconds now,
                                                   const DystaConfig& cfg) {
  std::vector<ScoredRequest> out;
  out.reserve(queue.size());
  for (const auto& r : queue) {
    if (!r.true_remaining || !r.true_total) throw SimulationError("oracle scoring needs ground-truth latencies");
    out.push_back(dynamic_score(r, now, queue.size(), *r.true_remaining, *r.true_total, 1.0, cfg));
  }
  return out;
}

/// The Dysta policy. With `perfect_prediction` every latency estimate is
/// replaced by the request's true value, which is the oracle baseline.
class DystaScheduler : public Scheduler {
 public:
  explicit DystaScheduler(DystaConfig cfg = {}, bool perfect_prediction = false)
      : cfg_(cfg), perfect_(perfect_prediction) {}

  std::string name() const override {
    if (perfect_) return "oracle";
    return cfg_.dynamic ? "dysta" : "dysta_static_only";
  }

  bool needs_ground_truth() const override { return perfect_; }

  const DystaConfig& config() const { return cfg_; }

  std::optional<double> on_arrival(const QueuedRequest& r, Seconds, const ProfileStore& profiles) override {
    auto s = static_score(r, profiles.lookup(r.key), cfg_);
    if (perfect_) {
      s.remaining_est = *r.true_total;
      s.slack = (r.deadline - r.arrival) - s.remaining_est;
      s.score = quantize_score(s.remaining_est + cfg_.beta * s.slack, cfg_.score_precision);
    }
    static_scores_[r.id] = s;
    return s.score;
  }

  Decision select(const SchedContext& ctx) override {
    Decision d;
    if (!cfg_.dynamic || ctx.kind == Invocation::IdleDispatch) {
      for (const auto& r : ctx.queue) d.scores.push_back(static_scores_.at(r.id));
    } else if (perfect_) {
      d.scores = oracle_score_all(ctx.queue, ctx.now, cfg_);
    } else {
      d.scores = dynamic_score_all(ctx.queue, ctx.now, *ctx.profiles, cfg_);
    }
    d.next = *select_next(d.scores, ctx.running);
    return d;
  }

  void on_complete(RequestId id) override { static_scores_.erase(id); }

 private:
  DystaConfig cfg_;
  bool perfect_;
  std::unordered_map<RequestId, ScoredRequest> static_scores_;
};

}  // namespace dysta
