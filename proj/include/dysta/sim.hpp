// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Discrete-event engine for one time-shared accelerator.
//
// Requests execute layer by layer (or k-layer block by block) with latencies
// copied from their traces. The scheduler is invoked whenever the running
// block completes and whenever requests arrive at an idle accelerator.
// Arrivals during a block wait for its boundary. A completion and an arrival
// at the same instant are handled as: finish the block, admit the arrival,
// then make one scheduling decision that sees both.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dysta/csv.hpp"
#include "dysta/predictor.hpp"
#include "dysta/profile.hpp"
#include "dysta/scheduler.hpp"
#include "dysta/workload.hpp"

namespace dysta {

enum class QueueOverflow { Error, Drop };

struct SimConfig {
  int layer_block = 1;           // layers per non-preemptible block
  Seconds context_switch = 0;    // charged to each preemption
  std::size_t max_queue = 0;     // 0 = unbounded
  QueueOverflow overflow = QueueOverflow::Error;
  Seconds max_time = std::numeric_limits<Seconds>::infinity();
  bool record_log = false;
};

struct Segment {
  Seconds start = 0;
  Seconds end = 0;
  std::size_t first_layer = 0;
  std::size_t last_layer = 0;  // exclusive
};

struct RunRecord {
  RequestId id = 0;
  ModelPatternKey key;
  std::string sample_id;
  Seconds arrival = 0;
  Seconds deadline = 0;
  Seconds completion = 0;  // NaN when dropped
  Seconds t_isol = 0;      // true trace sum
  Seconds turnaround = 0;
  bool violated = false;
  bool dropped = false;
  int preemptions = 0;
  std::vector<Segment> segments;
};

struct LogEntry {
  enum class Kind { Arrival, Score, Dispatch, Complete, Drop };
  Seconds time = 0;
  Kind kind = Kind::Score;
  RequestId request_id = 0;
  std::size_t layer_idx = 0;
  std::optional<double> score;
};

inline std::string_view to_string(LogEntry::Kind k) {
  switch (k) {
    case LogEntry::Kind::Arrival: return "arrival";
    case LogEntry::Kind::Score: return "score";
    case LogEntry::Kind::Dispatch: return "dispatch";
    case LogEntry::Kind::Complete: return "complete";
    case LogEntry::Kind::Drop: return "drop";
  }
  return "score";
}

struct DispatchEvent {
  Seconds time = 0;
  RequestId id = 0;
  friend bool operator==(const DispatchEvent&, const DispatchEvent&) = default;
};

struct SimResult {
  std::vector<RunRecord> records;       // sorted by request id
  std::vector<DispatchEvent> dispatches;  // one per scheduler invocation
  std::vector<LogEntry> log;            // filled when SimConfig::record_log
};

/// Whether a completion misses its deadline. The slack absorbs rounding from
/// accumulating layer latencies, which is far below any layer duration.
inline bool misses_deadline(Seconds completion, Seconds deadline) {
  return completion > deadline + 1e-9 * std::max(1.0, std::fabs(deadline));
}

class Engine {
 public:
  Engine(const ProfileStore& profiles, Scheduler& scheduler, SimConfig cfg = {})
      : profiles_(profiles), scheduler_(scheduler), cfg_(cfg) {
    if (cfg_.layer_block < 1) throw ValidationError("layer_block must be >= 1");
    if (!(cfg_.context_switch >= 0)) throw ValidationError("context_switch must be >= 0");
  }

  SimResult run(std::vector<Request> requests) {
    for (const auto& r : requests) {
      validate(r.trace);
      const auto& p = profiles_.lookup(r.key);
      if (p.num_layers() != r.trace.num_layers()) {
        throw ValidationError("request " + std::to_string(r.id) + ": trace has " +
                              std::to_string(r.trace.num_layers()) + " layers, profile " + to_string(r.key) +
                              " has " + std::to_string(p.num_layers()));
      }
    }
    sort_by_arrival(requests);
    reset(std::move(requests));

    const auto n = slots_.size();
    std::size_t next_arrival = 0;
    while (true) {
      const Seconds t_arr = next_arrival < n ? slots_[next_arrival].req.arrival
                                             : std::numeric_limits<Seconds>::infinity();
      if (running_) {
        if (busy_until_ <= t_arr) {
          now_ = busy_until_;
          check_time();
          const auto cur = *running_;
          finish_block(cur);
          admit_until(next_arrival, now_);
          const bool done = slots_[cur].req.finished();
          running_.reset();
          if (active_.empty()) continue;
          invoke(Invocation::LayerBoundary, done ? std::nullopt : std::optional<std::size_t>(cur));
        } else {
          now_ = t_arr;
          check_time();
          admit_until(next_arrival, now_);
        }
      } else {
        if (next_arrival >= n) break;
        now_ = t_arr;
        check_time();
        admit_until(next_arrival, now_);
        if (!active_.empty()) invoke(Invocation::IdleDispatch, std::nullopt);
      }
    }
    return collect();
  }

 private:
  struct Slot {
    Request req;
    MonitorState monitor;
    std::vector<Segment> segments;
    bool dropped = false;
  };

  void reset(std::vector<Request> requests) {
    slots_.clear();
    slots_.reserve(requests.size());
    for (auto& r : requests) {
      r.next_layer = 0;
      r.exec_accum = 0;
      r.completion.reset();
      r.preempt_count = 0;
      slots_.push_back(Slot{std::move(r), {}, {}, false});
    }
    active_.clear();
    running_.reset();
    now_ = 0;
    busy_until_ = 0;
    block_end_ = 0;
    result_ = {};
  }

  void check_time() const {
    if (now_ > cfg_.max_time) {
      throw SimulationError("simulated time exceeded the max_time guard (" + csv::fmt(cfg_.max_time) + " s)");
    }
  }

  QueuedRequest view(std::size_t idx) const {
    const auto& s = slots_[idx];
    QueuedRequest q;
    q.id = s.req.id;
    q.key = s.req.key;
    q.arrival = s.req.arrival;
    q.deadline = s.req.deadline;
    q.next_layer = s.req.next_layer;
    q.num_layers = s.req.trace.num_layers();
    q.exec_accum = s.req.exec_accum;
    q.monitor = &s.monitor;
    if (scheduler_.needs_ground_truth()) {
      Seconds rem = 0;
      for (std::size_t j = s.req.next_layer; j < s.req.trace.num_layers(); ++j) rem += s.req.trace.layers[j].latency;
      q.true_remaining = rem;
      q.true_total = s.req.isolated_latency();
    }
    return q;
  }

  void log(LogEntry::Kind kind, RequestId id, std::size_t layer, std::optional<double> score = std::nullopt) {
    if (cfg_.record_log) result_.log.push_back({now_, kind, id, layer, score});
  }

  void admit_until(std::size_t& next_arrival, Seconds t) {
    while (next_arrival < slots_.size() && slots_[next_arrival].req.arrival <= t) {
      const auto idx = next_arrival++;
      auto& s = slots_[idx];
      if (cfg_.max_queue != 0 && active_.size() >= cfg_.max_queue) {
        if (cfg_.overflow == QueueOverflow::Error) {
          throw SimulationError("queue length exceeded max_queue=" + std::to_string(cfg_.max_queue) +
                                " at t=" + csv::fmt(now_));
        }
        s.dropped = true;
        log(LogEntry::Kind::Drop, s.req.id, 0);
        continue;
      }
      active_.push_back(idx);
      auto score = scheduler_.on_arrival(view(idx), now_, profiles_);
      log(LogEntry::Kind::Arrival, s.req.id, 0, score);
    }
  }

  void finish_block(std::size_t idx) {
    auto& s = slots_[idx];
    auto& r = s.req;
    for (std::size_t j = r.next_layer; j < block_end_; ++j) {
      r.exec_accum += r.trace.layers[j].latency;
      s.monitor.observe(r.trace.layers[j].sparsity);
    }
    r.next_layer = block_end_;
    if (r.finished()) {
      r.completion = now_;
      active_.erase(std::find(active_.begin(), active_.end(), idx));
      scheduler_.on_complete(r.id);
      log(LogEntry::Kind::Complete, r.id, r.next_layer);
    }
  }

  void invoke(Invocation kind, std::optional<std::size_t> prev) {
    std::vector<QueuedRequest> queue;
    queue.reserve(active_.size());
    for (auto idx : active_) queue.push_back(view(idx));
    SchedContext ctx{now_, kind, queue, std::nullopt, &profiles_};
    if (prev) ctx.running = slots_[*prev].req.id;

    Decision d = scheduler_.select(ctx);
    if (cfg_.record_log) {
      for (const auto& sc : d.scores) {
        const auto it = std::find_if(queue.begin(), queue.end(), [&](const auto& q) { return q.id == sc.id; });
        log(LogEntry::Kind::Score, sc.id, it->next_layer, sc.score);
      }
    }
    const auto chosen = std::find_if(active_.begin(), active_.end(),
                                     [&](std::size_t idx) { return slots_[idx].req.id == d.next; });
    if (chosen == active_.end()) {
      throw SimulationError(scheduler_.name() + " selected request " + std::to_string(d.next) +
                            " which is not in the queue");
    }
    result_.dispatches.push_back({now_, d.next});
    std::optional<double> chosen_score;
    for (const auto& sc : d.scores) {
      if (sc.id == d.next) chosen_score = sc.score;
    }
    log(LogEntry::Kind::Dispatch, d.next, slots_[*chosen].req.next_layer, chosen_score);
    start(*chosen, prev);
  }

  void start(std::size_t idx, std::optional<std::size_t> prev) {
    Seconds begin = now_;
    if (prev && *prev != idx) {
      ++slots_[*prev].req.preempt_count;
      begin += cfg_.context_switch;
    }
    auto& s = slots_[idx];
    const auto L = s.req.trace.num_layers();
    block_end_ = std::min(L, s.req.next_layer + static_cast<std::size_t>(cfg_.layer_block));
    Seconds t = begin;
    for (std::size_t j = s.req.next_layer; j < block_end_; ++j) t += s.req.trace.layers[j].latency;
    busy_until_ = t;
    running_ = idx;
    if (prev && *prev == idx && !s.segments.empty()) {
      s.segments.back().end = t;
      s.segments.back().last_layer = block_end_;
    } else {
      s.segments.push_back({begin, t, s.req.next_layer, block_end_});
    }
  }

  SimResult collect() {
    for (auto& s : slots_) {
      const auto& r = s.req;
      RunRecord rec;
      rec.id = r.id;
      rec.key = r.key;
      rec.sample_id = r.trace.sample_id;
      rec.arrival = r.arrival;
      rec.deadline = r.deadline;
      rec.t_isol = r.isolated_latency();
      rec.preemptions = r.preempt_count;
      rec.dropped = s.dropped;
      rec.segments = std::move(s.segments);
      if (s.dropped) {
        rec.completion = std::numeric_limits<Seconds>::quiet_NaN();
        rec.turnaround = std::numeric_limits<Seconds>::quiet_NaN();
        rec.violated = true;
      } else {
        rec.completion = *r.completion;
        rec.turnaround = rec.completion - rec.arrival;
        rec.violated = misses_deadline(rec.completion, rec.deadline);
      }
      result_.records.push_back(std::move(rec));
    }
    std::sort(result_.records.begin(), result_.records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.id < b.id; });
    return std::move(result_);
  }

  const ProfileStore& profiles_;
  Scheduler& scheduler_;
  SimConfig cfg_;

  std::vector<Slot> slots_;
  std::vector<std::size_t> active_;  // arrived and unfinished, in arrival order
  std::optional<std::size_t> running_;
  Seconds now_ = 0;
  Seconds busy_until_ = 0;
  std::size_t block_end_ = 0;
  SimResult result_;
};

inline SimResult run_sim(const std::vector<Request>& requests, const ProfileStore& profiles, Scheduler& scheduler,
                         const SimConfig& cfg = {}) {
  Engine engine(profiles, scheduler, cfg);
  return engine.run(requests);
}

/// Preemption totals from a finished run.
struct PreemptionCounts {
  long total = 0;
  std::vector<std::pair<RequestId, int>> per_request;
};

inline PreemptionCounts preemption_accounting(const std::vector<RunRecord>& records) {
  PreemptionCounts out;
  for (const auto& r : records) {
    out.total += r.preemptions;
    out.per_request.emplace_back(r.id, r.preemptions);
  }
  return out;
}

inline void write_event_log(std::ostream& out, const std::vector<LogEntry>& log) {
  out << "time,kind,request_id,layer_idx,score\n";
  for (const auto& e : log) {
    out << csv::fmt(e.time) << ',' << to_string(e.kind) << ',' << e.request_id << ',' << e.layer_idx << ','
        << (e.score ? csv::fmt(*e.score) : std::string()) << '\n';
  }
}

}  // namespace dysta
