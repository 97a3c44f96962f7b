// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sweep harness: expands a ScenarioConfig into (scheduler, slo_multiplier,
// arrival_rate, seed) cells, runs each cell as an isolated single-threaded
// simulation, and writes reports and plot-ready tables.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "dysta/config.hpp"
#include "dysta/metrics.hpp"
#include "dysta/presets.hpp"
#include "dysta/profile.hpp"
#include "dysta/registry.hpp"
#include "dysta/sim.hpp"
#include "dysta/workload.hpp"

namespace dysta {

struct Cell {
  std::string scheduler;
  double slo_multiplier = 0;
  double arrival_rate = 0;  // 0 when arrivals come from a workload file
  std::uint64_t seed = 0;

  std::string label() const {
    return scheduler + " M=" + csv::fmt(slo_multiplier) + " rate=" + csv::fmt(arrival_rate) +
           " seed=" + std::to_string(seed);
  }
};

/// Thrown when a cell's simulation fails; names the cell.
class CellError : public Error {
 public:
  CellError(const Cell& cell, const std::string& what) : Error(cell.label() + ": " + what) {}
};

struct CellResult {
  Cell cell;
  MetricsReport report;
  std::vector<LogEntry> log;
};

/// Aggregation key: (scheduler, slo_multiplier, arrival_rate).
using AxisKey = std::tuple<std::string, double, double>;

struct ExperimentResult {
  std::vector<CellResult> cells;  // grid order: scheduler, M, rate, seed
  std::map<AxisKey, SeedSummary> aggregates;
  double sdrm3_alpha = 0;
  std::vector<std::pair<double, SeedSummary>> sdrm3_tuning;  // empty unless tuned
};

/// Everything a seed needs, shared read-only across that seed's cells.
struct SeedInputs {
  std::vector<SampleTrace> pool;  // workload side of the split
  ProfileStore profiles;
  std::vector<Request> fixed_workload;  // non-empty with workload_file
};

inline std::vector<double> effective_rates(const ScenarioConfig& c) {
  if (!c.arrival_rates.empty()) return c.workload_file.empty() ? c.arrival_rates : std::vector<double>{0.0};
  if (!c.workload_file.empty()) return {0.0};
  return {preset_by_name(c.preset).default_rate};
}

inline std::vector<SampleTrace> scenario_pool(const ScenarioConfig& c, std::uint64_t seed) {
  if (!c.trace_file.empty()) return load_traces(c.trace_file);
  if (!c.preset.empty()) return preset_pool(preset_by_name(c.preset, c.samples_per_model), seed);
  std::vector<SampleTrace> pool;
  for (const auto& s : c.synth) {
    auto t = synth_traces(s, seed);
    pool.insert(pool.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  return pool;
}

inline SeedInputs prepare_seed(const ScenarioConfig& c, std::uint64_t seed) {
  SeedInputs in;
  auto split = holdout_split(scenario_pool(c, seed), c.profile_holdout, seed);
  in.profiles = c.profile_file.empty() ? build_profiles(split.profile_set) : load_profiles(c.profile_file);
  in.pool = std::move(split.workload_set);
  if (!c.workload_file.empty()) {
    std::ifstream f(c.workload_file);
    if (!f) throw Error("cannot open workload file '" + c.workload_file + "'");
    in.fixed_workload = read_workload(f, in.pool);
  }
  return in;
}

inline std::vector<Request> cell_workload(const ScenarioConfig& c, const SeedInputs& in, const Cell& cell) {
  if (!in.fixed_workload.empty()) {
    auto reqs = in.fixed_workload;
    if (!c.keep_deadlines && !assign_slos(reqs, cell.slo_multiplier)) {
      throw ConfigError("slo_multiplier must be > 1");
    }
    return reqs;
  }
  return gen_arrivals(WorkloadSpec{in.pool, cell.arrival_rate, c.num_requests, cell.slo_multiplier, cell.seed});
}

inline CellResult run_cell(const ScenarioConfig& c, const SchedulerParams& params, const SeedInputs& in,
                           const Cell& cell) {
  try {
    auto sched = make_scheduler(cell.scheduler, params);
    auto res = run_sim(cell_workload(c, in, cell), in.profiles, *sched, c.sim);
    return {cell, make_report(std::move(res.records), cell.seed), std::move(res.log)};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw CellError(cell, e.what());
  }
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(jobs, static_cast<int>(n))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Selection rule for the SDRM3 weight: lowest mean violation rate, then
/// lowest mean ANTT, then the smaller weight.
inline bool better_tuning(const SeedSummary& a, double wa, const SeedSummary& b, double wb) {
  return std::tie(a.violation_rate.mean, a.antt.mean, wa) < std::tie(b.violation_rate.mean, b.antt.mean, wb);
}

/// Grid search of the SDRM3 urgency/fairness weight on the first
/// (slo_multiplier, rate) cell, over the configured seeds.
inline std::vector<std::pair<double, SeedSummary>> tune_sdrm3(const ScenarioConfig& c,
                                                              const std::vector<SeedInputs>& inputs, int jobs) {
  const auto rate = effective_rates(c).front();
  const auto n_seeds = c.seeds.size();
  std::vector<MetricsReport> reports(c.sdrm3_grid.size() * n_seeds);
  parallel_for(reports.size(), jobs, [&](std::size_t i) {
    auto params = c.params;
    params.sdrm3.alpha_weight = c.sdrm3_grid[i / n_seeds];
    const Cell cell{"sdrm3", c.slo_multipliers.front(), rate, c.seeds[i % n_seeds]};
    reports[i] = run_cell(c, params, inputs[i % n_seeds], cell).report;
  });
  std::vector<std::pair<double, SeedSummary>> out;
  for (std::size_t g = 0; g < c.sdrm3_grid.size(); ++g) {
    std::vector<MetricsReport> slice(reports.begin() + static_cast<std::ptrdiff_t>(g * n_seeds),
                                     reports.begin() + static_cast<std::ptrdiff_t>((g + 1) * n_seeds));
    out.emplace_back(c.sdrm3_grid[g], aggregate_seeds(slice));
  }
  return out;
}

inline std::vector<Cell> expand_cells(const ScenarioConfig& c) {
  std::vector<Cell> cells;
  for (const auto& s : c.schedulers) {
    for (double m : c.slo_multipliers) {
      for (double r : effective_rates(c)) {
        for (auto seed : c.seeds) cells.push_back({s, m, r, seed});
      }
    }
  }
  return cells;
}

inline ExperimentResult run_experiment(const ScenarioConfig& c, int jobs = 1) {
  validate(c);
  std::vector<SeedInputs> inputs(c.seeds.size());
  parallel_for(inputs.size(), jobs, [&](std::size_t i) { inputs[i] = prepare_seed(c, c.seeds[i]); });
  std::map<std::uint64_t, std::size_t> seed_index;
  for (std::size_t i = 0; i < c.seeds.size(); ++i) seed_index[c.seeds[i]] = i;

  ExperimentResult out;
  auto params = c.params;
  const bool has_sdrm3 = std::find(c.schedulers.begin(), c.schedulers.end(), "sdrm3") != c.schedulers.end();
  if (c.sdrm3_tune && has_sdrm3) {
    out.sdrm3_tuning = tune_sdrm3(c, inputs, jobs);
    const auto* best = &out.sdrm3_tuning.front();
    for (const auto& t : out.sdrm3_tuning) {
      if (better_tuning(t.second, t.first, best->second, best->first)) best = &t;
    }
    params.sdrm3.alpha_weight = best->first;
  }
  out.sdrm3_alpha = params.sdrm3.alpha_weight;

  const auto cells = expand_cells(c);
  out.cells.resize(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    out.cells[i] = run_cell(c, params, inputs[seed_index.at(cells[i].seed)], cells[i]);
  });

  std::map<AxisKey, std::vector<MetricsReport>> grouped;
  for (const auto& r : out.cells) {
    grouped[{r.cell.scheduler, r.cell.slo_multiplier, r.cell.arrival_rate}].push_back(r.report);
  }
  for (const auto& [k, v] : grouped) out.aggregates[k] = aggregate_seeds(v);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline void write_summary_csv(std::ostream& out, const ExperimentResult& r) {
  out << "scheduler,slo_multiplier,arrival_rate,seed,antt,violation_rate,stp,preemptions\n";
  for (const auto& c : r.cells) {
    out << c.cell.scheduler << ',' << csv::fmt(c.cell.slo_multiplier) << ',' << csv::fmt(c.cell.arrival_rate) << ','
        << c.cell.seed << ',' << csv::fmt(c.report.antt) << ',' << csv::fmt(c.report.violation_rate) << ','
        << csv::fmt(c.report.stp) << ',' << c.report.total_preemptions << '\n';
  }
}

inline void write_requests_csv(std::ostream& out, const ExperimentResult& r) {
  out << "scheduler,slo_multiplier,arrival_rate,seed,request_id,model_name,pattern,sample_id,arrival_s,deadline_s,"
         "completion_s,t_isol_s,turnaround_s,violated,dropped,preemptions\n";
  for (const auto& c : r.cells) {
    for (const auto& q : c.report.per_request) {
      out << c.cell.scheduler << ',' << csv::fmt(c.cell.slo_multiplier) << ',' << csv::fmt(c.cell.arrival_rate)
          << ',' << c.cell.seed << ',' << q.id << ',' << q.key.model_name << ',' << to_string(q.key.pattern) << ','
          << q.sample_id << ',' << csv::fmt(q.arrival) << ',' << csv::fmt(q.deadline) << ','
          << (q.dropped ? "" : csv::fmt(q.completion)) << ',' << csv::fmt(q.t_isol) << ','
          << (q.dropped ? "" : csv::fmt(q.turnaround)) << ',' << int(q.violated) << ',' << int(q.dropped) << ','
          << q.preemptions << '\n';
    }
  }
}

inline void write_aggregate_csv(std::ostream& out, const ExperimentResult& r) {
  out << "scheduler,slo_multiplier,arrival_rate,seeds,antt_mean,antt_std,violation_mean,violation_std,stp_mean,"
         "stp_std,preemptions_mean,preemptions_std\n";
  for (const auto& [k, s] : r.aggregates) {
    out << std::get<0>(k) << ',' << csv::fmt(std::get<1>(k)) << ',' << csv::fmt(std::get<2>(k)) << ',' << s.seeds
        << ',' << csv::fmt(s.antt.mean) << ',' << csv::fmt(s.antt.stddev) << ',' << csv::fmt(s.violation_rate.mean)
        << ',' << csv::fmt(s.violation_rate.stddev) << ',' << csv::fmt(s.stp.mean) << ','
        << csv::fmt(s.stp.stddev) << ',' << csv::fmt(s.preemptions.mean) << ',' << csv::fmt(s.preemptions.stddev)
        << '\n';
  }
}

inline nlohmann::json summary_json(const ScenarioConfig& c, const ExperimentResult& r) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& x : r.cells) {
    cells.push_back({{"scheduler", x.cell.scheduler},
                     {"slo_multiplier", x.cell.slo_multiplier},
                     {"arrival_rate", x.cell.arrival_rate},
                     {"seed", x.cell.seed},
                     {"antt", x.report.antt},
                     {"violation_rate", x.report.violation_rate},
                     {"stp", x.report.stp},
                     {"preemptions", x.report.total_preemptions}});
  }
  json agg = json::array();
  for (const auto& [k, s] : r.aggregates) {
    agg.push_back({{"scheduler", std::get<0>(k)},
                   {"slo_multiplier", std::get<1>(k)},
                   {"arrival_rate", std::get<2>(k)},
                   {"seeds", s.seeds},
                   {"antt", {{"mean", s.antt.mean}, {"std", s.antt.stddev}}},
                   {"violation_rate", {{"mean", s.violation_rate.mean}, {"std", s.violation_rate.stddev}}},
                   {"stp", {{"mean", s.stp.mean}, {"std", s.stp.stddev}}},
                   {"preemptions", {{"mean", s.preemptions.mean}, {"std", s.preemptions.stddev}}}});
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"name", c.name}, {"generated_at", stamp}, {"sdrm3_alpha", r.sdrm3_alpha}, {"cells", cells},
          {"aggregates", agg}};
}

enum class PlotKind { Tradeoff, VsSlo, VsRate };

inline std::string plot_file_name(PlotKind k) {
  switch (k) {
    case PlotKind::Tradeoff: return "tradeoff.csv";
    case PlotKind::VsSlo: return "vs_slo.csv";
    case PlotKind::VsRate: return "vs_rate.csv";
  }
  return "plot.csv";
}

/// Long-format figure tables. The trade-off table uses the first SLO
/// multiplier; vs_slo and vs_rate cover the full grid. Every requested
/// (scheduler, M, rate) point must be present in `aggregates`.
inline void emit_plot_data(std::ostream& out, const std::map<AxisKey, SeedSummary>& aggregates, PlotKind kind,
                           const std::vector<std::string>& schedulers, const std::vector<double>& slos,
                           const std::vector<double>& rates) {
  std::vector<std::string> missing;
  auto get = [&](const std::string& s, double m, double r) -> const SeedSummary* {
    const auto it = aggregates.find({s, m, r});
    if (it == aggregates.end()) {
      missing.push_back("(" + s + ", M=" + csv::fmt(m) + ", rate=" + csv::fmt(r) + ")");
      return nullptr;
    }
    return &it->second;
  };
  std::ostringstream body;
  switch (kind) {
    case PlotKind::Tradeoff:
      body << "scheduler,rate,antt,violation\n";
      for (double r : rates) {
        for (const auto& s : schedulers) {
          if (const auto* a = get(s, slos.front(), r)) {
            body << s << ',' << csv::fmt(r) << ',' << csv::fmt(a->antt.mean) << ','
                 << csv::fmt(a->violation_rate.mean) << '\n';
          }
        }
      }
      break;
    case PlotKind::VsSlo:
      body << "scheduler,rate,slo_multiplier,antt,violation,stp\n";
      for (const auto& s : schedulers) {
        for (double r : rates) {
          for (double m : slos) {
            if (const auto* a = get(s, m, r)) {
              body << s << ',' << csv::fmt(r) << ',' << csv::fmt(m) << ',' << csv::fmt(a->antt.mean) << ','
                   << csv::fmt(a->violation_rate.mean) << ',' << csv::fmt(a->stp.mean) << '\n';
            }
          }
        }
      }
      break;
    case PlotKind::VsRate:
      body << "scheduler,slo_multiplier,rate,antt,violation,stp\n";
      for (const auto& s : schedulers) {
        for (double m : slos) {
          for (double r : rates) {
            if (const auto* a = get(s, m, r)) {
              body << s << ',' << csv::fmt(m) << ',' << csv::fmt(r) << ',' << csv::fmt(a->antt.mean) << ','
                   << csv::fmt(a->violation_rate.mean) << ',' << csv::fmt(a->stp.mean) << '\n';
            }
          }
        }
      }
      break;
  }
  if (!missing.empty()) {
    std::string msg = "plot data missing cells:";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }
  out << body.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

/// Writes every report under `dir`. Plot tables are written when `plots`.
inline void write_reports(const std::filesystem::path& dir, const ScenarioConfig& c, const ExperimentResult& r,
                          bool plots) {
  std::filesystem::create_directories(dir);
  auto emit = [&](const std::string& name, auto&& writer) {
    std::ostringstream ss;
    writer(ss);
    write_text(dir / name, ss.str());
  };
  emit("summary.csv", [&](std::ostream& o) { write_summary_csv(o, r); });
  emit("requests.csv", [&](std::ostream& o) { write_requests_csv(o, r); });
  emit("aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, r); });
  emit("summary.json", [&](std::ostream& o) { o << summary_json(c, r).dump(2) << '\n'; });
  emit("config.resolved.yaml", [&](std::ostream& o) { o << serialize_config(c); });
  if (!r.sdrm3_tuning.empty()) {
    emit("sdrm3_tuning.csv", [&](std::ostream& o) {
      o << "alpha_weight,antt_mean,violation_mean,selected\n";
      for (const auto& [a, s] : r.sdrm3_tuning) {
        o << csv::fmt(a) << ',' << csv::fmt(s.antt.mean) << ',' << csv::fmt(s.violation_rate.mean) << ','
          << int(a == r.sdrm3_alpha) << '\n';
      }
    });
  }
  if (plots) {
    for (auto k : {PlotKind::Tradeoff, PlotKind::VsSlo, PlotKind::VsRate}) {
      emit(plot_file_name(k), [&](std::ostream& o) {
        emit_plot_data(o, r.aggregates, k, c.schedulers, c.slo_multipliers, effective_rates(c));
      });
    }
  }
  if (c.sim.record_log) {
    std::filesystem::create_directories(dir / "logs");
    for (const auto& x : r.cells) {
      const auto name = x.cell.scheduler + "_m" + csv::fmt(x.cell.slo_multiplier) + "_r" +
                        csv::fmt(x.cell.arrival_rate) + "_s" + std::to_string(x.cell.seed) + ".csv";
      std::ostringstream ss;
      write_event_log(ss, x.log);
      write_text(dir / "logs" / name, ss.str());
    }
  }
}

}  // namespace dysta
