// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// dysta: command-line harness.
//
//   dysta run --config scenario.yaml [--out DIR] [--scheduler NAME]
//   dysta sweep --config scenario.yaml [--out DIR] [--jobs N] [--seed-override 0,1,2]
//   dysta rmse --config scenario.yaml [--out DIR]
//   dysta fixture KIND [--out DIR]
//   dysta validate-traces FILE...
//
// Exit status: 0 success, 1 simulation or input-data error, 2 bad config or
// command line.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dysta/config.hpp"
#include "dysta/experiment.hpp"
#include "dysta/fixtures.hpp"
#include "dysta/predictor.hpp"

namespace fs = std::filesystem;
using namespace dysta;

namespace {

constexpr const char* kOutEnv = "DYSTA_OUT_DIR";

struct Common {
  std::string config;
  std::string out;
  int jobs = 1;
  std::string seed_override;
  std::string scheduler;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = std::string(csv::trim(item));
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoull(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--seed-override: '" + item + "' is not a non-negative integer");
    }
  }
  if (out.empty()) throw ConfigError("--seed-override: empty seed list");
  return out;
}

ScenarioConfig load_with_overrides(const Common& o) {
  auto c = load_config(o.config);
  if (!o.seed_override.empty()) c.seeds = parse_seed_list(o.seed_override);
  if (!o.scheduler.empty()) c.schedulers = {o.scheduler};
  validate(c);
  return c;
}

fs::path output_dir(const std::string& flag, const std::string& from_config, const std::string& leaf) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv(kOutEnv); env && *env) return fs::path(env) / leaf;
  return fs::path("out") / leaf;
}

void print_aggregates(const ExperimentResult& r) {
  std::printf("%-18s %8s %8s %10s %10s %10s %12s\n", "scheduler", "M", "rate", "ANTT", "violation", "STP",
              "preemptions");
  for (const auto& [k, s] : r.aggregates) {
    std::printf("%-18s %8g %8g %10.4f %10.4f %10.4f %12.1f\n", std::get<0>(k).c_str(), std::get<1>(k),
                std::get<2>(k), s.antt.mean, s.violation_rate.mean, s.stp.mean, s.preemptions.mean);
  }
}

int cmd_experiment(const Common& o, bool sweep) {
  auto c = load_with_overrides(o);
  if (!sweep) {
    c.slo_multipliers.resize(1);
    if (c.arrival_rates.size() > 1) c.arrival_rates.resize(1);
  }
  const auto dir = output_dir(o.out, c.output_dir, c.name);
  const auto result = run_experiment(c, o.jobs);
  write_reports(dir, c, result, sweep);
  print_aggregates(result);
  std::printf("reports written to %s\n", dir.string().c_str());
  return 0;
}

int cmd_rmse(const Common& o) {
  const auto c = load_with_overrides(o);
  const auto dir = output_dir(o.out, c.output_dir, c.name);
  fs::create_directories(dir);
  const std::vector<CoeffStrategy> strategies{CoeffStrategy::average_all(),
                                              CoeffStrategy::last_n(c.params.dysta.predictor.strategy.kind ==
                                                                            CoeffStrategy::Kind::LastN
                                                                        ? c.params.dysta.predictor.strategy.n
                                                                        : 3),
                                              CoeffStrategy::last_one()};
  std::ostringstream by_seed;
  by_seed << "seed,model,pattern,strategy,rmse\n";
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> rows;
  std::map<std::string, std::vector<double>> overall;
  for (auto seed : c.seeds) {
    const auto in = prepare_seed(c, seed);
    for (const auto& s : strategies) {
      PredictorConfig pc = c.params.dysta.predictor;
      pc.strategy = s;
      const auto name = to_string(s) + (s.kind == CoeffStrategy::Kind::LastN ? "(" + std::to_string(s.n) + ")" : "");
      for (const auto& [k, v] : eval_rmse_by_key(in.pool, in.profiles, pc)) {
        by_seed << seed << ',' << k.model_name << ',' << to_string(k.pattern) << ',' << name << ','
                << csv::fmt(v) << '\n';
        rows[{k.model_name, std::string(to_string(k.pattern)), name}].push_back(v);
      }
      const double all = eval_rmse(in.pool, in.profiles, pc);
      by_seed << seed << ",*,*," << name << ',' << csv::fmt(all) << '\n';
      overall[name].push_back(all);
    }
  }
  std::ostringstream mean;
  mean << "model,pattern,strategy,rmse\n";
  for (const auto& [k, v] : rows) {
    mean << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ',' << csv::fmt(mean_stddev(v).mean)
         << '\n';
  }
  for (const auto& [name, v] : overall) mean << "*,*," << name << ',' << csv::fmt(mean_stddev(v).mean) << '\n';
  write_text(dir / "rmse.csv", mean.str());
  write_text(dir / "rmse_by_seed.csv", by_seed.str());
  std::printf("%-16s %12s %12s\n", "strategy", "rmse_mean", "rmse_std");
  for (const auto& [name, v] : overall) {
    const auto st = mean_stddev(v);
    std::printf("%-16s %12.6g %12.6g\n", name.c_str(), st.mean, st.stddev);
  }
  std::printf("rmse.csv and rmse_by_seed.csv written to %s\n", dir.string().c_str());
  return 0;
}

int cmd_fixture(const std::string& kind, const Common& o) {
  const auto dir = output_dir(o.out, "", kind);
  gen_fixture(kind, dir, o.jobs);
  std::printf("fixture %s written to %s\n", kind.c_str(), dir.string().c_str());
  return 0;
}

int cmd_validate(const std::vector<std::string>& files) {
  int bad = 0;
  for (const auto& f : files) {
    try {
      const auto traces = load_traces(f);
      std::map<ModelPatternKey, std::pair<std::size_t, std::size_t>> keys;  // samples, layers
      for (const auto& t : traces) {
        auto& e = keys[t.key];
        if (e.first > 0 && e.second != t.num_layers()) {
          throw ValidationError(to_string(t.key) + ": samples disagree on layer count (" + std::to_string(e.second) +
                                " vs " + std::to_string(t.num_layers()) + ")");
        }
        ++e.first;
        e.second = t.num_layers();
      }
      std::printf("%s: ok, %zu traces\n", f.c_str(), traces.size());
      for (const auto& [k, e] : keys) {
        std::printf("  %-32s %6zu samples %4zu layers\n", to_string(k).c_str(), e.first, e.second);
      }
    } catch (const std::exception& e) {
      std::fprintf(stderr, "%s: invalid: %s\n", f.c_str(), e.what());
      ++bad;
    }
  }
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse multi-DNN scheduling simulator"};
  app.require_subcommand(1);
  Common o;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", o.config, "Scenario YAML file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, std::string("Output directory (default: $") + kOutEnv + "/<name> or out/<name>)");
    sub->add_option("--jobs", o.jobs, "Parallel simulations")->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", o.seed_override, "Comma-separated seed list replacing the config's seeds");
    sub->add_option("--scheduler", o.scheduler, "Run only this scheduler");
  };

  auto* run = app.add_subcommand("run", "Run every scheduler on the first cell of each axis");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "Run the full scheduler x M x rate x seed grid and emit plot tables");
  add_common(sweep, true);
  auto* rmse = app.add_subcommand("rmse", "Evaluate predictor RMSE for all coefficient strategies");
  add_common(rmse, true);
  auto* fixture = app.add_subcommand("fixture", "Generate a fixture directory");
  std::string kind;
  fixture->add_option("kind", kind, "fig5 | tri_basic | synth_benchmark")->required();
  add_common(fixture, false);
  auto* validate_cmd = app.add_subcommand("validate-traces", "Check trace CSV files");
  std::vector<std::string> files;
  validate_cmd->add_option("files", files, "Trace CSV files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!o.scheduler.empty() && !is_scheduler_name(o.scheduler)) {
      throw ConfigError("unknown scheduler '" + o.scheduler + "'");
    }
    if (*run) return cmd_experiment(o, false);
    if (*sweep) return cmd_experiment(o, true);
    if (*rmse) return cmd_rmse(o);
    if (*fixture) return cmd_fixture(kind, o);
    if (*validate_cmd) return cmd_validate(files);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const CellError& e) {
    std::fprintf(stderr, "simulation failed in cell %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
