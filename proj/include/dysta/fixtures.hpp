// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic fixture generation. Each fixture directory holds its inputs
// (traces, profile or pool, workload), a config.yaml runnable by the CLI,
// and a manifest.json. Expected outputs of the hand-sized fixtures come from
// the reference scripts in tests/oracles.

#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dysta/experiment.hpp"

namespace dysta {

inline constexpr std::array<std::string_view, 3> kFixtureKinds = {"fig5", "tri_basic", "synth_benchmark"};

namespace detail {

inline SampleTrace uniform_trace(ModelPatternKey key, std::string id, std::vector<Seconds> lat,
                                 std::vector<double> sp) {
  SampleTrace t{std::move(key), std::move(id), {}};
  for (std::size_t j = 0; j < lat.size(); ++j) t.layers.push_back({lat[j], sp[j]});
  return t;
}

inline Request make_request(RequestId id, const SampleTrace& t, Seconds arrival, double slo) {
  Request r;
  r.id = id;
  r.key = t.key;
  r.arrival = arrival;
  r.trace = t;
  r.deadline = arrival + t.isolated_latency() * slo;
  return r;
}

template <class Writer>
void write_file(const std::filesystem::path& p, Writer&& w) {
  std::ostringstream ss;
  w(ss);
  write_text(p, ss.str());
}

inline void write_fixed(const std::filesystem::path& dir, const std::vector<SampleTrace>& traces,
                        const ProfileStore& profiles, const std::vector<Request>& reqs) {
  write_file(dir / "traces.csv", [&](std::ostream& o) { write_traces(o, traces); });
  write_file(dir / "profile.csv", [&](std::ostream& o) { write_profiles(o, profiles); });
  write_file(dir / "workload.csv", [&](std::ostream& o) { write_workload(o, reqs); });
}

}  // namespace detail

/// Two requests where a sparsity-blind estimate keeps the wrong job running.
/// Model "a" is profiled at 1 s per layer with sparsity 0.5, but request 0
/// runs fully dense at 2 s per layer.
inline nlohmann::json gen_fig5(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const ModelPatternKey a{"a", Pattern::PointwiseRandom}, b{"b", Pattern::PointwiseRandom};
  ProfileStore profiles;
  profiles.insert(make_profile(a, {1, 1, 1, 1}, {0.5, 0.5, 0.5, 0.5}));
  profiles.insert(make_profile(b, {1.6, 1.6}, {0.5, 0.5}));
  const std::vector<SampleTrace> traces{detail::uniform_trace(a, "dense", {2, 2, 2, 2}, {0, 0, 0, 0}),
                                        detail::uniform_trace(b, "typical", {1.6, 1.6}, {0.5, 0.5})};
  const double slo = 3;
  const std::vector<Request> reqs{detail::make_request(0, traces[0], 0.0, slo),
                                  detail::make_request(1, traces[1], 0.5, slo)};
  detail::write_fixed(dir, traces, profiles, reqs);

  ScenarioConfig c;
  c.name = "fig5";
  c.trace_file = "traces.csv";
  c.profile_file = "profile.csv";
  c.workload_file = "workload.csv";
  c.keep_deadlines = true;
  c.schedulers = {"sjf", "dysta", "oracle"};
  c.slo_multipliers = {slo};
  c.seeds = {0};
  c.params.dysta.predictor = {CoeffStrategy::last_one(), 1.0, {}};
  c.params.dysta.beta = 0.5;
  c.params.dysta.eta = 0.5;
  write_text(dir / "config.yaml", serialize_config(c));
  return {{"kind", "fig5"},
          {"requests", 2},
          {"models",
           {{{"model_name", "a"}, {"pattern", "pointwise_random"}, {"layers", 4}},
            {{"model_name", "b"}, {"pattern", "pointwise_random"}, {"layers", 2}}}},
          {"slo_multiplier", slo},
          {"files", {"traces.csv", "profile.csv", "workload.csv", "config.yaml"}},
          {"expected", {{"sjf_violations", 1}, {"dysta_violations", 0}}}};
}

/// Three requests, three layers each, one per model-pattern key (model "cls"
/// appears under two patterns); simultaneous arrivals at t = 1.5. Request i
/// has PREMA priority (1, 4, 9)[i].
inline nlohmann::json gen_tri_basic(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const ModelPatternKey enc{"enc", Pattern::DynamicAttention}, cls{"cls", Pattern::PointwiseRandom},
      cls_ch{"cls", Pattern::Channelwise};
  ProfileStore profiles;
  profiles.insert(make_profile(enc, {1.5, 1.5, 1.5}, {0.5, 0.5, 0.5}));
  profiles.insert(make_profile(cls, {0.75, 1.0, 0.75}, {0.4, 0.4, 0.4}));
  profiles.insert(make_profile(cls_ch, {1.0, 0.75, 0.75}, {0.3, 0.3, 0.3}));
  const std::vector<SampleTrace> traces{
      detail::uniform_trace(enc, "e0", {1.0, 2.0, 0.5}, {0.65, 0.35, 0.85}),
      detail::uniform_trace(cls, "c0", {1.0, 0.25, 0.25}, {0.2, 0.85, 0.8}),
      detail::uniform_trace(cls_ch, "c1", {1.25, 0.5, 0.5}, {0.0, 0.7, 0.6}),
  };
  const double slo = 2.5;
  const std::vector<Request> reqs{detail::make_request(0, traces[0], 0.0, slo),
                                  detail::make_request(1, traces[1], 1.5, slo),
                                  detail::make_request(2, traces[2], 1.5, slo)};
  detail::write_fixed(dir, traces, profiles, reqs);

  ScenarioConfig c;
  c.name = "tri_basic";
  c.trace_file = "traces.csv";
  c.profile_file = "profile.csv";
  c.workload_file = "workload.csv";
  c.keep_deadlines = true;
  c.schedulers = {"fcfs", "sjf", "prema", "planaria", "dysta"};
  c.slo_multipliers = {slo};
  c.seeds = {0};
  c.params.dysta.beta = 0.5;
  c.params.dysta.eta = 0.5;
  c.params.prema.priority_cycle = {1, 4, 9};
  c.sim.record_log = true;
  write_text(dir / "config.yaml", serialize_config(c));
  return {{"kind", "tri_basic"},
          {"requests", 3},
          {"slo_multiplier", slo},
          {"prema_priorities", {1, 4, 9}},
          {"models",
           {{{"model_name", "enc"}, {"pattern", "dynamic_attention"}, {"layers", 3}},
            {{"model_name", "cls"}, {"pattern", "pointwise_random"}, {"layers", 3}},
            {{"model_name", "cls"}, {"pattern", "channelwise"}, {"layers", 3}}}},
          {"files", {"traces.csv", "profile.csv", "workload.csv", "config.yaml"}},
          {"oracle", "tests/oracles/tri_basic.py"}};
}

/// The benchmark scenario used for the trade-off checks: the attnn preset,
/// 1000 requests, seeds 0-4, M = 10. SDRM3's weight is grid-searched on
/// seeds 100-104 and frozen into config.yaml. The seed-0 pool and workload
/// are written as a regression snapshot of the generators.
inline nlohmann::json gen_synth_benchmark(const std::filesystem::path& dir, int jobs = 1) {
  std::filesystem::create_directories(dir);
  ScenarioConfig c;
  c.name = "synth_benchmark";
  c.preset = "attnn";
  c.num_requests = 1000;
  c.slo_multipliers = {10};
  c.seeds = {0, 1, 2, 3, 4};
  c.schedulers = {"fcfs", "sjf", "prema", "planaria", "sdrm3", "dysta", "oracle", "dysta_static_only"};

  ScenarioConfig tuning = c;
  tuning.seeds = {100, 101, 102, 103, 104};
  tuning.schedulers = {"sdrm3"};
  std::vector<SeedInputs> inputs;
  for (auto s : tuning.seeds) inputs.push_back(prepare_seed(tuning, s));
  const auto grid = tune_sdrm3(tuning, inputs, jobs);
  const auto* best = &grid.front();
  for (const auto& g : grid) {
    if (better_tuning(g.second, g.first, best->second, best->first)) best = &g;
  }
  c.params.sdrm3.alpha_weight = best->first;
  write_text(dir / "config.yaml", serialize_config(c));

  const auto seed0 = prepare_seed(c, 0);
  const auto reqs = gen_arrivals(WorkloadSpec{seed0.pool, preset_by_name(c.preset).default_rate, c.num_requests,
                                              c.slo_multipliers.front(), 0});
  detail::write_file(dir / "traces_seed0.csv", [&](std::ostream& o) { write_traces(o, seed0.pool); });
  detail::write_file(dir / "workload_seed0.csv", [&](std::ostream& o) { write_workload(o, reqs); });

  nlohmann::json tuning_rows = nlohmann::json::array();
  for (const auto& [a, s] : grid) {
    tuning_rows.push_back({{"alpha_weight", a}, {"antt", s.antt.mean}, {"violation_rate", s.violation_rate.mean}});
  }
  return {{"kind", "synth_benchmark"},
          {"preset", c.preset},
          {"requests", c.num_requests},
          {"seeds", c.seeds},
          {"slo_multiplier", 10},
          {"files", {"config.yaml", "traces_seed0.csv", "workload_seed0.csv"}},
          {"sdrm3_tuning", {{"seeds", tuning.seeds}, {"grid", tuning_rows}, {"selected", best->first}}}};
}

inline nlohmann::json gen_fixture(std::string_view kind, const std::filesystem::path& dir, int jobs = 1) {
  nlohmann::json manifest;
  if (kind == "fig5") manifest = gen_fig5(dir);
  else if (kind == "tri_basic") manifest = gen_tri_basic(dir);
  else if (kind == "synth_benchmark") manifest = gen_synth_benchmark(dir, jobs);
  else throw ConfigError("unknown fixture kind '" + std::string(kind) + "' (fig5, tri_basic, synth_benchmark)");
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace dysta
