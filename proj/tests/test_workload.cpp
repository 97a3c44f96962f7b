// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "dysta/presets.hpp"
#include "dysta/workload.hpp"
#include "support.hpp"

using namespace dysta;
using namespace dysta::test;
using Catch::Matchers::WithinRel;

namespace {

std::vector<SampleTrace> parse(const std::string& text) {
  std::istringstream in(text);
  return read_traces(in);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

SynthSpec spec(double mean, double range, double corr, int samples, int layers = 8) {
  SynthSpec s;
  s.model_name = "m";
  s.num_samples = samples;
  s.num_layers = layers;
  s.base_latency = 1e-3;
  s.mean_sparsity = mean;
  s.relative_range = range;
  s.correlation = corr;
  return s;
}

std::string workload_text(const std::vector<Request>& reqs) {
  std::ostringstream o;
  write_workload(o, reqs);
  for (const auto& r : reqs) {
    std::vector<SampleTrace> t{r.trace};
    write_traces(o, t);
  }
  return o.str();
}

}  // namespace

TEST_CASE("two-layer trace file gives one trace with summed latency", "[workload]") {
  const auto t = parse(
      "model_name,pattern,sample_id,layer_idx,latency_s,sparsity\n"
      "bert,dynamic_attention,0,0,1.0,0.5\n"
      "bert,dynamic_attention,0,1,2.0,0.5\n");
  REQUIRE(t.size() == 1);
  CHECK(t[0].num_layers() == 2);
  CHECK(t[0].isolated_latency() == 3.0);
  CHECK(t[0].key == ModelPatternKey{"bert", Pattern::DynamicAttention});
}

TEST_CASE("trace files reject bad input", "[workload]") {
  const std::string header = "model_name,pattern,sample_id,layer_idx,latency_s,sparsity\n";
  CHECK_THROWS_AS(parse(header + "m,dense,0,0,1.0,1.3\n"), ValidationError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse(header), ParseError);
  CHECK_THROWS_AS(parse(header + "m,dense,0,0,-1,0.1\n"), ValidationError);
  CHECK_THROWS_AS(parse(header + "m,sparse,0,0,1,0.1\n"), ParseError);
  CHECK_THROWS_AS(parse(header + "m,dense,0,1,1,0.1\n"), ParseError);
  CHECK_THROWS_AS(parse("a,b,c\n1,2,3\n"), ParseError);

  try {
    parse(header + "m,dense,0,0,1.0,0.1\nm,dense,0,1,abc,0.1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  try {
    parse(header + "m,dense,0,0,1.0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("layer order is preserved and groups interleave", "[workload]") {
  const auto t = parse(
      "model_name,pattern,sample_id,layer_idx,latency_s,sparsity\n"
      "a,dense,x,0,3,0.1\n"
      "b,dense,x,0,1,0.2\n"
      "a,dense,x,1,2,0.3\n"
      "a,channelwise,x,0,5,0.4\n");
  REQUIRE(t.size() == 3);
  CHECK(t[0].layers == std::vector<LayerTrace>{{3, 0.1}, {2, 0.3}});
  CHECK(t[1].key.model_name == "b");
  CHECK(t[2].key.pattern == Pattern::Channelwise);
}

TEST_CASE("bundled three-model fixture matches its manifest", "[workload]") {
  const auto traces = load_traces(fixture("tri_basic/traces.csv").string());
  const auto manifest = nlohmann::json::parse(slurp(fixture("tri_basic/manifest.json")));
  REQUIRE(traces.size() == 3);
  REQUIRE(manifest["models"].size() == 3);
  for (const auto& m : manifest["models"]) {
    const ModelPatternKey key{m["model_name"].get<std::string>(), *parse_pattern(m["pattern"].get<std::string>())};
    const auto it = std::find_if(traces.begin(), traces.end(), [&](const SampleTrace& t) { return t.key == key; });
    REQUIRE(it != traces.end());
    CHECK(it->num_layers() == m["layers"].get<std::size_t>());
  }
}

TEST_CASE("trace CSV round-trips exactly", "[workload]") {
  const auto pool = synth_traces(spec(0.5, 0.3, 0.9, 20), 3);
  std::ostringstream o;
  write_traces(o, pool);
  CHECK(parse(o.str()) == pool);
}

TEST_CASE("synthetic traces are deterministic per seed", "[workload]") {
  const auto s = spec(0.5, 0.3, 0.9, 50);
  CHECK(synth_traces(s, 7) == synth_traces(s, 7));
  CHECK_FALSE(synth_traces(s, 7) == synth_traces(s, 8));
}

TEST_CASE("perfect correlation shifts every layer by the same per-sample amount", "[workload]") {
  auto s = spec(0.5, 0.3, 1.0, 200);
  s.layer_sparsity_spread = 0.05;
  const auto pool = synth_traces(s, 1);
  const auto L = pool.front().num_layers();
  std::vector<double> layer_mean(L, 0.0);
  for (const auto& t : pool) {
    for (std::size_t j = 0; j < L; ++j) layer_mean[j] += t.layers[j].sparsity / static_cast<double>(pool.size());
  }
  for (const auto& t : pool) {
    const double d0 = t.layers[0].sparsity - layer_mean[0];
    for (std::size_t j = 1; j < L; ++j) CHECK(std::fabs((t.layers[j].sparsity - layer_mean[j]) - d0) < 1e-12);
  }
}

TEST_CASE("zero relative range collapses every sample onto the mean trace", "[workload]") {
  const auto pool = synth_traces(spec(0.4, 0.0, 0.9, 30), 2);
  for (const auto& t : pool) {
    CHECK(t.layers == pool.front().layers);
    for (const auto& l : t.layers) CHECK(l.sparsity == 0.4);
  }
}

TEST_CASE("relative range of network sparsity tracks the spec", "[workload]") {
  const auto pool = synth_traces(spec(0.3, 0.28, 0.9, 1000, 12), 11);
  std::vector<double> net;
  for (const auto& t : pool) {
    double m = 0;
    for (const auto& l : t.layers) m += l.sparsity;
    net.push_back(m / static_cast<double>(t.num_layers()));
  }
  const auto [lo, hi] = std::minmax_element(net.begin(), net.end());
  double mean = 0;
  for (double x : net) mean += x;
  mean /= static_cast<double>(net.size());
  const double rel = (*hi - *lo) / mean;
  CHECK(std::fabs(rel - 0.28) <= 0.1 * 0.28);
}

TEST_CASE("cross-layer Pearson correlation matches the requested value", "[workload]") {
  for (double c : {0.3, 0.6, 0.9}) {
    const auto pool = synth_traces(spec(0.5, 0.2, c, 2000, 8), 5);
    const auto L = pool.front().num_layers();
    for (std::size_t a = 0; a < L; ++a) {
      for (std::size_t b = a + 1; b < L; ++b) {
        std::vector<double> x, y;
        for (const auto& t : pool) {
          x.push_back(t.layers[a].sparsity);
          y.push_back(t.layers[b].sparsity);
        }
        INFO("c=" << c << " layers " << a << "," << b);
        CHECK(std::fabs(pearson(x, y) - c) <= 0.05);
      }
    }
  }
}

TEST_CASE("layer latency follows density with full coupling", "[workload]") {
  auto s = spec(0.5, 0.3, 0.9, 20, 4);
  const auto pool = synth_traces(s, 4);
  for (const auto& t : pool) {
    for (const auto& l : t.layers) CHECK_THAT(l.latency, WithinRel(1e-3 * (1 - l.sparsity) / 0.5, 1e-12));
  }
}

TEST_CASE("synthetic spec validation", "[workload]") {
  auto s = spec(0.5, 0.3, 1.5, 10);
  CHECK_THROWS_AS(synth_traces(s, 0), ValidationError);
  s = spec(1.2, 0.3, 0.9, 10);
  CHECK_THROWS_AS(synth_traces(s, 0), ValidationError);
  s = spec(0.5, -0.1, 0.9, 10);
  CHECK_THROWS_AS(synth_traces(s, 0), ValidationError);
  s = spec(0.5, 0.3, 0.9, 0);
  CHECK_THROWS_AS(synth_traces(s, 0), ValidationError);
}

TEST_CASE("a single request arrives at the first exponential gap", "[workload]") {
  const auto pool = synth_traces(spec(0.5, 0.3, 0.9, 5), 0);
  const auto reqs = gen_arrivals(WorkloadSpec{pool, 30, 1, 10, 42});
  REQUIRE(reqs.size() == 1);
  Rng arrivals(42, "arrivals");
  CHECK(reqs[0].arrival == arrivals.exponential(30));
  CHECK(reqs[0].arrival > 0);
}

TEST_CASE("request streams are deterministic and sorted", "[workload]") {
  const auto pool = preset_pool(attnn_preset(20), 0);
  const WorkloadSpec w{pool, 30, 500, 10, 9};
  const auto a = gen_arrivals(w);
  const auto b = gen_arrivals(w);
  CHECK(workload_text(a) == workload_text(b));
  CHECK(std::is_sorted(a.begin(), a.end(), [](const Request& x, const Request& y) { return x.arrival < y.arrival; }));
  for (const auto& r : a) {
    CHECK_THAT(r.deadline - r.arrival, WithinRel(10 * r.isolated_latency(), 1e-12));
    CHECK(r.next_layer == 0);
    CHECK(r.exec_accum == 0);
  }
}

TEST_CASE("mean inter-arrival time is within three standard errors", "[workload]") {
  const auto pool = preset_pool(attnn_preset(20), 0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto reqs = gen_arrivals(WorkloadSpec{pool, 30, 1000, 10, seed});
    const double mean_gap = reqs.back().arrival / 1000.0;
    const double se = (1.0 / 30) / std::sqrt(1000.0);
    INFO("seed " << seed);
    CHECK(std::fabs(mean_gap - 1.0 / 30) <= 3 * se);
  }
}

TEST_CASE("traces are drawn uniformly from the pool", "[workload]") {
  auto s = spec(0.5, 0.3, 0.9, 4);
  const auto pool = synth_traces(s, 0);
  const auto reqs = gen_arrivals(WorkloadSpec{pool, 10, 4000, 10, 3});
  std::map<std::string, int> counts;
  for (const auto& r : reqs) ++counts[r.trace.sample_id];
  REQUIRE(counts.size() == 4);
  for (const auto& [id, n] : counts) CHECK(std::abs(n - 1000) < 4 * std::sqrt(1000 * 0.75));
}

TEST_CASE("workload spec validation", "[workload]") {
  const auto pool = synth_traces(spec(0.5, 0.3, 0.9, 5), 0);
  CHECK_THROWS_AS(gen_arrivals(WorkloadSpec{{}, 30, 10, 10, 0}), ValidationError);
  CHECK_THROWS_AS(gen_arrivals(WorkloadSpec{pool, 0, 10, 10, 0}), ValidationError);
  CHECK_THROWS_AS(gen_arrivals(WorkloadSpec{pool, 30, 0, 10, 0}), ValidationError);
}

TEST_CASE("assign_slos sets deadline from isolated latency", "[workload]") {
  const auto t = trace({"m", Pattern::Dense}, "s", {0.5, 1.5}, {});
  std::vector<Request> reqs{request(0, t, 0.0)};
  CHECK(assign_slos(reqs, 10));
  CHECK(reqs[0].deadline == 20.0);
  reqs[0].arrival = 3;
  CHECK_FALSE(assign_slos(reqs, 1));
  CHECK(reqs[0].deadline == 5.0);
}

TEST_CASE("fixture workload deadlines at M=10 match the recomputation", "[workload]") {
  const auto pool = load_traces(fixture("synth_benchmark/traces_seed0.csv").string());
  std::ifstream f(fixture("synth_benchmark/workload_seed0.csv"));
  auto reqs = read_workload(f, pool);
  const auto expected = read_rows(fixture("synth_benchmark/expected_deadlines.csv"));
  REQUIRE(reqs.size() == expected.size());
  std::map<RequestId, double> want;
  for (const auto& r : expected) want[static_cast<RequestId>(std::stoul(r.at("request_id")))] = num(r, "deadline_s");
  for (const auto& r : reqs) CHECK_THAT(r.deadline, WithinRel(want.at(r.id), 1e-12));
  REQUIRE(assign_slos(reqs, 10));
  for (const auto& r : reqs) CHECK_THAT(r.deadline, WithinRel(want.at(r.id), 1e-12));
}

TEST_CASE("generators reproduce the committed seed-0 snapshot", "[workload]") {
  const auto pool = preset_pool(attnn_preset(200), 0);
  std::ostringstream t;
  write_traces(t, pool);
  CHECK(t.str() == slurp(fixture("synth_benchmark/traces_seed0.csv")));
  std::ostringstream w;
  write_workload(w, gen_arrivals(WorkloadSpec{pool, 30, 1000, 10, 0}));
  CHECK(w.str() == slurp(fixture("synth_benchmark/workload_seed0.csv")));
}

TEST_CASE("workload files reference traces by key", "[workload]") {
  const auto pool = load_traces(fixture("tri_basic/traces.csv").string());
  std::istringstream bad(
      "request_id,model_name,pattern,sample_id,arrival_s,deadline_s\n"
      "0,enc,dynamic_attention,missing,0,1\n");
  CHECK_THROWS_AS(read_workload(bad, pool), ParseError);
  std::ifstream f(fixture("tri_basic/workload.csv"));
  const auto reqs = read_workload(f, pool);
  REQUIRE(reqs.size() == 3);
  CHECK(reqs[2].key == ModelPatternKey{"cls", Pattern::Channelwise});
}
