// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "dysta/profile.hpp"
#include "support.hpp"

using namespace dysta;
using namespace dysta::test;
using Catch::Matchers::WithinRel;

namespace {

const ModelPatternKey kPr{"net", Pattern::PointwiseRandom};
const ModelPatternKey kCh{"net", Pattern::Channelwise};

}  // namespace

TEST_CASE("profile layer latency is the sample mean", "[profile]") {
  const ModelPatternKey k{"m", Pattern::Dense};
  const auto store = build_profiles({trace(k, "a", {1.0, 2.0}, {0.2, 0.4}), trace(k, "b", {3.0, 2.0}, {0.4, 0.6})});
  const auto& p = store.lookup(k);
  CHECK(p.layer_avg_latency[0] == 2.0);
  CHECK(p.layer_avg_latency[1] == 2.0);
  CHECK_THAT(p.layer_avg_sparsity[0], WithinRel(0.3, 1e-15));
  CHECK(p.avg_total_latency == 4.0);
}

TEST_CASE("a single sample is its own profile", "[profile]") {
  const auto t = trace({"m", Pattern::BlockNM}, "a", {0.25, 0.5, 0.125}, {0.1, 0.2, 0.3});
  const auto store = build_profiles({t});
  const auto& p = store.lookup(t.key);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(p.layer_avg_latency[j] == t.layers[j].latency);
    CHECK(p.layer_avg_sparsity[j] == t.layers[j].sparsity);
  }
  CHECK(p.avg_total_latency == t.isolated_latency());
}

TEST_CASE("100-sample pool matches the brute-force averages", "[profile]") {
  const auto store = build_profiles(load_traces(fixture("pool100/traces.csv").string()));
  const auto expected = load_profiles(fixture("pool100/expected_profile.csv").string());
  REQUIRE(store.keys() == expected.keys());
  for (const auto& k : expected.keys()) {
    const auto& got = store.lookup(k);
    const auto& want = expected.lookup(k);
    REQUIRE(got.num_layers() == want.num_layers());
    for (std::size_t j = 0; j < got.num_layers(); ++j) {
      CHECK_THAT(got.layer_avg_latency[j], WithinRel(want.layer_avg_latency[j], 1e-12));
      CHECK_THAT(got.layer_avg_sparsity[j], WithinRel(want.layer_avg_sparsity[j], 1e-12));
    }
    CHECK_THAT(got.avg_total_latency, WithinRel(want.avg_total_latency, 1e-12));
  }
}

TEST_CASE("same model under two patterns has two independent profiles", "[profile]") {
  const auto pool = load_traces(fixture("pool100/traces.csv").string());
  const auto store = build_profiles(pool);
  REQUIRE(store.size() == 2);
  const auto& a = store.lookup(kPr);
  const auto& b = store.lookup(kCh);
  CHECK(a.layer_avg_latency != b.layer_avg_latency);
  CHECK(a.layer_avg_sparsity != b.layer_avg_sparsity);

  std::vector<SampleTrace> only_pr;
  std::copy_if(pool.begin(), pool.end(), std::back_inserter(only_pr), [](const auto& t) { return t.key == kPr; });
  CHECK(build_profiles(only_pr).lookup(kPr).layer_avg_latency == a.layer_avg_latency);
}

TEST_CASE("lookup of an absent key is an explicit error", "[profile]") {
  const auto store = build_profiles(load_traces(fixture("pool100/traces.csv").string()));
  CHECK(store.contains(kPr));
  CHECK_THROWS_AS(store.lookup({"net", Pattern::Dense}), UnknownModelError);
  CHECK_THROWS_AS(store.lookup({"other", Pattern::Channelwise}), UnknownModelError);
}

TEST_CASE("build_profiles input errors", "[profile]") {
  const ModelPatternKey k{"m", Pattern::Dense};
  CHECK_THROWS_AS(build_profiles({}), ValidationError);
  CHECK_THROWS_AS(build_profiles({trace(k, "a", {1, 2}, {}), trace(k, "b", {1}, {})}), ValidationError);
  CHECK_THROWS_AS(make_profile(k, {1, 2}, {0.5}), ValidationError);
  ProfileStore s;
  s.insert(make_profile(k, {1}, {0}));
  CHECK_THROWS_AS(s.insert(make_profile(k, {1}, {0})), ValidationError);
}

TEST_CASE("build_profiles is permutation invariant bit for bit", "[profile]") {
  auto pool = load_traces(fixture("pool100/traces.csv").string());
  const auto ref = build_profiles(pool);
  std::mt19937 g(5);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(pool.begin(), pool.end(), g);
    const auto s = build_profiles(pool);
    for (const auto& k : ref.keys()) {
      CHECK(s.lookup(k).layer_avg_latency == ref.lookup(k).layer_avg_latency);
      CHECK(s.lookup(k).layer_avg_sparsity == ref.lookup(k).layer_avg_sparsity);
    }
  }
}

TEST_CASE("avg total latency is the sum of layer averages", "[profile]") {
  const auto store = build_profiles(load_traces(fixture("pool100/traces.csv").string()));
  for (const auto& k : store.keys()) {
    const auto& p = store.lookup(k);
    double sum = 0;
    for (double x : p.layer_avg_latency) sum += x;
    CHECK_THAT(p.avg_total_latency, WithinRel(sum, 1e-12));
    CHECK(p.remaining_latency(p.num_layers()) == 0);
    CHECK(p.remaining_latency(0) == p.avg_total_latency);
  }
}

TEST_CASE("profile export round-trips and requires the avg sample id", "[profile]") {
  const auto store = build_profiles(load_traces(fixture("pool100/traces.csv").string()));
  std::ostringstream o;
  write_profiles(o, store);
  std::istringstream in(o.str());
  const auto back = read_profiles(in);
  for (const auto& k : store.keys()) CHECK(back.lookup(k).layer_avg_latency == store.lookup(k).layer_avg_latency);

  std::istringstream bad(
      "model_name,pattern,sample_id,layer_idx,latency_s,sparsity\n"
      "m,dense,s0,0,1,0.5\n");
  CHECK_THROWS_AS(read_profiles(bad), ValidationError);
}

TEST_CASE("held-out split partitions every key", "[profile]") {
  const auto pool = load_traces(fixture("pool100/traces.csv").string());
  const auto none = holdout_split(pool, 0, 1);
  CHECK(none.profile_set == pool);
  CHECK(none.workload_set == pool);

  const auto s = holdout_split(pool, 0.25, 1);
  CHECK(s.profile_set.size() + s.workload_set.size() == pool.size());
  auto count = [](const std::vector<SampleTrace>& v, const ModelPatternKey& k) {
    return std::count_if(v.begin(), v.end(), [&](const auto& t) { return t.key == k; });
  };
  CHECK(count(s.profile_set, kPr) == 15);
  CHECK(count(s.profile_set, kCh) == 10);
  for (const auto& a : s.profile_set) {
    for (const auto& b : s.workload_set) CHECK_FALSE((a.key == b.key && a.sample_id == b.sample_id));
  }
  CHECK(holdout_split(pool, 0.25, 1).profile_set == s.profile_set);
  CHECK_THROWS_AS(holdout_split(pool, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(holdout_split({pool.front()}, 0.5, 1), ValidationError);
}
