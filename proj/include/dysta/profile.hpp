// Copyright 2026 The Dysta Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per model-pattern lookup tables of average layer latency and sparsity.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dysta/csv.hpp"
#include "dysta/rng.hpp"
#include "dysta/types.hpp"
#include "dysta/workload.hpp"

namespace dysta {

/// Averages for one model-pattern pair. Construct through `make_profile` so
/// the cached prefix/suffix sums stay consistent with the per-layer lists.
struct ModelProfile {
  ModelPatternKey key;
  std::vector<Seconds> layer_avg_latency;
  std::vector<double> layer_avg_sparsity;
  Seconds avg_total_latency = 0;

  // suffix_latency[j] = sum of layer_avg_latency[j..L)
  std::vector<Seconds> suffix_latency;
  // prefix_density[j] = sum of (1 - layer_avg_sparsity[k]) for k < j
  std::vector<double> prefix_density;

  std::size_t num_layers() const { return layer_avg_latency.size(); }

  Seconds remaining_latency(std::size_t next_layer) const { return suffix_latency.at(next_layer); }

  /// Sum of average densities over layers [first, last).
  double density_sum(std::size_t first, std::size_t last) const {
    return prefix_density.at(last) - prefix_density.at(first);
  }
};

inline ModelProfile make_profile(ModelPatternKey key, std::vector<Seconds> latency, std::vector<double> sparsity) {
  if (latency.empty() || latency.size() != sparsity.size()) {
    throw ValidationError("profile " + to_string(key) + ": layer lists must be non-empty and of equal length");
  }
  ModelProfile p{std::move(key), std::move(latency), std::move(sparsity), 0, {}, {}};
  const auto L = p.layer_avg_latency.size();
  p.suffix_latency.assign(L + 1, 0.0);
  for (std::size_t j = L; j-- > 0;) p.suffix_latency[j] = p.suffix_latency[j + 1] + p.layer_avg_latency[j];
  p.avg_total_latency = p.suffix_latency[0];
  if (!(p.avg_total_latency > 0)) throw ValidationError("profile " + to_string(p.key) + ": total latency must be > 0");
  p.prefix_density.assign(L + 1, 0.0);
  for (std::size_t j = 0; j < L; ++j) p.prefix_density[j + 1] = p.prefix_density[j] + (1 - p.layer_avg_sparsity[j]);
  return p;
}

class ProfileStore {
 public:
  ProfileStore() = default;

  void insert(ModelProfile p) {
    if (contains(p.key)) throw ValidationError("duplicate profile for " + to_string(p.key));
    auto key = p.key;
    profiles_.emplace(std::move(key), std::move(p));
  }

  const ModelProfile& lookup(const ModelPatternKey& key) const {
    auto it = profiles_.find(key);
    if (it == profiles_.end()) throw UnknownModelError(key);
    return it->second;
  }

  bool contains(const ModelPatternKey& key) const { return profiles_.count(key) != 0; }
  std::size_t size() const { return profiles_.size(); }

  /// Keys in sorted order, for deterministic iteration.
  std::vector<ModelPatternKey> keys() const {
    std::vector<ModelPatternKey> out;
    out.reserve(profiles_.size());
    for (const auto& [k, _] : profiles_) out.push_back(k);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::unordered_map<ModelPatternKey, ModelProfile> profiles_;
};

/// Per-key, per-layer arithmetic means. Samples are summed in a canonical
/// order so the result does not depend on input order, bit for bit.
inline ProfileStore build_profiles(const std::vector<SampleTrace>& traces) {
  if (traces.empty()) throw ValidationError("build_profiles: no traces");
  std::map<ModelPatternKey, std::vector<const SampleTrace*>> groups;
  for (const auto& t : traces) groups[t.key].push_back(&t);

  ProfileStore store;
  for (auto& [key, samples] : groups) {
    std::sort(samples.begin(), samples.end(), [](const SampleTrace* a, const SampleTrace* b) {
      if (a->sample_id != b->sample_id) return a->sample_id < b->sample_id;
      return std::lexicographical_compare(
          a->layers.begin(), a->layers.end(), b->layers.begin(), b->layers.end(),
          [](const LayerTrace& x, const LayerTrace& y) {
            return x.latency < y.latency || (x.latency == y.latency && x.sparsity < y.sparsity);
          });
    });
    const auto L = samples.front()->num_layers();
    std::vector<Seconds> lat(L, 0.0);
    std::vector<double> sp(L, 0.0);
    for (const auto* s : samples) {
      if (s->num_layers() != L) {
        throw ValidationError("build_profiles: " + to_string(key) + " has samples with " + std::to_string(L) +
                              " and " + std::to_string(s->num_layers()) + " layers");
      }
      for (std::size_t j = 0; j < L; ++j) {
        lat[j] += s->layers[j].latency;
        sp[j] += s->layers[j].sparsity;
      }
    }
    const auto n = static_cast<double>(samples.size());
    for (std::size_t j = 0; j < L; ++j) {
      lat[j] /= n;
      sp[j] /= n;
    }
    store.insert(make_profile(key, std::move(lat), std::move(sp)));
  }
  return store;
}

struct PoolSplit {
  std::vector<SampleTrace> profile_set;
  std::vector<SampleTrace> workload_set;
};

/// Held-out split: for every key, ceil(fraction * n) randomly chosen samples
/// build the profile and the rest feed the workload. fraction = 0 shares the
/// whole pool between both.
inline PoolSplit holdout_split(const std::vector<SampleTrace>& pool, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0 && fraction < 1)) throw ValidationError("holdout fraction must be in [0,1)");
  if (fraction == 0) return {pool, pool};
  std::map<ModelPatternKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pool.size(); ++i) groups[pool[i].key].push_back(i);
  PoolSplit out;
  for (auto& [key, idx] : groups) {
    if (idx.size() < 2) throw ValidationError("holdout split: " + to_string(key) + " needs at least 2 samples");
    Rng rng(seed, "profile_split/" + to_string(key));
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.index(i + 1)]);
    auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(idx.size())));
    k = std::clamp<std::size_t>(k, 1, idx.size() - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) (i < k ? out.profile_set : out.workload_set).push_back(pool[idx[i]]);
  }
  return out;
}

/// Profile export uses the trace schema with sample_id fixed to `avg`.
inline void write_profiles(std::ostream& out, const ProfileStore& store) {
  std::vector<SampleTrace> rows;
  for (const auto& key : store.keys()) {
    const auto& p = store.lookup(key);
    SampleTrace t{key, "avg", {}};
    for (std::size_t j = 0; j < p.num_layers(); ++j) t.layers.push_back({p.layer_avg_latency[j], p.layer_avg_sparsity[j]});
    rows.push_back(std::move(t));
  }
  write_traces(out, rows);
}

inline ProfileStore read_profiles(std::istream& in) {
  ProfileStore store;
  for (auto& t : read_traces(in)) {
    if (t.sample_id != "avg") throw ValidationError("profile file: sample_id must be 'avg', got '" + t.sample_id + "'");
    std::vector<Seconds> lat;
    std::vector<double> sp;
    for (const auto& l : t.layers) {
      lat.push_back(l.latency);
      sp.push_back(l.sparsity);
    }
    store.insert(make_profile(t.key, std::move(lat), std::move(sp)));
  }
  return store;
}

inline ProfileStore load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile file '" + path + "'");
  return read_profiles(in);
}

}  // namespace dysta
