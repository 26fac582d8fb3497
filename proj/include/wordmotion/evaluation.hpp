#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "wordmotion/core.hpp"
#include "wordmotion/ingest.hpp"
#include "wordmotion/rng.hpp"

namespace wordmotion {

// Mann-Whitney AUC: fraction of (pos, neg) pairs with pos > neg, ties
// counted as one half. O((P + N) log(P + N)).
inline double auc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw Error(ErrorCode::EmptyClass, "AUC needs at least one score per class");
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, true);
  for (double s : neg) all.emplace_back(s, false);
  for (const auto& [s, is_pos] : all) {
    if (std::isnan(s)) throw Error(ErrorCode::InvalidArgument, "AUC input contains NaN");
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // Twice the pair credit, so everything stays integral.
  std::uint64_t credit2 = 0;
  std::uint64_t neg_below = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::uint64_t p = 0, n = 0;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? p : n) += 1;
      ++j;
    }
    credit2 += 2 * p * neg_below + p * n;
    neg_below += n;
    i = j;
  }
  return static_cast<double>(credit2) / (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

inline double auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  return auc(std::span<const double>(pos), std::span<const double>(neg));
}

struct SplitSpec {
  double train_fraction = 0.9;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "train fraction must be in (0, 1)");
    }
  }
};

struct DatasetSplit {
  DatasetManifest train;
  DatasetManifest test;
};

inline std::size_t train_count(std::size_t n, double fraction) {
  auto k = static_cast<long long>(std::llround(fraction * static_cast<double>(n)));
  return static_cast<std::size_t>(std::clamp<long long>(k, 1, static_cast<long long>(n) - 1));
}

// Video-level split per (person, scenario). Scenarios never used for
// training (impersonator, faceswap, synthetic) go entirely to test.
inline DatasetSplit split_dataset(const DatasetManifest& manifest, const SplitSpec& spec) {
  spec.validate();
  std::map<std::pair<std::string, Scenario>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    if (is_trainable_scenario(e.scenario)) groups[{e.person_id, e.scenario}].push_back(i);
  }
  std::vector<bool> in_train(manifest.entries.size(), false);
  for (auto& [key, indices] : groups) {
    if (indices.size() < 2) {
      throw Error(ErrorCode::InsufficientVideos, key.first + "/" + std::string(to_string(key.second)) + " has " +
                                                     std::to_string(indices.size()) + " video(s), need 2");
    }
    std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      return manifest.entries[a].video_id < manifest.entries[b].video_id;
    });
    auto rng = child_stream(spec.seed, "split/" + key.first + "/" + std::string(to_string(key.second)));
    std::shuffle(indices.begin(), indices.end(), rng);
    const auto k = train_count(indices.size(), spec.train_fraction);
    for (std::size_t i = 0; i < k; ++i) in_train[indices[i]] = true;
  }
  DatasetSplit split;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    (in_train[i] ? split.train : split.test).entries.push_back(manifest.entries[i]);
  }
  return split;
}

}  // namespace wordmotion
