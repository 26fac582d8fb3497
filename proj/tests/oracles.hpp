#pragma once

// Reference implementations used only by the tests. They are written for
// obviousness rather than speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "wordmotion/core.hpp"
#include "wordmotion/ingest.hpp"

namespace oracle {

using wordmotion::FrameFeatureSeries;
using wordmotion::Gesture;

// Per-component max - min over valid frames of the padded, clamped window,
// or nothing when the window is empty or mostly invalid.
inline std::optional<Gesture> brute_force_delta(const FrameFeatureSeries& s, long long start, long long end,
                                                int padding) {
  const long long n = static_cast<long long>(s.frames.size());
  long long first = start - padding;
  long long last = end + padding;
  if (first < 0) first = 0;
  if (last > n - 1) last = n - 1;
  std::vector<const wordmotion::FrameRecord*> valid;
  long long total = 0;
  for (long long i = first; i <= last; ++i) {
    ++total;
    if (s.frames[i].success) valid.push_back(&s.frames[i]);
  }
  if (valid.empty()) return std::nullopt;
  long long invalid = total - static_cast<long long>(valid.size());
  if (invalid * 2 > total) return std::nullopt;
  Gesture out{};
  for (std::size_t j = 0; j < wordmotion::kGestureDims; ++j) {
    double mx = valid[0]->g[j], mn = valid[0]->g[j];
    for (const auto* f : valid) {
      if (f->g[j] > mx) mx = f->g[j];
      if (f->g[j] < mn) mn = f->g[j];
    }
    out[j] = mx - mn;
  }
  return out;
}

// O(P * N) pair count with half credit for ties.
inline double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double credit = 0.0;
  for (double p : pos) {
    for (double q : neg) {
      if (p > q) {
        credit += 1.0;
      } else if (p == q) {
        credit += 0.5;
      }
    }
  }
  return credit / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Mean log-likelihood minus lambda * ||theta||^2 for a linear logistic model
// without intercept, written out directly.
inline double penalized_loglik(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                               const std::vector<double>& theta, double lambda, double intercept = 0.0) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = intercept;
    for (std::size_t j = 0; j < theta.size(); ++j) z += theta[j] * x[i][j];
    const double p = 1.0 / (1.0 + std::exp(-z));
    ll += y[i] ? std::log(p) : std::log(1.0 - p);
  }
  double norm = 0.0;
  for (double t : theta) norm += t * t;
  return ll / static_cast<double>(x.size()) - lambda * norm;
}

// Exhaustive scan of theta in [-20, 20] with step 1e-3.
inline double grid_argmax_1d(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double lambda) {
  double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
  for (int k = -20000; k <= 20000; ++k) {
    const double t = k * 1e-3;
    const double v = penalized_loglik(x, y, {t}, lambda);
    if (v > best) {
      best = v;
      arg = t;
    }
  }
  return arg;
}

// Two-level grid over [-20, 20]^2: step 0.05 everywhere, then step 1e-3 in
// a +-0.1 box around the coarse winner. The objective is concave, so the
// fine box always contains the maximiser.
inline std::vector<double> grid_argmax_2d(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                          double lambda) {
  double best = -std::numeric_limits<double>::infinity();
  double a0 = 0.0, b0 = 0.0;
  for (int i = -400; i <= 400; ++i) {
    for (int k = -400; k <= 400; ++k) {
      const double a = i * 0.05, b = k * 0.05;
      const double v = penalized_loglik(x, y, {a, b}, lambda);
      if (v > best) {
        best = v;
        a0 = a;
        b0 = b;
      }
    }
  }
  double a1 = a0, b1 = b0;
  for (int i = -100; i <= 100; ++i) {
    for (int k = -100; k <= 100; ++k) {
      const double a = a0 + i * 1e-3, b = b0 + k * 1e-3;
      const double v = penalized_loglik(x, y, {a, b}, lambda);
      if (v > best) {
        best = v;
        a1 = a;
        b1 = b;
      }
    }
  }
  return {a1, b1};
}

inline double naive_geometric_mean(const std::vector<double>& v) {
  double prod_log = 0.0;
  for (double s : v) prod_log += std::log(std::min(std::max(s, 1e-8), 1.0 - 1e-8));
  return std::exp(prod_log / static_cast<double>(v.size()));
}

// Random series with occasional invalid frames and a few repeated values so
// ties in max/min are exercised.
inline FrameFeatureSeries random_series(std::mt19937_64& rng, long long frames, double invalid_rate = 0.1) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  FrameFeatureSeries s;
  s.person_id = "p";
  s.video_id = "v";
  s.fps = 30.0;
  for (long long i = 0; i < frames; ++i) {
    wordmotion::FrameRecord f;
    f.frame_index = i;
    f.timestamp = static_cast<double>(i) / 30.0;
    f.success = coin(rng) >= invalid_rate;
    for (auto& v : f.g) v = coin(rng) < 0.1 ? 1.0 : u(rng);
    s.frames.push_back(f);
  }
  return s;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh, empty scratch directory under the system temp dir. The process id
// keeps test binaries that ctest runs in parallel apart.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("wordmotion_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
