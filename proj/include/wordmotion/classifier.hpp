#pragma once

// Per-unit logistic regression. The model is templated on the feature
// dimension so that the same trainer serves 25-D gesture features and small
// test problems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wordmotion/core.hpp"

namespace wordmotion {

inline constexpr double kSigmoidClamp = 500.0;
inline constexpr double kStdFloor = 1e-6;

inline double sigmoid(double z) {
  z = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
  return 1.0 / (1.0 + std::exp(-z));
}

// log(sigmoid(z)) without cancellation for large |z|.
inline double log_sigmoid(double z) {
  z = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

template <std::size_t Dim>
using Vec = std::array<double, Dim>;

template <std::size_t Dim>
struct Example {
  Vec<Dim> x{};
  int y = 0;  // 1 real, 0 fake
};

using LabeledExample = Example<kGestureDims>;

struct TrainConfig {
  double learning_rate = 0.1;
  int max_iterations = 2000;
  double grad_tolerance = 1e-6;
  double l2_lambda = 1e-3;  // penalty on ||theta||^2 against the per-example mean log-likelihood
  bool use_intercept = true;
  bool standardize = true;
  bool class_weighted = false;

  // Called after every accepted step with (iteration, penalized objective).
  std::function<void(int, double)> on_iteration;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");
    if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
    if (!(grad_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "grad_tolerance must be > 0");
    if (!(l2_lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l2_lambda must be >= 0");
  }
};

template <std::size_t Dim>
struct BasicUnitClassifier {
  std::string token;
  Vec<Dim> theta{};
  double intercept = 0.0;
  bool has_intercept = true;
  Vec<Dim> feature_mean{};
  Vec<Dim> feature_std = [] {
    Vec<Dim> ones;
    ones.fill(1.0);
    return ones;
  }();
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  double train_loglik = 0.0;  // mean log-likelihood on the training set
  int iterations = 0;
  // Distribution of scores on real training examples, for timeline reports.
  double real_score_mean = 0.0;
  double real_score_std = 0.0;

  Vec<Dim> standardize(const Vec<Dim>& x) const {
    Vec<Dim> out;
    for (std::size_t j = 0; j < Dim; ++j) out[j] = (x[j] - feature_mean[j]) / feature_std[j];
    return out;
  }

  double decision(const Vec<Dim>& x) const {
    double z = has_intercept ? intercept : 0.0;
    for (std::size_t j = 0; j < Dim; ++j) z += theta[j] * ((x[j] - feature_mean[j]) / feature_std[j]);
    return z;
  }

  friend bool operator==(const BasicUnitClassifier&, const BasicUnitClassifier&) = default;
};

using UnitClassifier = BasicUnitClassifier<kGestureDims>;

template <std::size_t Dim>
double score(const BasicUnitClassifier<Dim>& clf, const Vec<Dim>& x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "feature vector has a non-finite component");
  }
  return sigmoid(clf.decision(x));
}

// Penalized mean log-likelihood over (already standardized) examples:
//   J(theta, b) = (1/W) sum_i w_i [y_i log s_i + (1 - y_i) log(1 - s_i)] - lambda ||theta||^2
// with s_i = sigmoid(theta . x_i + b). The intercept is not penalized.
template <std::size_t Dim>
class LogisticObjective {
 public:
  struct Params {
    Vec<Dim> theta{};
    double intercept = 0.0;
  };

  struct Evaluation {
    double value = 0.0;
    double loglik = 0.0;  // unpenalized mean log-likelihood
    Params gradient;
  };

  LogisticObjective(std::vector<Vec<Dim>> x, std::vector<int> y, std::vector<double> weights, double lambda,
                    bool use_intercept)
      : x_(std::move(x)), y_(std::move(y)), w_(std::move(weights)), lambda_(lambda), use_intercept_(use_intercept) {
    total_weight_ = 0.0;
    for (double w : w_) total_weight_ += w;
  }

  Evaluation evaluate(const Params& p) const {
    Evaluation e;
    double ll = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      double z = use_intercept_ ? p.intercept : 0.0;
      for (std::size_t j = 0; j < Dim; ++j) z += p.theta[j] * x_[i][j];
      z = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
      // One exp/log1p pair gives sigmoid(z) and both log-probabilities.
      const double ez = std::exp(-std::abs(z));
      const double s = z >= 0.0 ? 1.0 / (1.0 + ez) : ez / (1.0 + ez);
      const double log_s = (z >= 0.0 ? 0.0 : z) - std::log1p(ez);
      ll += w_[i] * (y_[i] ? log_s : log_s - z);
      const double r = w_[i] * (static_cast<double>(y_[i]) - s);
      for (std::size_t j = 0; j < Dim; ++j) e.gradient.theta[j] += r * x_[i][j];
      e.gradient.intercept += r;
    }
    double norm2 = 0.0;
    for (std::size_t j = 0; j < Dim; ++j) {
      e.gradient.theta[j] = e.gradient.theta[j] / total_weight_ - 2.0 * lambda_ * p.theta[j];
      norm2 += p.theta[j] * p.theta[j];
    }
    e.gradient.intercept = use_intercept_ ? e.gradient.intercept / total_weight_ : 0.0;
    e.loglik = ll / total_weight_;
    e.value = e.loglik - lambda_ * norm2;
    return e;
  }

  double value(const Params& p) const { return evaluate(p).value; }

  std::size_t size() const { return x_.size(); }

 private:
  std::vector<Vec<Dim>> x_;
  std::vector<int> y_;
  std::vector<double> w_;
  double total_weight_ = 0.0;
  double lambda_ = 0.0;
  bool use_intercept_ = true;
};

// Full-batch gradient ascent from zero. A step that would lower the
// objective is halved until it does not, so the objective never decreases.
template <std::size_t Dim>
BasicUnitClassifier<Dim> train_unit_classifier(std::span<const Example<Dim>> examples, const TrainConfig& config,
                                               std::string token = {}) {
  config.validate();
  BasicUnitClassifier<Dim> clf;
  clf.token = std::move(token);
  clf.has_intercept = config.use_intercept;
  for (const auto& ex : examples) {
    for (double v : ex.x) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, clf.token + ": non-finite training feature");
    }
    (ex.y ? clf.n_real : clf.n_fake) += 1;
  }
  if (clf.n_real == 0 || clf.n_fake == 0) {
    throw Error(ErrorCode::SingleClassData, clf.token + ": need at least one real and one fake example");
  }

  const auto m = static_cast<double>(examples.size());
  if (config.standardize) {
    Vec<Dim> mean{}, var{};
    for (const auto& ex : examples) {
      for (std::size_t j = 0; j < Dim; ++j) mean[j] += ex.x[j];
    }
    for (auto& v : mean) v /= m;
    for (const auto& ex : examples) {
      for (std::size_t j = 0; j < Dim; ++j) var[j] += (ex.x[j] - mean[j]) * (ex.x[j] - mean[j]);
    }
    for (std::size_t j = 0; j < Dim; ++j) {
      clf.feature_mean[j] = mean[j];
      clf.feature_std[j] = std::max(std::sqrt(var[j] / m), kStdFloor);
    }
  }

  std::vector<Vec<Dim>> xs;
  std::vector<int> ys;
  std::vector<double> ws;
  xs.reserve(examples.size());
  for (const auto& ex : examples) {
    xs.push_back(clf.standardize(ex.x));
    ys.push_back(ex.y ? 1 : 0);
    if (config.class_weighted) {
      ws.push_back(m / (2.0 * static_cast<double>(ex.y ? clf.n_real : clf.n_fake)));
    } else {
      ws.push_back(1.0);
    }
  }
  LogisticObjective<Dim> objective(std::move(xs), ys, std::move(ws), config.l2_lambda, config.use_intercept);

  using Params = typename LogisticObjective<Dim>::Params;
  Params p;
  auto state = objective.evaluate(p);
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    double gmax = std::abs(state.gradient.intercept);
    for (double g : state.gradient.theta) gmax = std::max(gmax, std::abs(g));
    if (gmax < config.grad_tolerance) break;

    double step = config.learning_rate;
    Params candidate;
    typename LogisticObjective<Dim>::Evaluation next;
    for (int halvings = 0;; ++halvings) {
      for (std::size_t j = 0; j < Dim; ++j) candidate.theta[j] = p.theta[j] + step * state.gradient.theta[j];
      candidate.intercept = p.intercept + step * state.gradient.intercept;
      next = objective.evaluate(candidate);
      if (next.value >= state.value || halvings >= 40) break;
      step *= 0.5;
    }
    if (next.value < state.value) break;  // no ascent direction left at machine precision
    p = candidate;
    state = next;
    if (config.on_iteration) config.on_iteration(it + 1, state.value);
  }

  clf.theta = p.theta;
  clf.intercept = config.use_intercept ? p.intercept : 0.0;
  clf.train_loglik = state.loglik;
  clf.iterations = it;

  double sum = 0.0, sum2 = 0.0;
  for (const auto& ex : examples) {
    if (!ex.y) continue;
    const double s = sigmoid(clf.decision(ex.x));
    sum += s;
    sum2 += s * s;
  }
  const auto nr = static_cast<double>(clf.n_real);
  clf.real_score_mean = sum / nr;
  clf.real_score_std = std::sqrt(std::max(0.0, sum2 / nr - clf.real_score_mean * clf.real_score_mean));
  return clf;
}

template <std::size_t Dim>
BasicUnitClassifier<Dim> train_unit_classifier(const std::vector<Example<Dim>>& examples, const TrainConfig& config,
                                               std::string token = {}) {
  return train_unit_classifier<Dim>(std::span<const Example<Dim>>(examples), config, std::move(token));
}

}  // namespace wordmotion
