#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wordmotion/classifier.hpp"
#include "wordmotion/model_bank.hpp"

using namespace wordmotion;

namespace {

TrainConfig plain_config(double lambda) {
  TrainConfig c;
  c.l2_lambda = lambda;
  c.use_intercept = false;
  c.standardize = false;
  return c;
}

template <std::size_t Dim>
std::vector<Example<Dim>> toy_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int n = count(rng);
  std::vector<Example<Dim>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (auto& v : out[i].x) v = u(rng);
    out[i].y = i % 2;
  }
  return out;
}

template <std::size_t Dim>
void split_xy(const std::vector<Example<Dim>>& ex, std::vector<std::vector<double>>& x, std::vector<int>& y) {
  for (const auto& e : ex) {
    x.emplace_back(e.x.begin(), e.x.end());
    y.push_back(e.y);
  }
}

std::vector<LabeledExample> gesture_examples(std::mt19937_64& rng, std::size_t n, double shift) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<LabeledExample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].y = static_cast<int>(i % 2);
    for (auto& v : out[i].x) v = 5.0 + noise(rng);
    out[i].x[3] += out[i].y ? shift : 0.0;
  }
  return out;
}

}  // namespace

TEST(Sigmoid, KnownValues) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(2.0), 0.8807970779778823, 1e-15);
  EXPECT_NEAR(sigmoid(-2.0), 0.11920292202211755, 1e-15);
  EXPECT_GT(sigmoid(1e6), 0.0);
  EXPECT_GT(sigmoid(-1e6), 0.0);
  EXPECT_NEAR(log_sigmoid(-800.0), -500.0, 1e-9);
}

TEST(Classifier, MatchesGridSearchInOneDimension) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(0.1, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto ex = toy_problem<1>(rng);
    const double lambda = lam(rng);
    auto clf = train_unit_classifier<1>(ex, plain_config(lambda));
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    split_xy(ex, x, y);
    EXPECT_NEAR(clf.theta[0], oracle::grid_argmax_1d(x, y, lambda), 1e-2);
  }
}

TEST(Classifier, MatchesGridSearchInTwoDimensions) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lam(0.1, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    auto ex = toy_problem<2>(rng);
    const double lambda = lam(rng);
    auto clf = train_unit_classifier<2>(ex, plain_config(lambda));
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    split_xy(ex, x, y);
    auto ref = oracle::grid_argmax_2d(x, y, lambda);
    EXPECT_NEAR(clf.theta[0], ref[0], 1e-2);
    EXPECT_NEAR(clf.theta[1], ref[1], 1e-2);
  }
}

TEST(Classifier, ObjectiveAgreesWithDirectFormula) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto ex = toy_problem<2>(rng);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    split_xy(ex, x, y);
    std::vector<Vec<2>> xs;
    for (const auto& e : ex) xs.push_back(e.x);
    LogisticObjective<2> obj(xs, y, std::vector<double>(y.size(), 1.0), 0.3, true);
    LogisticObjective<2>::Params p{{u(rng), u(rng)}, u(rng)};
    EXPECT_NEAR(obj.value(p), oracle::penalized_loglik(x, y, {p.theta[0], p.theta[1]}, 0.3, p.intercept), 1e-12);
  }
}

TEST(Classifier, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 30; ++trial) {
    auto ex = toy_problem<2>(rng);
    std::vector<Vec<2>> xs;
    std::vector<int> y;
    for (const auto& e : ex) {
      xs.push_back(e.x);
      y.push_back(e.y);
    }
    LogisticObjective<2> obj(xs, y, std::vector<double>(y.size(), 1.0), 0.05, true);
    LogisticObjective<2>::Params p{{u(rng), u(rng)}, u(rng)};
    auto g = obj.evaluate(p).gradient;
    for (int k = 0; k < 3; ++k) {
      auto plus = p, minus = p;
      double* ap = k < 2 ? &plus.theta[k] : &plus.intercept;
      double* am = k < 2 ? &minus.theta[k] : &minus.intercept;
      *ap += h;
      *am -= h;
      const double fd = (obj.value(plus) - obj.value(minus)) / (2 * h);
      const double analytic = k < 2 ? g.theta[k] : g.intercept;
      const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-6});
      EXPECT_LE(std::abs(analytic - fd) / scale, 1e-5) << "component " << k;
    }
  }
}

TEST(Classifier, HeavyPenaltyShrinksWeights) {
  std::mt19937_64 rng(5);
  auto ex = gesture_examples(rng, 40, 3.0);
  TrainConfig c;
  c.l2_lambda = 1e6;
  auto clf = train_unit_classifier<kGestureDims>(ex, c);
  double norm = 0.0;
  for (double t : clf.theta) norm += t * t;
  EXPECT_LE(std::sqrt(norm), 1e-2);
}

TEST(Classifier, SingleClassRejected) {
  std::vector<Example<1>> ex{{{1.0}, 1}, {{2.0}, 1}};
  try {
    train_unit_classifier<1>(ex, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClassData);
  }
}

TEST(Classifier, ConfigValidation) {
  std::vector<Example<1>> ex{{{1.0}, 1}, {{2.0}, 0}};
  TrainConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(train_unit_classifier<1>(ex, c), Error);
  c = TrainConfig{};
  c.l2_lambda = -1.0;
  EXPECT_THROW(train_unit_classifier<1>(ex, c), Error);
}

TEST(Classifier, ObjectiveNeverDecreases) {
  std::mt19937_64 rng(6);
  auto ex = gesture_examples(rng, 60, 1.0);
  TrainConfig c;
  c.learning_rate = 5.0;  // large enough that halving has to kick in
  std::vector<double> trace;
  c.on_iteration = [&](int, double v) { trace.push_back(v); };
  train_unit_classifier<kGestureDims>(ex, c);
  ASSERT_GT(trace.size(), 1u);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1]);
}

TEST(Classifier, InvariantToExampleOrder) {
  std::mt19937_64 rng(7);
  auto ex = gesture_examples(rng, 50, 1.5);
  auto a = train_unit_classifier<kGestureDims>(ex, TrainConfig{});
  std::shuffle(ex.begin(), ex.end(), rng);
  auto b = train_unit_classifier<kGestureDims>(ex, TrainConfig{});
  for (std::size_t j = 0; j < kGestureDims; ++j) EXPECT_NEAR(a.theta[j], b.theta[j], 1e-6);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-6);
}

TEST(Classifier, StandardizationMakesScaleIrrelevant) {
  std::mt19937_64 rng(8);
  auto ex = gesture_examples(rng, 50, 1.5);
  auto scaled = ex;
  for (auto& e : scaled) {
    for (std::size_t j = 0; j < kGestureDims; ++j) e.x[j] = e.x[j] * (j + 1) * 10.0 + 3.0;
  }
  auto a = train_unit_classifier<kGestureDims>(ex, TrainConfig{});
  auto b = train_unit_classifier<kGestureDims>(scaled, TrainConfig{});
  for (std::size_t i = 0; i < ex.size(); ++i) {
    EXPECT_NEAR(score(a, ex[i].x), score(b, scaled[i].x), 1e-9);
  }
}

TEST(Classifier, ScoreIsDirectFormulaAndInUnitInterval) {
  std::mt19937_64 rng(9);
  auto ex = gesture_examples(rng, 40, 2.0);
  auto clf = train_unit_classifier<kGestureDims>(ex, TrainConfig{});
  for (const auto& e : ex) {
    double z = clf.intercept;
    for (std::size_t j = 0; j < kGestureDims; ++j) {
      z += clf.theta[j] * (e.x[j] - clf.feature_mean[j]) / clf.feature_std[j];
    }
    const double s = score(clf, e.x);
    EXPECT_NEAR(s, 1.0 / (1.0 + std::exp(-z)), 1e-12);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
  auto bad = ex[0].x;
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(score(clf, bad), Error);
}

TEST(Classifier, SeparatesShiftedClasses) {
  std::mt19937_64 rng(10);
  auto ex = gesture_examples(rng, 200, 4.0);
  auto clf = train_unit_classifier<kGestureDims>(ex, TrainConfig{});
  std::size_t correct = 0;
  for (const auto& e : ex) correct += (score(clf, e.x) > 0.5) == (e.y == 1);
  EXPECT_GT(correct, 190u);
}

namespace {

std::vector<LabeledFeature> labeled(std::mt19937_64& rng, const std::string& token, std::size_t n, bool with_fakes) {
  std::vector<LabeledFeature> out;
  for (const auto& ex : gesture_examples(rng, n, 2.0)) {
    if (!with_fakes && !ex.y) continue;
    LabeledFeature lf;
    lf.feature.token = token;
    lf.feature.vector = ex.x;
    lf.label = ex.y;
    out.push_back(lf);
  }
  return out;
}

}  // namespace

TEST(ModelBank, TrainsOnlyUnitsWithBothClasses) {
  log::silence();
  std::mt19937_64 rng(11);
  auto f = labeled(rng, "alpha", 30, true);
  auto g = labeled(rng, "beta", 30, true);
  auto h = labeled(rng, "gamma", 30, false);
  f.insert(f.end(), g.begin(), g.end());
  f.insert(f.end(), h.begin(), h.end());
  std::vector<std::string> skipped;
  auto bank = train_bank(f, {"alpha", "beta", "gamma", "delta"}, TrainConfig{}, "p", ConditioningMode::word(),
                         &skipped);
  EXPECT_EQ(bank.size(), 2u);
  EXPECT_NE(bank.find("alpha"), nullptr);
  EXPECT_EQ(bank.find("gamma"), nullptr);
  EXPECT_EQ(skipped, (std::vector<std::string>{"delta", "gamma"}));
  EXPECT_EQ(bank.find("alpha")->n_real, 15u);
}

TEST(ModelBank, EmptyBankIsAnError) {
  std::mt19937_64 rng(12);
  auto f = labeled(rng, "alpha", 10, false);
  try {
    train_bank(f, {"alpha"}, TrainConfig{}, "p", ConditioningMode::word());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBank);
  }
}

TEST(ModelBank, WordWindowPoolsEveryWord) {
  std::mt19937_64 rng(13);
  auto f = labeled(rng, "alpha", 20, true);
  auto g = labeled(rng, "beta", 20, true);
  f.insert(f.end(), g.begin(), g.end());
  for (auto& lf : f) lf.feature.mode = ConditioningMode::word_window();
  auto bank = train_bank(f, {std::string(kPooledWordToken)}, TrainConfig{}, "p", ConditioningMode::word_window());
  ASSERT_EQ(bank.size(), 1u);
  EXPECT_EQ(bank.units.begin()->second.n_real + bank.units.begin()->second.n_fake, 40u);
}

TEST(ModelBank, SaveLoadRoundTripIsExact) {
  std::mt19937_64 rng(14);
  auto f = labeled(rng, "alpha", 40, true);
  auto g = labeled(rng, "beta", 40, true);
  f.insert(f.end(), g.begin(), g.end());
  auto bank = train_bank(f, {"alpha", "beta"}, TrainConfig{}, "p", ConditioningMode::word());
  bank.metadata.training_hours = 1.0 / 3.0;
  std::stringstream buf;
  save_bank(bank, buf);
  auto back = load_bank(buf);
  EXPECT_EQ(back, bank);

  std::normal_distribution<double> noise(5.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    Gesture x;
    for (auto& v : x) v = noise(rng);
    for (const auto& [token, clf] : bank.units) EXPECT_EQ(score(clf, x), score(*back.find(token), x));
  }
}

TEST(ModelBank, CorruptAndFutureFilesRejected) {
  std::mt19937_64 rng(15);
  auto f = labeled(rng, "alpha", 20, true);
  auto bank = train_bank(f, {"alpha"}, TrainConfig{}, "p", ConditioningMode::word());
  std::stringstream buf;
  save_bank(bank, buf);
  const auto text = buf.str();

  std::istringstream truncated(text.substr(0, text.size() / 2));
  try {
    load_bank(truncated);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorruptModel);
  }

  auto j = nlohmann::json::parse(text);
  j["version"] = kBankFormatVersion + 1;
  try {
    bank_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VersionMismatch);
  }

  j = nlohmann::json::parse(text);
  j["units"][0]["feature_std"][0] = 0.0;
  EXPECT_THROW(bank_from_json(j), Error);

  std::istringstream junk("[1, 2, 3]");
  EXPECT_THROW(load_bank(junk), Error);
}
