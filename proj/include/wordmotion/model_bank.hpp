#pragma once

// A person's set of per-unit classifiers, plus training and persistence.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordmotion/classifier.hpp"
#include "wordmotion/core.hpp"
#include "wordmotion/features.hpp"
#include "wordmotion/log.hpp"

namespace wordmotion {

inline constexpr int kBankFormatVersion = 1;
inline constexpr std::string_view kBankFormatName = "wordmotion-model-bank";

struct BankMetadata {
  double training_hours = 0.0;
  std::size_t frequency_threshold = 1;
  std::size_t units_seen = 0;  // distinct units in the real training data
  int padding = kDefaultPadding;
  std::string config_hash;
  TrainConfig train_config;

  friend bool operator==(const BankMetadata& a, const BankMetadata& b) {
    const auto& x = a.train_config;
    const auto& y = b.train_config;
    return a.training_hours == b.training_hours && a.frequency_threshold == b.frequency_threshold &&
           a.units_seen == b.units_seen && a.padding == b.padding && a.config_hash == b.config_hash &&
           x.learning_rate == y.learning_rate && x.max_iterations == y.max_iterations &&
           x.grad_tolerance == y.grad_tolerance && x.l2_lambda == y.l2_lambda &&
           x.use_intercept == y.use_intercept && x.standardize == y.standardize &&
           x.class_weighted == y.class_weighted;
  }
};

struct ModelBank {
  std::string person_id;
  ConditioningMode mode;
  std::map<std::string, UnitClassifier> units;
  BankMetadata metadata;

  const UnitClassifier* find(const std::string& token) const {
    auto it = units.find(token);
    return it == units.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return units.size(); }

  friend bool operator==(const ModelBank&, const ModelBank&) = default;
};

struct LabeledFeature {
  GestureFeature feature;
  int label = 1;  // 1 real, 0 fake
};

// Key under which a feature is looked up in a bank: the pooled word-window
// variant trains one classifier for every word.
inline std::string bank_key(const GestureFeature& f) {
  if (f.mode.kind == ConditioningMode::Kind::WordWindow) return std::string(kPooledWordToken);
  return f.token;
}

inline ModelBank train_bank(std::span<const LabeledFeature> features, const std::set<std::string>& unit_set,
                            const TrainConfig& config, std::string person_id, ConditioningMode mode,
                            std::vector<std::string>* skipped = nullptr) {
  std::map<std::string, std::vector<LabeledExample>> grouped;
  for (const auto& lf : features) {
    auto key = bank_key(lf.feature);
    if (unit_set.count(key)) grouped[key].push_back({lf.feature.vector, lf.label ? 1 : 0});
  }

  ModelBank bank;
  bank.person_id = std::move(person_id);
  bank.mode = mode;
  bank.metadata.train_config = config;
  bank.metadata.train_config.on_iteration = nullptr;
  for (const auto& token : unit_set) {
    auto it = grouped.find(token);
    bool has_real = false, has_fake = false;
    if (it != grouped.end()) {
      for (const auto& ex : it->second) (ex.y ? has_real : has_fake) = true;
    }
    if (!has_real || !has_fake) {
      log::debug(bank.person_id + ": unit '" + token + "' skipped, " +
                 (has_real ? "no fake examples" : has_fake ? "no real examples" : "no examples"));
      if (skipped) skipped->push_back(token);
      continue;
    }
    bank.units.emplace(token, train_unit_classifier<kGestureDims>(it->second, config, token));
  }
  if (bank.units.empty()) {
    throw Error(ErrorCode::EmptyBank, bank.person_id + ": no unit has both real and fake training examples");
  }
  return bank;
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"max_iterations", c.max_iterations},
          {"grad_tolerance", c.grad_tolerance}, {"l2_lambda", c.l2_lambda},
          {"use_intercept", c.use_intercept},   {"standardize", c.standardize},
          {"class_weighted", c.class_weighted}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c = {}) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  c.grad_tolerance = j.value("grad_tolerance", c.grad_tolerance);
  c.l2_lambda = j.value("l2_lambda", c.l2_lambda);
  c.use_intercept = j.value("use_intercept", c.use_intercept);
  c.standardize = j.value("standardize", c.standardize);
  c.class_weighted = j.value("class_weighted", c.class_weighted);
  return c;
}

inline nlohmann::json bank_to_json(const ModelBank& bank) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& [token, u] : bank.units) {
    units.push_back({{"token", token},
                     {"theta", u.theta},
                     {"intercept", u.intercept},
                     {"has_intercept", u.has_intercept},
                     {"feature_mean", u.feature_mean},
                     {"feature_std", u.feature_std},
                     {"n_real", u.n_real},
                     {"n_fake", u.n_fake},
                     {"train_loglik", u.train_loglik},
                     {"iterations", u.iterations},
                     {"real_score_mean", u.real_score_mean},
                     {"real_score_std", u.real_score_std}});
  }
  const auto& m = bank.metadata;
  return {{"format", kBankFormatName},
          {"version", kBankFormatVersion},
          {"person_id", bank.person_id},
          {"mode", to_string(bank.mode)},
          {"window_len", bank.mode.window_len},
          {"metadata",
           {{"training_hours", m.training_hours},
            {"frequency_threshold", m.frequency_threshold},
            {"units_seen", m.units_seen},
            {"padding", m.padding},
            {"config_hash", m.config_hash}}},
          {"config", train_config_to_json(m.train_config)},
          {"units", units}};
}

inline ModelBank bank_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kBankFormatName) {
      throw Error(ErrorCode::CorruptModel, "not a model bank document");
    }
    const int version = j.at("version").get<int>();
    if (version != kBankFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, "bank version " + std::to_string(version) + ", expected " +
                                                  std::to_string(kBankFormatVersion));
    }
    ModelBank bank;
    bank.person_id = j.at("person_id").get<std::string>();
    bank.mode = parse_mode(j.at("mode").get<std::string>(), j.value("window_len", 30));
    const auto& meta = j.at("metadata");
    bank.metadata.training_hours = meta.at("training_hours").get<double>();
    bank.metadata.frequency_threshold = meta.at("frequency_threshold").get<std::size_t>();
    bank.metadata.units_seen = meta.value("units_seen", std::size_t{0});
    bank.metadata.padding = meta.at("padding").get<int>();
    bank.metadata.config_hash = meta.value("config_hash", std::string{});
    bank.metadata.train_config = train_config_from_json(j.at("config"));
    for (const auto& u : j.at("units")) {
      UnitClassifier c;
      c.token = u.at("token").get<std::string>();
      c.theta = u.at("theta").get<Gesture>();
      c.intercept = u.at("intercept").get<double>();
      c.has_intercept = u.at("has_intercept").get<bool>();
      c.feature_mean = u.at("feature_mean").get<Gesture>();
      c.feature_std = u.at("feature_std").get<Gesture>();
      c.n_real = u.at("n_real").get<std::size_t>();
      c.n_fake = u.at("n_fake").get<std::size_t>();
      c.train_loglik = u.at("train_loglik").get<double>();
      c.iterations = u.value("iterations", 0);
      c.real_score_mean = u.value("real_score_mean", 0.0);
      c.real_score_std = u.value("real_score_std", 0.0);
      for (double s : c.feature_std) {
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::CorruptModel, c.token + ": bad feature_std");
      }
      for (double t : c.theta) {
        if (!std::isfinite(t)) throw Error(ErrorCode::CorruptModel, c.token + ": non-finite theta");
      }
      if (!bank.units.emplace(c.token, c).second) {
        throw Error(ErrorCode::CorruptModel, "duplicate unit '" + c.token + "'");
      }
    }
    if (bank.units.empty()) throw Error(ErrorCode::CorruptModel, "bank has no units");
    return bank;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::CorruptModel, ex.what());
  }
}

inline void save_bank(const ModelBank& bank, std::ostream& out) { out << bank_to_json(bank).dump(2) << '\n'; }

inline void save_bank(const ModelBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  save_bank(bank, out);
}

inline ModelBank load_bank(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::CorruptModel, ex.what());
  }
  return bank_from_json(j);
}

inline ModelBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return load_bank(in);
}

}  // namespace wordmotion
