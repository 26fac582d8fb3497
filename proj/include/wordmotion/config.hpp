#pragma once

// Run configuration shared by every command: one JSON document, overridable
// from the command line, validated before any work starts and hashed so
// outputs can be traced back to it.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordmotion/classifier.hpp"
#include "wordmotion/core.hpp"
#include "wordmotion/detail/text.hpp"
#include "wordmotion/evaluation.hpp"
#include "wordmotion/experiment.hpp"
#include "wordmotion/features.hpp"
#include "wordmotion/model_bank.hpp"
#include "wordmotion/scoring.hpp"
#include "wordmotion/synth.hpp"

namespace wordmotion {

struct RunConfig {
  TrainConfig train;
  double train_fraction = 0.9;
  std::string mode = "word";
  int window_frames = 30;  // fixed-window length
  int padding = kDefaultPadding;
  double clip_seconds = kDefaultClipSeconds;
  double shift_seconds = kDefaultShiftSeconds;
  std::uint64_t seed = 1;

  std::filesystem::path manifest;
  std::filesystem::path bank;
  std::filesystem::path lexicon;
  std::filesystem::path out;

  SynthConfig synth;
  std::vector<double> hours_grid{0.1, 0.3, 0.6, 1.0};
  std::size_t top_k = 5;

  ConditioningMode conditioning() const { return parse_mode(mode, window_frames); }

  void validate() const {
    train.validate();
    SplitSpec{train_fraction, seed}.validate();
    conditioning();
    if (padding < 0) throw Error(ErrorCode::InvalidArgument, "padding must be >= 0");
    if (!(clip_seconds > 0.0) || !(shift_seconds > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "clip length and shift must be > 0");
    }
    for (double h : hours_grid) {
      if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "training-hours grid values must be > 0");
    }
    if (top_k < 1) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
    synth.validate();
  }
};

inline nlohmann::json synth_config_to_json(const SynthConfig& s) {
  return {{"personas", s.personas},
          {"hours_per_persona", s.hours_per_persona},
          {"fake_ratio", s.fake_ratio},
          {"video_seconds", s.video_seconds},
          {"vocabulary_size", s.vocabulary_size},
          {"signature_units", s.signature_units},
          {"max_signature_components", s.max_signature_components},
          {"noise_std", s.noise_std},
          {"amplitude_ratio", s.amplitude_ratio},
          {"words_per_minute", s.words_per_minute},
          {"fps", s.fps},
          {"disjoint_signatures", s.disjoint_signatures},
          {"signature_level", to_string(s.signature_level)},
          {"impersonators", s.impersonators},
          {"impersonator_hours", s.impersonator_hours}};
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidArgument, "unknown config key " + where + "." + key);
  }
}

}  // namespace detail

inline SynthConfig synth_config_from_json(const nlohmann::json& j, SynthConfig s) {
  detail::reject_unknown_keys(j,
                              {"personas", "hours_per_persona", "fake_ratio", "video_seconds", "vocabulary_size",
                               "signature_units", "max_signature_components", "noise_std", "amplitude_ratio",
                               "words_per_minute", "fps", "disjoint_signatures", "signature_level", "impersonators",
                               "impersonator_hours"},
                              "synth");
  s.personas = j.value("personas", s.personas);
  s.hours_per_persona = j.value("hours_per_persona", s.hours_per_persona);
  s.fake_ratio = j.value("fake_ratio", s.fake_ratio);
  s.video_seconds = j.value("video_seconds", s.video_seconds);
  s.vocabulary_size = j.value("vocabulary_size", s.vocabulary_size);
  s.signature_units = j.value("signature_units", s.signature_units);
  s.max_signature_components = j.value("max_signature_components", s.max_signature_components);
  s.noise_std = j.value("noise_std", s.noise_std);
  s.amplitude_ratio = j.value("amplitude_ratio", s.amplitude_ratio);
  s.words_per_minute = j.value("words_per_minute", s.words_per_minute);
  s.fps = j.value("fps", s.fps);
  s.disjoint_signatures = j.value("disjoint_signatures", s.disjoint_signatures);
  if (j.contains("signature_level")) s.signature_level = parse_signature_level(j.at("signature_level").get<std::string>());
  s.impersonators = j.value("impersonators", s.impersonators);
  s.impersonator_hours = j.value("impersonator_hours", s.impersonator_hours);
  return s;
}

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"train", train_config_to_json(c.train)},
          {"train_fraction", c.train_fraction},
          {"mode", c.mode},
          {"window_frames", c.window_frames},
          {"padding_frames", c.padding},
          {"clip_seconds", c.clip_seconds},
          {"shift_seconds", c.shift_seconds},
          {"seed", c.seed},
          {"manifest", c.manifest.generic_string()},
          {"bank", c.bank.generic_string()},
          {"lexicon", c.lexicon.generic_string()},
          {"out", c.out.generic_string()},
          {"synth", synth_config_to_json(c.synth)},
          {"hours_grid", c.hours_grid},
          {"top_k", c.top_k}};
}

// Keys missing from `j` keep their value in `base`; unknown keys and wrong
// types are usage errors.
inline RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {}) {
  try {
    detail::reject_unknown_keys(j,
                                {"train", "train_fraction", "mode", "window_frames", "padding_frames", "clip_seconds",
                                 "shift_seconds", "seed", "manifest", "bank", "lexicon", "out", "synth", "hours_grid",
                                 "top_k"},
                                "config");
    auto& c = base;
    if (j.contains("train")) {
      detail::reject_unknown_keys(j.at("train"),
                                  {"learning_rate", "max_iterations", "grad_tolerance", "l2_lambda", "use_intercept",
                                   "standardize", "class_weighted"},
                                  "train");
      c.train = train_config_from_json(j.at("train"), c.train);
    }
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.mode = j.value("mode", c.mode);
    c.window_frames = j.value("window_frames", c.window_frames);
    c.padding = j.value("padding_frames", c.padding);
    c.clip_seconds = j.value("clip_seconds", c.clip_seconds);
    c.shift_seconds = j.value("shift_seconds", c.shift_seconds);
    c.seed = j.value("seed", c.seed);
    c.manifest = j.value("manifest", c.manifest.generic_string());
    c.bank = j.value("bank", c.bank.generic_string());
    c.lexicon = j.value("lexicon", c.lexicon.generic_string());
    c.out = j.value("out", c.out.generic_string());
    if (j.contains("synth")) c.synth = synth_config_from_json(j.at("synth"), c.synth);
    c.hours_grid = j.value("hours_grid", c.hours_grid);
    c.top_k = j.value("top_k", c.top_k);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
}

inline RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
  return run_config_from_json(j, std::move(base));
}

// Hash of everything that can change results; the output location is left
// out so the same run written elsewhere keeps its hash.
inline std::string config_hash(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("out");
  return detail::hex64(detail::fnv1a(j.dump()));
}

inline ExperimentConfig experiment_config(const RunConfig& c) {
  ExperimentConfig e;
  e.train = c.train;
  e.split = {c.train_fraction, c.seed};
  e.mode = c.conditioning();
  e.padding = c.padding;
  e.clip_seconds = c.clip_seconds;
  e.shift_seconds = c.shift_seconds;
  e.config_hash = config_hash(c);
  if (!c.lexicon.empty()) e.lexicon = std::make_shared<UnitLexicon>(load_lexicon(c.lexicon));
  return e;
}

}  // namespace wordmotion
