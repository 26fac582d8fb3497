#pragma once

// Clip segmentation and geometric-mean aggregation of per-unit real
// probabilities into clip and video scores.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wordmotion/classifier.hpp"
#include "wordmotion/features.hpp"
#include "wordmotion/ingest.hpp"
#include "wordmotion/log.hpp"
#include "wordmotion/model_bank.hpp"

namespace wordmotion {

inline constexpr double kScoreEpsilon = 1e-8;
inline constexpr double kDefaultClipSeconds = 10.0;
inline constexpr double kDefaultShiftSeconds = 2.0;

struct ClipSpec {
  std::string video_id;
  long long start_frame = 0;
  long long end_frame = 0;  // exclusive
  double clip_length_s = kDefaultClipSeconds;
  double shift_s = kDefaultShiftSeconds;

  double start_seconds(double fps) const { return static_cast<double>(start_frame) / fps; }
  bool contains(long long first, long long last) const { return first >= start_frame && last < end_frame; }
};

inline std::vector<ClipSpec> segment_clips(const FrameFeatureSeries& series, double clip_length_s = kDefaultClipSeconds,
                                           double shift_s = kDefaultShiftSeconds) {
  if (!(clip_length_s > 0.0) || !(shift_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "clip length and shift must be > 0");
  }
  const auto total = static_cast<long long>(series.size());
  const long long clip_frames = std::max(1LL, std::llround(clip_length_s * series.fps));
  const long long shift_frames = std::max(1LL, std::llround(shift_s * series.fps));
  std::vector<ClipSpec> clips;
  for (long long start = 0; start + clip_frames <= total; start += shift_frames) {
    clips.push_back({series.video_id, start, start + clip_frames, clip_length_s, shift_s});
  }
  if (clips.empty()) {
    log::warn("VideoShorterThanClip: " + series.video_id + " has " + std::to_string(total) +
              " frames, a clip needs " + std::to_string(clip_frames));
  }
  return clips;
}

// exp(mean(log s_i)) with every s_i clamped into [eps, 1 - eps].
inline double geometric_mean(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptySequence, "geometric mean of no scores");
  double sum = 0.0;
  for (double s : scores) sum += std::log(std::clamp(s, kScoreEpsilon, 1.0 - kScoreEpsilon));
  return std::exp(sum / static_cast<double>(scores.size()));
}

inline double geometric_mean(const std::vector<double>& scores) {
  return geometric_mean(std::span<const double>(scores));
}

struct UnitScore {
  std::string token;
  double score = 0.0;
  long long window_first = 0;
  long long window_last = 0;
};

struct ClipScore {
  ClipSpec clip;
  std::optional<double> score;  // empty means abstain
  std::size_t n_scored_units = 0;
  std::size_t n_discarded_units = 0;
  std::vector<UnitScore> per_unit;

  bool abstained() const { return !score.has_value(); }
};

inline void check_mode(const ModelBank& bank, const GestureFeature& f) {
  if (!(f.mode == bank.mode)) {
    throw Error(ErrorCode::ModeMismatch, "bank mode " + to_string(bank.mode) + ", feature mode " + to_string(f.mode));
  }
}

struct UnitScoring {
  std::vector<UnitScore> scored;
  std::size_t discarded = 0;
};

// Scores every feature the bank knows; unknown units are discarded.
inline UnitScoring score_units(const ModelBank& bank, std::span<const GestureFeature> features) {
  UnitScoring out;
  for (const auto& f : features) {
    check_mode(bank, f);
    const auto* clf = bank.find(bank_key(f));
    if (!clf) {
      ++out.discarded;
      continue;
    }
    out.scored.push_back({f.token, score(*clf, f.vector), f.window_first, f.window_last});
  }
  return out;
}

inline ClipScore score_clip(const ModelBank& bank, std::span<const GestureFeature> features, ClipSpec clip = {}) {
  ClipScore out;
  out.clip = std::move(clip);
  auto units = score_units(bank, features);
  out.n_discarded_units = units.discarded;
  out.n_scored_units = units.scored.size();
  if (!units.scored.empty()) {
    std::vector<double> values;
    values.reserve(units.scored.size());
    for (const auto& u : units.scored) values.push_back(u.score);
    out.score = geometric_mean(values);
  }
  out.per_unit = std::move(units.scored);
  return out;
}

// A unit belongs to a clip when its padded window lies entirely inside it.
inline std::vector<GestureFeature> features_in_clip(std::span<const GestureFeature> features, const ClipSpec& clip) {
  std::vector<GestureFeature> out;
  for (const auto& f : features) {
    if (clip.contains(f.window_first, f.window_last)) out.push_back(f);
  }
  return out;
}

inline std::vector<ClipScore> score_clips(const ModelBank& bank, const FrameFeatureSeries& series,
                                          std::span<const GestureFeature> features,
                                          double clip_length_s = kDefaultClipSeconds,
                                          double shift_s = kDefaultShiftSeconds) {
  std::vector<ClipScore> out;
  for (auto& clip : segment_clips(series, clip_length_s, shift_s)) {
    auto inside = features_in_clip(features, clip);
    out.push_back(score_clip(bank, inside, std::move(clip)));
  }
  return out;
}

// Geometric mean over every trained-unit score in the video; nullopt abstains.
inline std::optional<double> score_video_features(const ModelBank& bank, std::span<const GestureFeature> features) {
  auto clip = score_clip(bank, features);
  return clip.score;
}

inline std::optional<double> score_video(const ModelBank& bank, const FrameFeatureSeries& series,
                                         const std::vector<WordOccurrence>& occurrences,
                                         const UnitLexicon* lexicon = nullptr) {
  auto extraction = extract_units(series, occurrences, bank.mode, bank.metadata.padding, lexicon);
  return score_video_features(bank, extraction.batch.features);
}

}  // namespace wordmotion
