#pragma once

// Experiment harness: per-person training on the train split, clip-level
// scoring of the test split, per-scenario AUC, plus the ablation, transfer
// and training-size studies built on top of it.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wordmotion/classifier.hpp"
#include "wordmotion/evaluation.hpp"
#include "wordmotion/features.hpp"
#include "wordmotion/ingest.hpp"
#include "wordmotion/model_bank.hpp"
#include "wordmotion/rng.hpp"
#include "wordmotion/scoring.hpp"

namespace wordmotion {

struct ExperimentConfig {
  TrainConfig train;
  SplitSpec split;
  ConditioningMode mode;
  int padding = kDefaultPadding;
  double clip_seconds = kDefaultClipSeconds;
  double shift_seconds = kDefaultShiftSeconds;
  std::shared_ptr<const UnitLexicon> lexicon;  // required for phoneme mode
  std::string config_hash;

  ExperimentConfig with_mode(ConditioningMode m) const {
    auto copy = *this;
    copy.mode = m;
    return copy;
  }
};

// Parsed series and alignment records keyed by path; dubbed entries share
// the frame-feature file of the video they were made from.
class CorpusCache {
 public:
  const FrameFeatureSeries& series(const ManifestEntry& e) {
    const auto key = e.feature_path.string();
    auto it = series_.find(key);
    if (it == series_.end()) {
      it = series_.emplace(key, parse_frame_features(e.feature_path, e.fps, e.person_id)).first;
    }
    return it->second;
  }

  const std::vector<AlignmentRecord>& alignments(const ManifestEntry& e) {
    const auto key = e.alignment_path.string();
    auto it = alignments_.find(key);
    if (it == alignments_.end()) {
      std::ifstream in(e.alignment_path);
      if (!in) throw Error(ErrorCode::MissingFile, key);
      it = alignments_.emplace(key, read_alignment_records(in)).first;
    }
    return it->second;
  }

 private:
  std::map<std::string, FrameFeatureSeries> series_;
  std::map<std::string, std::vector<AlignmentRecord>> alignments_;
};

// A training video, optionally truncated to its first frame_limit frames.
struct VideoItem {
  ManifestEntry entry;
  long long frame_limit = -1;

  double hours() const {
    return frame_limit >= 0 ? static_cast<double>(frame_limit) / entry.fps / 3600.0 : entry.duration_hours;
  }
};

inline std::vector<VideoItem> as_items(const std::vector<ManifestEntry>& entries) {
  std::vector<VideoItem> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({e, -1});
  return out;
}

inline std::vector<GestureFeature> extract_item_features(const VideoItem& item, const ExperimentConfig& cfg,
                                                         CorpusCache& cache) {
  const auto& full = cache.series(item.entry);
  const FrameFeatureSeries* series = &full;
  FrameFeatureSeries truncated;
  const bool truncate = item.frame_limit >= 0 && item.frame_limit < static_cast<long long>(full.size());
  if (truncate) {
    if (item.frame_limit < 1) return {};
    truncated = full;
    truncated.frames.resize(static_cast<std::size_t>(item.frame_limit));
    series = &truncated;
  }
  std::vector<WordOccurrence> occurrences;
  if (cfg.mode.uses_alignment()) {
    occurrences = alignments_to_occurrences(cache.alignments(item.entry), item.entry.fps,
                                            static_cast<long long>(full.size()));
    if (truncate) {
      std::erase_if(occurrences, [&](const WordOccurrence& o) { return o.end_frame >= item.frame_limit; });
    }
  }
  auto extraction = extract_units(*series, occurrences, cfg.mode, cfg.padding, cfg.lexicon.get());
  for (auto& f : extraction.batch.features) {
    f.person_id = item.entry.person_id;
    f.video_id = item.entry.video_id;
  }
  return std::move(extraction.batch.features);
}

// ---------------------------------------------------------------------------
// Training

struct PersonTraining {
  ModelBank bank;
  std::size_t n_real_examples = 0;
  std::size_t n_fake_examples = 0;
  std::vector<std::string> skipped_units;
};

inline PersonTraining train_person(const std::string& person, const std::vector<VideoItem>& items,
                                   const ExperimentConfig& cfg, CorpusCache& cache) {
  PersonTraining out;
  std::vector<LabeledFeature> labeled;
  std::map<std::string, std::size_t> counts;
  double real_hours = 0.0;
  for (const auto& item : items) {
    const int label = item.entry.label == Label::Real ? 1 : 0;
    if (label) real_hours += item.hours();
    for (auto& f : extract_item_features(item, cfg, cache)) {
      if (label) {
        ++counts[bank_key(f)];
        ++out.n_real_examples;
      } else {
        ++out.n_fake_examples;
      }
      labeled.push_back({std::move(f), label});
    }
  }
  if (out.n_real_examples == 0 || out.n_fake_examples == 0) {
    throw Error(ErrorCode::SingleClassData, person + ": training data has " + std::to_string(out.n_real_examples) +
                                                " real and " + std::to_string(out.n_fake_examples) +
                                                " fake examples");
  }
  auto units = select_trainable_units(counts, real_hours);
  out.bank = train_bank(labeled, units, cfg.train, person, cfg.mode, &out.skipped_units);
  out.bank.metadata.training_hours = real_hours;
  out.bank.metadata.frequency_threshold = frequency_threshold(real_hours);
  out.bank.metadata.units_seen = counts.size();
  out.bank.metadata.padding = cfg.padding;
  out.bank.metadata.config_hash = cfg.config_hash;
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct ClipRecord {
  std::string person_id;
  std::string video_id;
  Scenario scenario = Scenario::Real;
  Label label = Label::Real;
  double start_seconds = 0.0;
  std::optional<double> score;
  std::size_t n_scored = 0;
  std::size_t n_discarded = 0;
};

struct ScenarioMetrics {
  std::optional<double> auc;  // real clips vs this scenario's clips; empty for "real" itself
  std::size_t n_clips = 0;
  std::size_t n_abstained = 0;

  double abstention_rate() const {
    return n_clips ? static_cast<double>(n_abstained) / static_cast<double>(n_clips) : 0.0;
  }
};

struct ExperimentResult {
  std::string person_id;
  std::string bank_person_id;
  ConditioningMode mode;
  std::map<Scenario, ScenarioMetrics> scenarios;
  std::size_t units_in_bank = 0;
  std::size_t units_tested = 0;
  std::vector<ClipRecord> clips;

  std::optional<double> auc(Scenario s) const {
    auto it = scenarios.find(s);
    return it == scenarios.end() ? std::nullopt : it->second.auc;
  }

  double abstention_rate() const {
    std::size_t n = 0, a = 0;
    for (const auto& [s, m] : scenarios) {
      n += m.n_clips;
      a += m.n_abstained;
    }
    return n ? static_cast<double>(a) / static_cast<double>(n) : 0.0;
  }
};

// Per-scenario AUC with `positive` clips as the positive class.
inline std::map<Scenario, ScenarioMetrics> scenario_metrics(const std::vector<ClipRecord>& clips,
                                                            Scenario positive = Scenario::Real) {
  std::map<Scenario, ScenarioMetrics> out;
  std::map<Scenario, std::vector<double>> scores;
  for (const auto& c : clips) {
    auto& m = out[c.scenario];
    ++m.n_clips;
    if (c.score) {
      scores[c.scenario].push_back(*c.score);
    } else {
      ++m.n_abstained;
    }
  }
  const auto& pos = scores[positive];
  for (auto& [s, m] : out) {
    if (s == positive) continue;
    const auto& neg = scores[s];
    if (!pos.empty() && !neg.empty()) m.auc = auc(pos, neg);
  }
  return out;
}

inline ExperimentResult evaluate_bank(const ModelBank& bank, const std::vector<ManifestEntry>& test,
                                      const ExperimentConfig& cfg, CorpusCache& cache) {
  ExperimentResult result;
  result.person_id = test.empty() ? bank.person_id : test.front().person_id;
  result.bank_person_id = bank.person_id;
  result.mode = bank.mode;
  result.units_in_bank = bank.size();
  std::set<std::string> tested;
  for (const auto& entry : test) {
    auto features = extract_item_features({entry, -1}, cfg, cache);
    const auto& series = cache.series(entry);
    for (const auto& clip : score_clips(bank, series, features, cfg.clip_seconds, cfg.shift_seconds)) {
      for (const auto& u : clip.per_unit) tested.insert(u.token);
      result.clips.push_back({entry.person_id, entry.video_id, entry.scenario, entry.label,
                              clip.clip.start_seconds(series.fps), clip.score, clip.n_scored_units,
                              clip.n_discarded_units});
    }
  }
  result.units_tested = tested.size();
  result.scenarios = scenario_metrics(result.clips);
  return result;
}

struct PersonRun {
  PersonTraining training;
  ExperimentResult result;
};

inline std::vector<PersonRun> run_person_experiments(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                                                     CorpusCache& cache) {
  auto split = split_dataset(manifest, cfg.split);
  std::vector<PersonRun> runs;
  for (const auto& person : manifest.persons()) {
    auto train = split.train.for_person(person);
    auto test = split.test.for_person(person);
    PersonRun run;
    run.training = train_person(person, as_items(train.entries), cfg, cache);
    run.result = evaluate_bank(run.training.bank, test.entries, cfg, cache);
    run.result.person_id = person;
    runs.push_back(std::move(run));
  }
  return runs;
}

inline std::vector<ExperimentResult> run_experiment(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                                                    CorpusCache& cache) {
  std::vector<ExperimentResult> out;
  for (auto& run : run_person_experiments(manifest, cfg, cache)) out.push_back(std::move(run.result));
  return out;
}

inline std::vector<ExperimentResult> run_experiment(const DatasetManifest& manifest, const ExperimentConfig& cfg) {
  CorpusCache cache;
  return run_experiment(manifest, cfg, cache);
}

// Mean of the defined per-person AUCs for every scenario.
inline std::map<Scenario, double> mean_auc(const std::vector<ExperimentResult>& results) {
  std::map<Scenario, std::pair<double, int>> acc;
  for (const auto& r : results) {
    for (const auto& [s, m] : r.scenarios) {
      if (m.auc) {
        acc[s].first += *m.auc;
        acc[s].second += 1;
      }
    }
  }
  std::map<Scenario, double> out;
  for (const auto& [s, v] : acc) out[s] = v.first / v.second;
  return out;
}

// ---------------------------------------------------------------------------
// Ablations: fixed windows, pooled word windows, word-specific classifiers.

struct AblationRow {
  std::string variant;
  ConditioningMode mode;
  std::map<Scenario, double> mean_auc;
  std::vector<ExperimentResult> per_person;
};

inline std::vector<AblationRow> run_ablations(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                                              CorpusCache& cache, int fixed_window_frames = 30) {
  std::vector<AblationRow> rows;
  for (auto mode : {ConditioningMode::fixed_window(fixed_window_frames), ConditioningMode::word_window(),
                    ConditioningMode::word()}) {
    AblationRow row;
    row.variant = to_string(mode);
    row.mode = mode;
    row.per_person = run_experiment(manifest, cfg.with_mode(mode), cache);
    row.mean_auc = mean_auc(row.per_person);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Transfer: each person's test clips scored with every other person's bank.
// The per-trainer AUCs are averaged.

struct TransferResult {
  std::string person_id;
  std::map<Scenario, double> mean_auc;
  std::map<Scenario, double> self_auc;
  std::map<std::string, ExperimentResult> by_trainer;
  bool abstain_dominated = false;
};

inline std::vector<TransferResult> run_transfer(const DatasetManifest& manifest, const ExperimentConfig& cfg,
                                                CorpusCache& cache) {
  const auto persons = manifest.persons();
  if (persons.size() < 2) throw Error(ErrorCode::InvalidArgument, "transfer needs at least two persons");
  auto split = split_dataset(manifest, cfg.split);
  std::map<std::string, ModelBank> banks;
  for (const auto& p : persons) {
    banks.emplace(p, train_person(p, as_items(split.train.for_person(p).entries), cfg, cache).bank);
  }
  std::vector<TransferResult> out;
  for (const auto& p : persons) {
    const auto test = split.test.for_person(p).entries;
    TransferResult tr;
    tr.person_id = p;
    for (const auto& [s, m] : evaluate_bank(banks.at(p), test, cfg, cache).scenarios) {
      if (m.auc) tr.self_auc[s] = *m.auc;
    }
    std::map<Scenario, std::pair<double, int>> acc;
    std::size_t clips = 0, abstained = 0;
    for (const auto& q : persons) {
      if (q == p) continue;
      auto r = evaluate_bank(banks.at(q), test, cfg, cache);
      for (const auto& [s, m] : r.scenarios) {
        clips += m.n_clips;
        abstained += m.n_abstained;
        if (m.auc) {
          acc[s].first += *m.auc;
          acc[s].second += 1;
        }
      }
      tr.by_trainer.emplace(q, std::move(r));
    }
    for (const auto& [s, v] : acc) tr.mean_auc[s] = v.first / v.second;
    tr.abstain_dominated = tr.mean_auc.empty() || (clips > 0 && 2 * abstained > clips);
    if (tr.abstain_dominated) log::warn("transfer to " + p + " is dominated by abstaining clips");
    out.push_back(std::move(tr));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training-size sweep

// Whole videos are taken in seeded random order until the hour budget is
// met; the last one is truncated to fit. Each trainable scenario gets the
// same budget. The selection is returned in manifest order.
inline std::vector<VideoItem> subsample_training(const DatasetManifest& train, double hours, std::uint64_t seed) {
  if (!(hours > 0.0)) throw Error(ErrorCode::InvalidArgument, "training-hours budget must be > 0");
  std::map<std::pair<std::string, Scenario>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < train.entries.size(); ++i) {
    const auto& e = train.entries[i];
    groups[{e.person_id, e.scenario}].push_back(i);
  }
  std::map<std::size_t, long long> chosen;  // index -> frame limit (-1 = whole)
  for (auto& [key, indices] : groups) {
    std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      return train.entries[a].video_id < train.entries[b].video_id;
    });
    auto rng = child_stream(seed, "sweep/" + key.first + "/" + std::string(to_string(key.second)));
    std::shuffle(indices.begin(), indices.end(), rng);
    double remaining = hours;
    for (auto idx : indices) {
      if (remaining <= 0.0) break;
      const auto& e = train.entries[idx];
      if (e.duration_hours <= remaining) {
        chosen[idx] = -1;
        remaining -= e.duration_hours;
      } else {
        auto frames = static_cast<long long>(std::floor(remaining * 3600.0 * e.fps));
        if (frames >= 1) chosen[idx] = frames;
        remaining = 0.0;
      }
    }
  }
  std::vector<VideoItem> out;
  for (const auto& [idx, limit] : chosen) out.push_back({train.entries[idx], limit});
  return out;
}

struct SweepPoint {
  std::string person_id;
  double requested_hours = 0.0;
  double training_hours = 0.0;  // real hours actually used
  std::map<Scenario, double> auc;
};

inline std::vector<SweepPoint> run_size_sweep(const DatasetManifest& manifest, const std::vector<double>& hours_grid,
                                              const ExperimentConfig& cfg, CorpusCache& cache) {
  for (double h : hours_grid) {
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "training-size grid values must be > 0");
  }
  auto split = split_dataset(manifest, cfg.split);
  std::vector<SweepPoint> out;
  for (const auto& person : manifest.persons()) {
    const auto train = split.train.for_person(person);
    const auto test = split.test.for_person(person).entries;
    for (double h : hours_grid) {
      auto items = subsample_training(train, h, cfg.split.seed);
      auto training = train_person(person, items, cfg, cache);
      auto result = evaluate_bank(training.bank, test, cfg, cache);
      SweepPoint pt;
      pt.person_id = person;
      pt.requested_hours = h;
      pt.training_hours = training.bank.metadata.training_hours;
      for (const auto& [s, m] : result.scenarios) {
        if (m.auc) pt.auc[s] = *m.auc;
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

// Mean AUC over persons for every (grid value, scenario).
inline std::map<double, std::map<Scenario, double>> sweep_curve(const std::vector<SweepPoint>& points) {
  std::map<double, std::map<Scenario, std::pair<double, int>>> acc;
  for (const auto& p : points) {
    for (const auto& [s, a] : p.auc) {
      acc[p.requested_hours][s].first += a;
      acc[p.requested_hours][s].second += 1;
    }
  }
  std::map<double, std::map<Scenario, double>> out;
  for (const auto& [h, per] : acc) {
    for (const auto& [s, v] : per) out[h][s] = v.first / v.second;
  }
  return out;
}

}  // namespace wordmotion
