#pragma once

// Interpretability output: which words separate real from fake best, how
// each gesture component is distributed per class, and a per-video
// timeline of word scores.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wordmotion/classifier.hpp"
#include "wordmotion/core.hpp"
#include "wordmotion/detail/text.hpp"
#include "wordmotion/evaluation.hpp"
#include "wordmotion/experiment.hpp"
#include "wordmotion/model_bank.hpp"

namespace wordmotion {

inline constexpr std::size_t kHistogramBins = 32;

struct ComponentHistogram {
  std::string component;
  double lo = 0.0;
  double hi = 0.0;
  std::array<std::size_t, kHistogramBins> real{};
  std::array<std::size_t, kHistogramBins> fake{};
  double real_mean = 0.0, real_std = 0.0;
  double fake_mean = 0.0, fake_std = 0.0;
};

struct TimelineRecord {
  std::string video_id;
  double time_seconds = 0.0;
  std::string token;
  double score = 0.0;
  double real_mean = 0.0;  // training distribution of real-class scores
  double real_std = 0.0;
  int label = 1;
};

struct WordReport {
  std::string token;
  std::optional<double> auc;  // empty when the test data lacks one class
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  std::vector<ComponentHistogram> histograms;
};

struct ReportSet {
  std::vector<WordReport> words;     // every bank unit seen in the test data
  std::vector<std::string> ranking;  // tokens with an AUC, best first
  std::vector<TimelineRecord> timeline;

  std::vector<std::string> top(std::size_t k) const {
    return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(std::min(k, ranking.size()))};
  }
  const WordReport* find(const std::string& token) const {
    for (const auto& w : words) {
      if (w.token == token) return &w;
    }
    return nullptr;
  }
};

namespace detail {

inline void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size()));
}

inline std::size_t bin_of(double x, double lo, double hi) {
  if (!(hi > lo)) return 0;
  auto b = static_cast<long long>(std::floor((x - lo) / (hi - lo) * static_cast<double>(kHistogramBins)));
  return static_cast<std::size_t>(std::clamp<long long>(b, 0, kHistogramBins - 1));
}

}  // namespace detail

inline ComponentHistogram component_histogram(std::size_t component, const std::vector<const GestureFeature*>& real,
                                              const std::vector<const GestureFeature*>& fake) {
  ComponentHistogram h;
  h.component = std::string(kComponentNames[component]);
  std::vector<double> r, f;
  for (const auto* x : real) r.push_back(x->vector[component]);
  for (const auto* x : fake) f.push_back(x->vector[component]);
  bool first = true;
  for (const auto* v : {&r, &f}) {
    for (double x : *v) {
      h.lo = first ? x : std::min(h.lo, x);
      h.hi = first ? x : std::max(h.hi, x);
      first = false;
    }
  }
  for (double x : r) ++h.real[detail::bin_of(x, h.lo, h.hi)];
  for (double x : f) ++h.fake[detail::bin_of(x, h.lo, h.hi)];
  detail::mean_std(r, h.real_mean, h.real_std);
  detail::mean_std(f, h.fake_mean, h.fake_std);
  return h;
}

// Ranks the bank's units by their own AUC on the given labeled features.
// Ties in AUC are broken by token so the ranking is deterministic.
inline ReportSet build_word_report(const ModelBank& bank, std::span<const LabeledFeature> features, double fps) {
  if (features.empty()) throw Error(ErrorCode::EmptySequence, "report needs labeled test features");
  if (!(fps > 0.0)) throw Error(ErrorCode::InvalidArgument, "fps must be > 0");
  struct Group {
    std::vector<const GestureFeature*> real, fake;
    std::vector<double> real_scores, fake_scores;
  };
  std::map<std::string, Group> groups;
  ReportSet out;
  for (const auto& lf : features) {
    check_mode(bank, lf.feature);
    const auto key = bank_key(lf.feature);
    const auto* clf = bank.find(key);
    if (!clf) continue;
    const double s = score(*clf, lf.feature.vector);
    auto& g = groups[key];
    (lf.label ? g.real : g.fake).push_back(&lf.feature);
    (lf.label ? g.real_scores : g.fake_scores).push_back(s);
    out.timeline.push_back({lf.feature.video_id, static_cast<double>(lf.feature.span_start) / fps, lf.feature.token, s,
                            clf->real_score_mean, clf->real_score_std, lf.label});
  }
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [token, g] : groups) {
    WordReport w;
    w.token = token;
    w.n_real = g.real.size();
    w.n_fake = g.fake.size();
    if (!g.real_scores.empty() && !g.fake_scores.empty()) {
      w.auc = auc(g.real_scores, g.fake_scores);
      ranked.emplace_back(*w.auc, token);
    }
    for (std::size_t c = 0; c < kGestureDims; ++c) w.histograms.push_back(component_histogram(c, g.real, g.fake));
    out.words.push_back(std::move(w));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (auto& [a, t] : ranked) out.ranking.push_back(std::move(t));
  std::stable_sort(out.timeline.begin(), out.timeline.end(), [](const auto& a, const auto& b) {
    return a.video_id != b.video_id ? a.video_id < b.video_id : a.time_seconds < b.time_seconds;
  });
  return out;
}

struct PersonReport {
  ModelBank bank;
  ReportSet report;
};

// Trains on the person's train split and reports on the test split. Only
// trainable scenarios are used so the fake class matches training.
inline PersonReport run_report(const DatasetManifest& manifest, const std::string& person, const ExperimentConfig& cfg,
                               CorpusCache& cache) {
  auto split = split_dataset(manifest, cfg.split);
  PersonReport out;
  out.bank = train_person(person, as_items(split.train.for_person(person).entries), cfg, cache).bank;
  std::vector<LabeledFeature> labeled;
  double fps = 0.0;
  for (const auto& e : split.test.for_person(person).entries) {
    if (!is_trainable_scenario(e.scenario)) continue;
    fps = e.fps;
    for (auto& f : extract_item_features({e, -1}, cfg, cache)) {
      labeled.push_back({std::move(f), e.label == Label::Real ? 1 : 0});
    }
  }
  out.report = build_word_report(out.bank, labeled, fps > 0.0 ? fps : 30.0);
  return out;
}

inline void write_ranking(const ReportSet& r, std::ostream& out) {
  out << "rank\ttoken\tauc\tn_real\tn_fake\n";
  std::size_t rank = 0;
  for (const auto& t : r.ranking) {
    const auto* w = r.find(t);
    out << ++rank << '\t' << t << '\t' << detail::format_fixed(*w->auc, 6) << '\t' << w->n_real << '\t' << w->n_fake
        << '\n';
  }
}

inline void write_histograms(const WordReport& w, std::ostream& out) {
  out << "component\tbin\tlo\thi\treal\tfake\n";
  for (const auto& h : w.histograms) {
    const double width = (h.hi - h.lo) / static_cast<double>(kHistogramBins);
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
      out << h.component << '\t' << b << '\t' << detail::format_g6(h.lo + width * static_cast<double>(b)) << '\t'
          << detail::format_g6(h.lo + width * static_cast<double>(b + 1)) << '\t' << h.real[b] << '\t' << h.fake[b]
          << '\n';
    }
  }
}

inline void write_summary_stats(const WordReport& w, std::ostream& out) {
  out << "component\treal_mean\treal_std\tfake_mean\tfake_std\n";
  for (const auto& h : w.histograms) {
    out << h.component << '\t' << detail::format_g6(h.real_mean) << '\t' << detail::format_g6(h.real_std) << '\t'
        << detail::format_g6(h.fake_mean) << '\t' << detail::format_g6(h.fake_std) << '\n';
  }
}

inline void write_timeline(const ReportSet& r, std::ostream& out) {
  out << "video\ttime_s\ttoken\tscore\treal_mean\treal_std\tlabel\n";
  for (const auto& t : r.timeline) {
    out << t.video_id << '\t' << detail::format_fixed(t.time_seconds, 3) << '\t' << t.token << '\t'
        << detail::format_fixed(t.score, 6) << '\t' << detail::format_fixed(t.real_mean, 6) << '\t'
        << detail::format_fixed(t.real_std, 6) << '\t' << (t.label ? "real" : "fake") << '\n';
  }
}

// ranking.tsv, timeline.tsv and, for the top_k words, words/<token>.hist.tsv
// and words/<token>.stats.tsv.
inline void write_report(const ReportSet& r, const std::filesystem::path& dir, std::size_t top_k) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "words");
  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "ranking.tsv");
    write_ranking(r, out);
  }
  {
    auto out = open(dir / "timeline.tsv");
    write_timeline(r, out);
  }
  for (const auto& t : r.top(top_k)) {
    const auto* w = r.find(t);
    auto hist = open(dir / "words" / (t + ".hist.tsv"));
    write_histograms(*w, hist);
    auto stats = open(dir / "words" / (t + ".stats.tsv"));
    write_summary_stats(*w, stats);
  }
}

}  // namespace wordmotion
