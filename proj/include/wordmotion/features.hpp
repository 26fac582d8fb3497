#pragma once

// Word-conditioned gesture features: for each spoken unit, the per-component
// range (max - min) of the 25-D facial-motion vector over the unit's padded
// frame window. Also the fixed-window and phoneme-conditioned variants.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wordmotion/core.hpp"
#include "wordmotion/detail/text.hpp"
#include "wordmotion/ingest.hpp"
#include "wordmotion/log.hpp"

namespace wordmotion {

inline constexpr int kDefaultPadding = 3;

struct GestureFeature {
  std::string token;
  Gesture vector{};
  std::string person_id;
  std::string video_id;
  long long span_start = 0;  // unit span (s, n), inclusive
  long long span_end = 0;
  long long window_first = 0;  // frames actually covered after padding and clamping
  long long window_last = 0;
  ConditioningMode mode;

  friend bool operator==(const GestureFeature&, const GestureFeature&) = default;
};

enum class DropReason { EmptyWindow, MostlyInvalidFrames };

inline std::string_view to_string(DropReason r) {
  return r == DropReason::EmptyWindow ? "empty window" : "more than half of window frames invalid";
}

struct Dropped {
  std::string token;
  long long span_start = 0;
  long long span_end = 0;
  DropReason reason = DropReason::EmptyWindow;
};

namespace detail {

// Range of every component over valid frames in [first, last]. Drops the
// window when it is empty or more than half of its frames are invalid.
inline std::variant<Gesture, DropReason> window_range(const FrameFeatureSeries& series, long long first,
                                                      long long last) {
  if (last < first) return DropReason::EmptyWindow;
  Gesture lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  long long valid = 0;
  for (long long i = first; i <= last; ++i) {
    const auto& f = series.frames[static_cast<std::size_t>(i)];
    if (!f.success) continue;
    ++valid;
    for (std::size_t j = 0; j < kGestureDims; ++j) {
      lo[j] = std::min(lo[j], f.g[j]);
      hi[j] = std::max(hi[j], f.g[j]);
    }
  }
  const long long total = last - first + 1;
  if (valid == 0) return DropReason::EmptyWindow;
  if (2 * (total - valid) > total) return DropReason::MostlyInvalidFrames;
  Gesture delta;
  for (std::size_t j = 0; j < kGestureDims; ++j) delta[j] = hi[j] - lo[j];
  return delta;
}

}  // namespace detail

inline std::variant<GestureFeature, Dropped> extract_word_feature(const FrameFeatureSeries& series,
                                                                  const WordOccurrence& occ,
                                                                  int padding = kDefaultPadding,
                                                                  ConditioningMode mode = ConditioningMode::word()) {
  const auto total = static_cast<long long>(series.size());
  if (padding < 0) throw Error(ErrorCode::InvalidArgument, "padding must be >= 0");
  if (occ.start_frame < 0 || occ.end_frame < occ.start_frame || occ.end_frame >= total) {
    throw Error(ErrorCode::SpanOutOfRange, occ.token + " [" + std::to_string(occ.start_frame) + ", " +
                                               std::to_string(occ.end_frame) + "] in " +
                                               std::to_string(total) + " frames");
  }
  const long long first = std::max(0LL, occ.start_frame - padding);
  const long long last = std::min(total - 1, occ.end_frame + padding);
  auto range = detail::window_range(series, first, last);
  if (auto* reason = std::get_if<DropReason>(&range)) {
    return Dropped{occ.token, occ.start_frame, occ.end_frame, *reason};
  }
  return GestureFeature{occ.token,      std::get<Gesture>(range), series.person_id, series.video_id,
                        occ.start_frame, occ.end_frame,           first,            last,
                        mode};
}

struct ExtractionBatch {
  std::vector<GestureFeature> features;
  std::vector<Dropped> drops;
};

inline ExtractionBatch extract_all(const FrameFeatureSeries& series, const std::vector<WordOccurrence>& occurrences,
                                   int padding = kDefaultPadding, ConditioningMode mode = ConditioningMode::word()) {
  ExtractionBatch batch;
  batch.features.reserve(occurrences.size());
  for (const auto& occ : occurrences) {
    auto r = extract_word_feature(series, occ, padding, mode);
    if (auto* f = std::get_if<GestureFeature>(&r)) {
      batch.features.push_back(std::move(*f));
    } else {
      auto& d = std::get<Dropped>(r);
      log::debug(series.video_id + ": dropped '" + d.token + "' [" + std::to_string(d.span_start) + ", " +
                 std::to_string(d.span_end) + "]: " + std::string(to_string(d.reason)));
      batch.drops.push_back(std::move(d));
    }
  }
  return batch;
}

// Non-overlapping windows [0,L), [L,2L), ...; a trailing partial window is
// kept when it covers at least half a window. No padding.
inline std::vector<GestureFeature> extract_fixed_windows(const FrameFeatureSeries& series, int window_len) {
  if (window_len < 1) throw Error(ErrorCode::InvalidArgument, "window length must be >= 1");
  if (series.frames.empty()) throw Error(ErrorCode::EmptyFile, series.video_id + ": empty series");
  const auto total = static_cast<long long>(series.size());
  const auto mode = ConditioningMode::fixed_window(window_len);
  std::vector<GestureFeature> out;
  for (long long start = 0; start < total; start += window_len) {
    const long long last = std::min(total, start + window_len) - 1;
    const long long len = last - start + 1;
    if (len < window_len && 2 * len < window_len) break;
    auto range = detail::window_range(series, start, last);
    if (std::holds_alternative<DropReason>(range)) continue;
    out.push_back(GestureFeature{std::string(kWindowToken), std::get<Gesture>(range), series.person_id,
                                 series.video_id, start, last, start, last, mode});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phoneme lexicon

// CMU-style phone set with lexical stress on vowels (15 x 3 + 24 = 69) plus
// a silence/unknown symbol, 70 in total.
inline const std::vector<std::string>& phoneme_alphabet() {
  static const std::vector<std::string> alphabet = [] {
    std::vector<std::string> out;
    for (const char* v : {"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW"}) {
      for (const char* stress : {"0", "1", "2"}) out.push_back(std::string(v) + stress);
    }
    for (const char* c : {"B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
                          "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"}) {
      out.emplace_back(c);
    }
    out.emplace_back("SIL");
    return out;
  }();
  return alphabet;
}

inline bool is_phoneme(std::string_view symbol) {
  static const std::set<std::string, std::less<>> lookup(phoneme_alphabet().begin(), phoneme_alphabet().end());
  return lookup.find(symbol) != lookup.end();
}

class UnitLexicon {
 public:
  UnitLexicon() = default;

  void add(const std::string& word, std::vector<std::string> phonemes) {
    if (phonemes.empty()) throw Error(ErrorCode::InvalidLexicon, word + ": empty pronunciation");
    for (const auto& p : phonemes) {
      if (!is_phoneme(p)) throw Error(ErrorCode::InvalidLexicon, word + ": unknown phoneme '" + p + "'");
    }
    entries_.emplace(normalize_token(word), std::move(phonemes));  // first pronunciation wins
  }

  const std::vector<std::string>* find(const std::string& token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// Dictionary format: "WORD PH1 PH2 ...", ";;;" comments, "WORD(2)" alternates
// collapse onto the first pronunciation.
inline UnitLexicon load_lexicon(std::istream& in) {
  UnitLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty() || text.substr(0, 3) == ";;;" || text.front() == '#') continue;
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
      auto end = pos;
      while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
      if (end > pos) parts.emplace_back(text.substr(pos, end - pos));
      pos = end;
    }
    if (parts.size() < 2) {
      throw Error(ErrorCode::InvalidLexicon, "line " + std::to_string(line_no) + ": empty pronunciation");
    }
    std::string word = parts[0];
    if (auto paren = word.find('('); paren != std::string::npos && paren > 0 && word.back() == ')') {
      word = word.substr(0, paren);
    }
    lex.add(word, {parts.begin() + 1, parts.end()});
  }
  return lex;
}

inline UnitLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return load_lexicon(in);
}

inline void write_lexicon(const UnitLexicon& lex, std::ostream& out) {
  for (const auto& [word, phones] : lex.entries()) {
    std::string upper = word;
    for (auto& c : upper) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    out << upper;
    for (const auto& p : phones) out << ' ' << p;
    out << '\n';
  }
}

// Splits [s, n] into k sub-spans with boundaries s + round(i (n - s) / k).
// Neighbouring sub-spans share their boundary frame, so they tile the word.
inline std::vector<std::pair<long long, long long>> split_span(long long start, long long end, std::size_t k) {
  std::vector<std::pair<long long, long long>> out;
  out.reserve(k);
  const double width = static_cast<double>(end - start);
  long long prev = start;
  for (std::size_t i = 1; i <= k; ++i) {
    long long b = start + std::llround(width * static_cast<double>(i) / static_cast<double>(k));
    if (i == k) b = end;
    out.emplace_back(prev, b);
    prev = b;
  }
  return out;
}

struct PhonemeConversion {
  std::vector<WordOccurrence> occurrences;
  std::vector<std::string> out_of_vocabulary;
};

inline PhonemeConversion words_to_phoneme_occurrences(const std::vector<WordOccurrence>& words,
                                                      const UnitLexicon& lexicon) {
  if (lexicon.empty()) throw Error(ErrorCode::EmptyLexicon, "lexicon has no entries");
  PhonemeConversion out;
  for (const auto& w : words) {
    const auto* phones = lexicon.find(w.token);
    if (!phones) {
      log::debug("no pronunciation for '" + w.token + "', dropped");
      out.out_of_vocabulary.push_back(w.token);
      continue;
    }
    auto spans = split_span(w.start_frame, w.end_frame, phones->size());
    for (std::size_t i = 0; i < spans.size(); ++i) {
      out.occurrences.push_back({(*phones)[i], spans[i].first, spans[i].second});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trainable-unit selection: a unit qualifies when it occurs on average at
// least once per training hour.

inline std::size_t frequency_threshold(double training_hours) {
  if (!(training_hours > 0.0)) throw Error(ErrorCode::InvalidArgument, "training_hours must be > 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(training_hours)));
}

inline std::set<std::string> select_trainable_units(const std::map<std::string, std::size_t>& occurrence_counts,
                                                    double training_hours) {
  const auto threshold = frequency_threshold(training_hours);
  std::set<std::string> out;
  for (const auto& [token, count] : occurrence_counts) {
    if (count >= threshold) out.insert(token);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mode dispatch used by the pipeline.

struct UnitExtraction {
  ExtractionBatch batch;
  std::size_t out_of_vocabulary = 0;
};

inline UnitExtraction extract_units(const FrameFeatureSeries& series, const std::vector<WordOccurrence>& words,
                                    const ConditioningMode& mode, int padding, const UnitLexicon* lexicon) {
  UnitExtraction out;
  switch (mode.kind) {
    case ConditioningMode::Kind::Word:
    case ConditioningMode::Kind::WordWindow:
      out.batch = extract_all(series, words, padding, mode);
      break;
    case ConditioningMode::Kind::Phoneme: {
      if (!lexicon) throw Error(ErrorCode::EmptyLexicon, "phoneme mode requires a lexicon");
      auto conv = words_to_phoneme_occurrences(words, *lexicon);
      out.out_of_vocabulary = conv.out_of_vocabulary.size();
      out.batch = extract_all(series, conv.occurrences, padding, mode);
      break;
    }
    case ConditioningMode::Kind::FixedWindow:
      out.batch.features = extract_fixed_windows(series, mode.window_len);
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature cache (one JSON record per line)

inline void write_feature_cache(const std::vector<GestureFeature>& features, std::ostream& out) {
  for (const auto& f : features) {
    nlohmann::json j = {{"token", f.token},
                        {"person", f.person_id},
                        {"video", f.video_id},
                        {"s", f.span_start},
                        {"n", f.span_end},
                        {"first", f.window_first},
                        {"last", f.window_last},
                        {"mode", to_string(f.mode)},
                        {"window_len", f.mode.window_len},
                        {"values", f.vector}};
    out << j.dump() << '\n';
  }
}

inline std::vector<GestureFeature> read_feature_cache(std::istream& in) {
  std::vector<GestureFeature> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      GestureFeature f;
      f.token = j.at("token").get<std::string>();
      f.person_id = j.at("person").get<std::string>();
      f.video_id = j.at("video").get<std::string>();
      f.span_start = j.at("s").get<long long>();
      f.span_end = j.at("n").get<long long>();
      f.window_first = j.value("first", f.span_start);
      f.window_last = j.value("last", f.span_end);
      f.mode = parse_mode(j.at("mode").get<std::string>(), j.value("window_len", 30));
      f.vector = j.at("values").get<Gesture>();
      out.push_back(std::move(f));
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::MalformedRecord, "feature cache line " + std::to_string(line_no));
    }
  }
  return out;
}

}  // namespace wordmotion
