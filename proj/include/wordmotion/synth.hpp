#pragma once

// Seeded synthetic personas whose spoken words carry known gesture
// signatures: an additive bump on a few components for the frames in which a
// signature unit is spoken, on top of i.i.d. Gaussian baseline noise. Output
// uses the same on-disk formats as real corpora.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordmotion/core.hpp"
#include "wordmotion/features.hpp"
#include "wordmotion/ingest.hpp"
#include "wordmotion/rng.hpp"

namespace wordmotion {

enum class SignatureLevel { Word, Phoneme };

inline std::string_view to_string(SignatureLevel l) { return l == SignatureLevel::Word ? "word" : "phoneme"; }

inline SignatureLevel parse_signature_level(std::string_view s) {
  if (s == "word") return SignatureLevel::Word;
  if (s == "phoneme") return SignatureLevel::Phoneme;
  throw Error(ErrorCode::InvalidArgument, "signature level must be 'word' or 'phoneme'");
}

struct Signature {
  std::vector<int> components;  // indices into the 25-D gesture vector
  double amplitude = 1.0;
};

struct PersonaSpec {
  std::string person_id;
  std::vector<std::string> vocabulary;
  std::vector<double> weights;              // sampling weight per vocabulary word
  std::map<std::string, int> word_frames;   // typical span length per word
  std::map<std::string, Signature> signatures;  // keyed by word or phoneme
  SignatureLevel signature_level = SignatureLevel::Word;
  double noise_std = 0.25;
  double words_per_minute = 100.0;
  double fps = 30.0;
  int min_gap_frames = 4;
  Gesture baseline{};
  std::uint64_t seed = 0;

  void validate() const {
    if (vocabulary.empty() || vocabulary.size() != weights.size()) {
      throw Error(ErrorCode::InvalidArgument, person_id + ": vocabulary and weights must be nonempty and aligned");
    }
    for (const auto& [unit, sig] : signatures) {
      for (int c : sig.components) {
        if (c < 0 || c >= static_cast<int>(kGestureDims)) {
          throw Error(ErrorCode::InvalidArgument, person_id + ": signature component out of range for " + unit);
        }
      }
      if (!(sig.amplitude > 0.0)) throw Error(ErrorCode::InvalidArgument, person_id + ": amplitude must be > 0");
    }
    if (!(fps > 0.0) || !(words_per_minute > 0.0) || noise_std < 0.0) {
      throw Error(ErrorCode::InvalidArgument, person_id + ": fps, words_per_minute must be > 0, noise_std >= 0");
    }
  }
};

struct GeneratedVideo {
  FrameFeatureSeries series;
  std::vector<AlignmentRecord> alignments;
  std::vector<WordOccurrence> occurrences;
};

namespace detail {

inline void clamp_to_valid_ranges(Gesture& g) {
  for (std::size_t j = 0; j < kActionUnits; ++j) g[j] = std::clamp(g[j], 0.0, 5.0);
  g[kLipHorIndex] = std::max(0.0, g[kLipHorIndex]);
  g[kLipVerIndex] = std::max(0.0, g[kLipVerIndex]);
}

}  // namespace detail

// Words occupy one slot of 60 / words_per_minute seconds each, starting at a
// random phase, and sit inside their slot with at least min_gap_frames of
// baseline before them, so a padded window never reaches the previous
// word's frames.
inline GeneratedVideo generate_video(const PersonaSpec& spec, double duration_s, Rng& rng, std::string video_id,
                                     const UnitLexicon* lexicon = nullptr) {
  spec.validate();
  if (!(duration_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "duration must be > 0");
  if (spec.signature_level == SignatureLevel::Phoneme && !lexicon) {
    throw Error(ErrorCode::EmptyLexicon, "phoneme-level signatures need a lexicon");
  }
  const auto total = std::max(1LL, std::llround(duration_s * spec.fps));
  const double slot = spec.fps * 60.0 / spec.words_per_minute;
  const double phase = std::uniform_real_distribution<double>(0.0, slot)(rng);
  const auto n_slots = static_cast<long long>(std::floor((static_cast<double>(total) - phase) / slot));

  GeneratedVideo out;
  out.series.person_id = spec.person_id;
  out.series.video_id = video_id;
  out.series.fps = spec.fps;

  std::discrete_distribution<std::size_t> pick_word(spec.weights.begin(), spec.weights.end());
  std::uniform_int_distribution<int> jitter(-2, 2);
  for (long long k = 0; k < n_slots; ++k) {
    const auto slot_start = std::llround(phase + static_cast<double>(k) * slot);
    const auto slot_end = std::min(total, std::llround(phase + static_cast<double>(k + 1) * slot));
    const auto max_len = slot_end - slot_start - spec.min_gap_frames;
    const auto& word = spec.vocabulary[pick_word(rng)];
    if (max_len < 2) continue;
    auto it = spec.word_frames.find(word);
    const long long base = it == spec.word_frames.end() ? 10 : it->second;
    const long long len = std::clamp<long long>(base + jitter(rng), 2, max_len);
    std::uniform_int_distribution<long long> offset(spec.min_gap_frames, slot_end - slot_start - len);
    const long long s = slot_start + offset(rng);
    const long long n = s + len - 1;
    out.occurrences.push_back({word, s, n});
    out.alignments.push_back({word, static_cast<double>(s) / spec.fps, static_cast<double>(n) / spec.fps});
  }

  // Bump magnitude per frame and component; overlapping spans take the max.
  std::vector<Gesture> bump(static_cast<std::size_t>(total), Gesture{});
  auto apply = [&](const std::string& unit, long long s, long long n) {
    auto sig = spec.signatures.find(unit);
    if (sig == spec.signatures.end()) return;
    for (long long f = s; f <= n; ++f) {
      for (int c : sig->second.components) {
        auto& b = bump[static_cast<std::size_t>(f)][static_cast<std::size_t>(c)];
        b = std::max(b, sig->second.amplitude);
      }
    }
  };
  for (const auto& occ : out.occurrences) {
    if (spec.signature_level == SignatureLevel::Word) {
      apply(occ.token, occ.start_frame, occ.end_frame);
    } else if (const auto* phones = lexicon->find(occ.token)) {
      auto spans = split_span(occ.start_frame, occ.end_frame, phones->size());
      for (std::size_t i = 0; i < spans.size(); ++i) apply((*phones)[i], spans[i].first, spans[i].second);
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  out.series.frames.resize(static_cast<std::size_t>(total));
  for (long long i = 0; i < total; ++i) {
    auto& f = out.series.frames[static_cast<std::size_t>(i)];
    f.frame_index = i;
    f.timestamp = static_cast<double>(i) / spec.fps;
    f.success = true;
    for (std::size_t j = 0; j < kGestureDims; ++j) {
      const double eps = spec.noise_std > 0.0 ? spec.noise_std * noise(rng) : 0.0;
      f.g[j] = spec.baseline[j] + eps + bump[static_cast<std::size_t>(i)][j];
    }
    detail::clamp_to_valid_ranges(f.g);
  }
  return out;
}

// Pairs a video's motion track with another video's transcript. Donor words
// past the end of the target are trimmed away.
inline std::vector<AlignmentRecord> simulate_dubbing(double target_duration_s,
                                                     const std::vector<AlignmentRecord>& donor_alignments,
                                                     double donor_duration_s) {
  if (!(target_duration_s > 0.0) || !(donor_duration_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "durations must be > 0");
  }
  if (std::abs(donor_duration_s - target_duration_s) > 0.05 * target_duration_s) {
    throw Error(ErrorCode::LengthMismatch, "donor " + std::to_string(donor_duration_s) + " s vs target " +
                                               std::to_string(target_duration_s) + " s");
  }
  std::vector<AlignmentRecord> out;
  for (const auto& r : donor_alignments) {
    if (r.end_seconds <= target_duration_s) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpora

struct SynthConfig {
  std::size_t personas = 2;
  double hours_per_persona = 1.0;
  double fake_ratio = 1.0;  // dubbed hours per real hour
  double video_seconds = 120.0;
  std::size_t vocabulary_size = 40;
  std::size_t signature_units = 12;
  int max_signature_components = 3;
  double noise_std = 0.25;
  double amplitude_ratio = 4.0;  // amplitude = ratio * noise_std (ratio itself when noise is zero)
  double words_per_minute = 100.0;
  double fps = 30.0;
  bool disjoint_signatures = true;
  SignatureLevel signature_level = SignatureLevel::Word;
  bool impersonators = false;
  double impersonator_hours = 0.2;
  std::uint64_t seed = 1;

  double amplitude() const { return noise_std > 0.0 ? amplitude_ratio * noise_std : amplitude_ratio; }

  void validate() const {
    if (personas < 1) throw Error(ErrorCode::InvalidArgument, "need at least one persona");
    if (!(hours_per_persona > 0.0) || !(video_seconds > 0.0) || fake_ratio < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "hours, video length must be > 0 and fake ratio >= 0");
    }
    if (vocabulary_size < 1 || signature_units > vocabulary_size) {
      throw Error(ErrorCode::InvalidArgument, "signature units must not exceed the vocabulary");
    }
    if (max_signature_components < 1 || max_signature_components > static_cast<int>(kGestureDims)) {
      throw Error(ErrorCode::InvalidArgument, "max_signature_components must be in [1, 25]");
    }
    if (!(amplitude_ratio > 0.0) || noise_std < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "amplitude ratio must be > 0 and noise >= 0");
    }
  }
};

// Built-in vocabulary with CMU Pronouncing Dictionary transcriptions, so
// that phonemes are shared across words the way they are in real speech.
inline const std::vector<std::pair<std::string, std::string>>& builtin_pronunciations() {
  static const std::vector<std::pair<std::string, std::string>> entries = {
      {"the", "DH AH0"}, {"people", "P IY1 P AH0 L"}, {"america", "AH0 M EH1 R AH0 K AH0"},
      {"country", "K AH1 N T R IY0"}, {"know", "N OW1"}, {"going", "G OW1 IH0 NG"},
      {"think", "TH IH1 NG K"}, {"great", "G R EY1 T"}, {"really", "R IH1 L IY0"},
      {"because", "B IH0 K AO1 Z"}, {"president", "P R EH1 Z AH0 D EH2 N T"}, {"right", "R AY1 T"},
      {"said", "S EH1 D"}, {"want", "W AA1 N T"}, {"world", "W ER1 L D"},
      {"jobs", "JH AA1 B Z"}, {"deal", "D IY1 L"}, {"thank", "TH AE1 NG K"},
      {"very", "V EH1 R IY0"}, {"tremendous", "T R AH0 M EH1 N D AH0 S"}, {"believe", "B IH0 L IY1 V"},
      {"never", "N EH1 V ER0"}, {"together", "T AH0 G EH1 DH ER0"}, {"nation", "N EY1 SH AH0 N"},
      {"future", "F Y UW1 CH ER0"}, {"economy", "IH0 K AA1 N AH0 M IY0"}, {"health", "HH EH1 L TH"},
      {"change", "CH EY1 N JH"}, {"today", "T AH0 D EY1"}, {"years", "Y IH1 R Z"},
      {"actually", "AE1 K CH UW0 AH0 L IY0"}, {"important", "IH2 M P AO1 R T AH0 N T"},
      {"working", "W ER1 K IH0 NG"}, {"families", "F AE1 M AH0 L IY0 Z"},
      {"children", "CH IH1 L D R AH0 N"}, {"security", "S IH0 K Y UH1 R AH0 T IY0"},
      {"history", "HH IH1 S T ER0 IY0"}, {"everybody", "EH1 V R IY0 B AA2 D IY0"},
      {"problem", "P R AA1 B L AH0 M"}, {"question", "K W EH1 S CH AH0 N"},
      {"congress", "K AA1 NG G R AH0 S"}, {"campaign", "K AE0 M P EY1 N"}, {"support", "S AH0 P AO1 R T"},
      {"protect", "P R AH0 T EH1 K T"}, {"coverage", "K AH1 V ER0 IH0 JH"},
      {"education", "EH2 JH AH0 K EY1 SH AH0 N"}, {"energy", "EH1 N ER0 JH IY0"},
      {"freedom", "F R IY1 D AH0 M"}, {"government", "G AH1 V ER0 N M AH0 N T"},
      {"community", "K AH0 M Y UW1 N AH0 T IY0"}, {"democracy", "D IH0 M AA1 K R AH0 S IY0"},
      {"everyone", "EH1 V R IY0 W AH2 N"}, {"maybe", "M EY1 B IY0"}, {"something", "S AH1 M TH IH0 NG"},
      {"understand", "AH2 N D ER0 S T AE1 N D"}, {"obviously", "AA1 B V IY0 AH0 S L IY0"},
      {"certainly", "S ER1 T AH0 N L IY0"}, {"hello", "HH AH0 L OW1"}, {"thanks", "TH AE1 NG K S"},
      {"again", "AH0 G EH1 N"}};
  return entries;
}

struct SyntheticVocabulary {
  std::vector<std::string> words;
  std::map<std::string, int> word_frames;
  UnitLexicon lexicon;
};

// Typical spoken length grows with the number of phonemes.
inline int typical_word_frames(std::size_t n_phones, int extra) {
  return std::min(16, 3 + static_cast<int>(3 * n_phones / 2) + extra);
}

// Words beyond the built-in list get pseudo-pronunciations whose phonemes
// follow the phoneme frequencies of the built-in list.
inline SyntheticVocabulary make_vocabulary(std::size_t size, Rng& rng) {
  SyntheticVocabulary v;
  std::vector<std::string> phone_pool;
  std::uniform_int_distribution<int> extra(0, 2);
  for (std::size_t i = 0; i < size; ++i) {
    std::string word;
    std::vector<std::string> phones;
    if (i < builtin_pronunciations().size()) {
      const auto& [w, pron] = builtin_pronunciations()[i];
      word = w;
      std::istringstream ss(pron);
      for (std::string ph; ss >> ph;) phones.push_back(ph);
      phone_pool.insert(phone_pool.end(), phones.begin(), phones.end());
    } else {
      if (phone_pool.empty()) {
        for (const auto& [w, pron] : builtin_pronunciations()) {
          std::istringstream ss(pron);
          for (std::string ph; ss >> ph;) phone_pool.push_back(ph);
        }
      }
      word = "w" + std::to_string(i);
      std::uniform_int_distribution<std::size_t> n_dist(2, 7);
      std::uniform_int_distribution<std::size_t> pick(0, phone_pool.size() - 1);
      const auto n = n_dist(rng);
      for (std::size_t k = 0; k < n; ++k) phones.push_back(phone_pool[pick(rng)]);
    }
    v.word_frames[word] = typical_word_frames(phones.size(), extra(rng));
    v.lexicon.add(word, phones);
    v.words.push_back(std::move(word));
  }
  return v;
}

inline std::vector<PersonaSpec> make_personas(const SynthConfig& cfg, const SyntheticVocabulary& vocab) {
  cfg.validate();
  std::vector<PersonaSpec> out;
  std::set<std::string> used_units;
  // Units available for signatures.
  std::vector<std::string> pool;
  if (cfg.signature_level == SignatureLevel::Word) {
    pool = vocab.words;
  } else {
    std::set<std::string> phones;
    for (const auto& [w, p] : vocab.lexicon.entries()) phones.insert(p.begin(), p.end());
    pool.assign(phones.begin(), phones.end());
  }
  for (std::size_t i = 0; i < cfg.personas; ++i) {
    auto rng = child_stream(cfg.seed, "persona/" + std::to_string(i));
    PersonaSpec p;
    p.person_id = "persona" + std::to_string(i + 1);
    p.vocabulary = vocab.words;
    p.word_frames = vocab.word_frames;
    p.signature_level = cfg.signature_level;
    p.noise_std = cfg.noise_std;
    p.words_per_minute = cfg.words_per_minute;
    p.fps = cfg.fps;
    p.seed = child_seed(cfg.seed, p.person_id);

    // Zipf-like (exponent 1/2) usage with a persona-specific ranking.
    std::vector<std::size_t> rank(vocab.words.size());
    for (std::size_t r = 0; r < rank.size(); ++r) rank[r] = r;
    std::shuffle(rank.begin(), rank.end(), rng);
    p.weights.resize(rank.size());
    for (std::size_t w = 0; w < rank.size(); ++w) p.weights[w] = 1.0 / std::sqrt(static_cast<double>(rank[w] + 1));

    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t j = 0; j < kActionUnits; ++j) p.baseline[j] = 1.5 + 1.5 * u(rng);
    for (std::size_t j = 0; j < 3; ++j) p.baseline[kRotationOffset + j] = 0.2 * u(rng) - 0.1;
    p.baseline[kTranslationOffset + 0] = 40.0 * u(rng) - 20.0;
    p.baseline[kTranslationOffset + 1] = 40.0 * u(rng) - 20.0;
    p.baseline[kTranslationOffset + 2] = 400.0 + 200.0 * u(rng);
    p.baseline[kLipHorIndex] = 45.0 + 15.0 * u(rng);
    p.baseline[kLipVerIndex] = 8.0 + 12.0 * u(rng);

    std::vector<std::string> candidates;
    for (const auto& unit : pool) {
      if (!cfg.disjoint_signatures || !used_units.count(unit)) candidates.push_back(unit);
    }
    if (candidates.size() < cfg.signature_units) candidates = pool;  // not enough left to stay disjoint
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const auto n_sig = std::min(cfg.signature_units, candidates.size());
    std::uniform_int_distribution<int> n_comp(1, cfg.max_signature_components);
    for (std::size_t k = 0; k < n_sig; ++k) {
      std::vector<int> comps(kGestureDims);
      for (std::size_t c = 0; c < kGestureDims; ++c) comps[c] = static_cast<int>(c);
      std::shuffle(comps.begin(), comps.end(), rng);
      comps.resize(static_cast<std::size_t>(n_comp(rng)));
      std::sort(comps.begin(), comps.end());
      p.signatures[candidates[k]] = {comps, cfg.amplitude()};
      used_units.insert(candidates[k]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

struct SyntheticCorpus {
  DatasetManifest manifest;
  std::vector<PersonaSpec> personas;
  UnitLexicon lexicon;
  nlohmann::json ground_truth;
  std::filesystem::path manifest_path;
  std::filesystem::path lexicon_path;
};

inline nlohmann::json persona_to_json(const PersonaSpec& p) {
  nlohmann::json sigs = nlohmann::json::object();
  for (const auto& [unit, sig] : p.signatures) {
    sigs[unit] = {{"components", sig.components}, {"amplitude", sig.amplitude}};
  }
  nlohmann::json weights = nlohmann::json::object();
  for (std::size_t i = 0; i < p.vocabulary.size(); ++i) weights[p.vocabulary[i]] = p.weights[i];
  return {{"person_id", p.person_id},
          {"signature_level", to_string(p.signature_level)},
          {"signatures", sigs},
          {"weights", weights},
          {"noise_std", p.noise_std},
          {"words_per_minute", p.words_per_minute},
          {"fps", p.fps},
          {"baseline", p.baseline}};
}

namespace detail {

inline std::string video_name(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*s_%03zu", static_cast<int>(prefix.size()), prefix.data(), i);
  return buf;
}

inline void write_alignment_file(const std::vector<AlignmentRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "# word\tstart_seconds\tend_seconds\n";
  write_alignments(records, out);
}

}  // namespace detail

// Writes <out>/<person>/{real,dub,imp}_NNN.{csv,align}, lexicon.dict,
// manifest.jsonl and ground_truth.json. Identical config => identical bytes.
inline SyntheticCorpus generate_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  SyntheticCorpus corpus;
  auto vocab_rng = child_stream(cfg.seed, "vocabulary");
  auto vocab = make_vocabulary(cfg.vocabulary_size, vocab_rng);
  corpus.lexicon = vocab.lexicon;
  corpus.personas = make_personas(cfg, vocab);
  const UnitLexicon* lex = &corpus.lexicon;

  auto hours_of = [&](const FrameFeatureSeries& s) { return static_cast<double>(s.size()) / s.fps / 3600.0; };
  auto add_entry = [&](const std::string& person, const std::string& video, Label label, Scenario scenario,
                       const fs::path& features, const fs::path& align, double hours) {
    corpus.manifest.entries.push_back({person, video, label, scenario, features, align, hours, cfg.fps});
  };

  const auto n_real = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(cfg.hours_per_persona * 3600.0 /
                                                                                      cfg.video_seconds)));
  for (std::size_t pi = 0; pi < corpus.personas.size(); ++pi) {
    const auto& persona = corpus.personas[pi];
    const fs::path dir = out_dir / persona.person_id;
    fs::create_directories(dir);

    std::vector<GeneratedVideo> reals;
    for (std::size_t i = 0; i < n_real; ++i) {
      auto rng = child_stream(persona.seed, "real/" + std::to_string(i));
      std::uniform_real_distribution<double> stretch(-0.02, 0.02);
      const double duration = cfg.video_seconds * (1.0 + stretch(rng));
      auto name = detail::video_name("real", i);
      auto video = generate_video(persona, duration, rng, name, lex);
      write_frame_features(video.series, dir / (name + ".csv"));
      detail::write_alignment_file(video.alignments, dir / (name + ".align"));
      add_entry(persona.person_id, name, Label::Real, Scenario::Real, dir / (name + ".csv"), dir / (name + ".align"),
                hours_of(video.series));
      reals.push_back(std::move(video));
    }

    const auto n_dub = static_cast<std::size_t>(std::llround(cfg.fake_ratio * static_cast<double>(n_real)));
    for (std::size_t i = 0; i < n_dub; ++i) {
      auto rng = child_stream(persona.seed, "dub/" + std::to_string(i));
      const std::size_t target = i % n_real;
      const auto& t = reals[target];
      std::vector<std::size_t> donors;
      for (std::size_t d = 0; d < n_real; ++d) {
        const double td = t.series.duration_seconds(), dd = reals[d].series.duration_seconds();
        if (d != target && std::abs(dd - td) <= 0.05 * td) donors.push_back(d);
      }
      if (donors.empty()) throw Error(ErrorCode::LengthMismatch, "no donor within 5% for " + t.series.video_id);
      std::uniform_int_distribution<std::size_t> pick(0, donors.size() - 1);
      const auto& donor = reals[donors[pick(rng)]];
      auto records = simulate_dubbing(t.series.duration_seconds(), donor.alignments, donor.series.duration_seconds());
      auto name = detail::video_name("dub", i);
      detail::write_alignment_file(records, dir / (name + ".align"));
      add_entry(persona.person_id, name, Label::Fake, Scenario::Dubbing, dir / (t.series.video_id + ".csv"),
                dir / (name + ".align"), hours_of(t.series));
    }

    if (cfg.impersonators && corpus.personas.size() > 1) {
      // Same words, baseline and gesture repertoire, but the gestures are
      // attached to the units another persona emphasises.
      auto impostor = persona;
      impostor.signatures.clear();
      const auto& other = corpus.personas[(pi + 1) % corpus.personas.size()].signatures;
      std::vector<std::string> units;
      for (const auto& [unit, sig] : other) units.push_back(unit);
      // Offset by one so no unit keeps its own gesture even when both
      // personas emphasise the same units.
      std::size_t k = 0;
      for (const auto& [unit, sig] : persona.signatures) {
        if (units.empty()) break;
        impostor.signatures[units[(k + 1) % units.size()]] = sig;
        if (++k == units.size()) break;
      }
      const auto n_imp =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.impersonator_hours * 3600.0 /
                                                                          cfg.video_seconds)));
      for (std::size_t i = 0; i < n_imp; ++i) {
        auto rng = child_stream(persona.seed, "imp/" + std::to_string(i));
        auto name = detail::video_name("imp", i);
        auto video = generate_video(impostor, cfg.video_seconds, rng, name, lex);
        write_frame_features(video.series, dir / (name + ".csv"));
        detail::write_alignment_file(video.alignments, dir / (name + ".align"));
        add_entry(persona.person_id, name, Label::Fake, Scenario::Impersonator, dir / (name + ".csv"),
                  dir / (name + ".align"), hours_of(video.series));
      }
    }
  }

  corpus.lexicon_path = out_dir / "lexicon.dict";
  {
    std::ofstream lex_out(corpus.lexicon_path);
    write_lexicon(corpus.lexicon, lex_out);
  }
  corpus.manifest_path = out_dir / "manifest.jsonl";
  save_manifest(corpus.manifest, corpus.manifest_path);

  corpus.ground_truth = {{"seed", cfg.seed}, {"personas", nlohmann::json::array()}};
  for (const auto& p : corpus.personas) corpus.ground_truth["personas"].push_back(persona_to_json(p));
  std::ofstream gt(out_dir / "ground_truth.json");
  gt << corpus.ground_truth.dump(2) << '\n';
  return corpus;
}

}  // namespace wordmotion
