#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wordmotion/features.hpp"
#include "wordmotion/synth.hpp"

using namespace wordmotion;

namespace {

PersonaSpec quiet_persona() {
  PersonaSpec p;
  p.person_id = "p";
  p.vocabulary = {"alpha", "beta"};
  p.weights = {1.0, 1.0};
  p.word_frames = {{"alpha", 8}, {"beta", 8}};
  p.signatures["alpha"] = {{18}, 2.0};
  p.noise_std = 0.0;
  p.words_per_minute = 120.0;
  return p;
}

}  // namespace

TEST(Synth, NoiselessSignatureIsExact) {
  auto p = quiet_persona();
  Rng rng(1);
  auto v = generate_video(p, 30.0, rng, "v");
  ASSERT_FALSE(v.occurrences.empty());
  for (const auto& occ : v.occurrences) {
    auto f = std::get<GestureFeature>(extract_word_feature(v.series, occ));
    EXPECT_EQ(f.vector[18], occ.token == "alpha" ? 2.0 : 0.0) << occ.token;
    for (std::size_t j = 0; j < kGestureDims; ++j) {
      if (j != 18) EXPECT_EQ(f.vector[j], 0.0);
    }
  }
}

TEST(Synth, WordRateAndDeterminism) {
  auto p = quiet_persona();
  Rng a(9), b(9);
  auto v = generate_video(p, 60.0, a, "v");
  auto w = generate_video(p, 60.0, b, "v");
  EXPECT_EQ(v.series.frames, w.series.frames);
  EXPECT_EQ(v.occurrences, w.occurrences);
  EXPECT_GE(v.occurrences.size(), 119u);
  EXPECT_LE(v.occurrences.size(), 120u);
  EXPECT_EQ(v.series.size(), 1800u);
  for (std::size_t i = 1; i < v.occurrences.size(); ++i) {
    EXPECT_GT(v.occurrences[i].start_frame - v.occurrences[i - 1].end_frame, 3);
  }
}

TEST(Synth, PhonemeSignaturesNeedLexicon) {
  auto p = quiet_persona();
  p.signature_level = SignatureLevel::Phoneme;
  Rng rng(1);
  EXPECT_THROW(generate_video(p, 10.0, rng, "v"), Error);
  p.vocabulary.clear();
  p.weights.clear();
  EXPECT_THROW(p.validate(), Error);
}

TEST(Synth, DubbingLengthCheck) {
  std::vector<AlignmentRecord> donor{{"a", 1.0, 2.0}, {"b", 58.0, 59.5}, {"c", 59.5, 60.0}};
  EXPECT_EQ(simulate_dubbing(60.0, donor, 59.0).size(), 3u);
  EXPECT_EQ(simulate_dubbing(59.0, donor, 60.0).size(), 1u);
  try {
    simulate_dubbing(60.0, donor, 30.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(Synth, VocabularyHasRealPronunciations) {
  Rng rng(3);
  auto vocab = make_vocabulary(70, rng);
  EXPECT_EQ(vocab.words.size(), 70u);
  EXPECT_EQ(vocab.lexicon.size(), 70u);
  ASSERT_NE(vocab.lexicon.find("the"), nullptr);
  EXPECT_EQ(*vocab.lexicon.find("the"), (std::vector<std::string>{"DH", "AH0"}));
  for (const auto& w : vocab.words) EXPECT_GT(vocab.word_frames.at(w), 2);
}

TEST(Synth, CorpusLayoutAndGroundTruth) {
  SynthConfig c;
  c.hours_per_persona = 0.5;
  c.seed = 11;
  c.impersonators = true;
  c.impersonator_hours = 0.05;
  auto dir = oracle::scratch_dir("synth_layout");
  auto corpus = generate_corpus(c, dir);

  std::map<std::pair<std::string, Scenario>, std::size_t> groups;
  for (const auto& e : corpus.manifest.entries) {
    ++groups[{e.person_id, e.scenario}];
    EXPECT_TRUE(std::filesystem::exists(e.feature_path));
    EXPECT_TRUE(std::filesystem::exists(e.alignment_path));
  }
  EXPECT_EQ(groups.size(), 6u);
  EXPECT_EQ((groups[{"persona1", Scenario::Real}]), 15u);
  EXPECT_EQ((groups[{"persona1", Scenario::Dubbing}]), 15u);
  EXPECT_EQ((groups[{"persona2", Scenario::Impersonator}]), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "ground_truth.json"));
  EXPECT_EQ(corpus.ground_truth["personas"].size(), 2u);

  // Disjoint signature words, and the manifest reloads to the same entries.
  for (const auto& [unit, sig] : corpus.personas[0].signatures) {
    EXPECT_EQ(corpus.personas[1].signatures.count(unit), 0u);
    EXPECT_EQ(sig.amplitude, 1.0);
  }
  EXPECT_EQ(load_manifest(corpus.manifest_path).entries, corpus.manifest.entries);
}

TEST(Synth, SameSeedSameBytes) {
  SynthConfig c;
  c.hours_per_persona = 0.05;
  c.video_seconds = 30.0;
  c.seed = 4;
  auto a = oracle::scratch_dir("synth_bytes_a");
  auto b = oracle::scratch_dir("synth_bytes_b");
  generate_corpus(c, a);
  generate_corpus(c, b);
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    auto rel = std::filesystem::relative(entry.path(), a);
    EXPECT_EQ(oracle::slurp(entry.path()), oracle::slurp(b / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 5u);
}

TEST(Synth, DubbedSignatureWordsLoseTheirGesture) {
  SynthConfig c;
  c.hours_per_persona = 0.1;
  c.seed = 2;
  auto corpus = generate_corpus(c, oracle::scratch_dir("synth_dub"));
  const auto& persona = corpus.personas[0];
  std::map<Scenario, std::vector<double>> values;
  for (const auto& e : corpus.manifest.for_person(persona.person_id).entries) {
    auto series = parse_frame_features(e.feature_path, e.fps, e.person_id);
    std::ifstream in(e.alignment_path);
    auto occ = alignments_to_occurrences(read_alignment_records(in), e.fps, static_cast<long long>(series.size()));
    for (const auto& f : extract_all(series, occ).features) {
      auto it = persona.signatures.find(f.token);
      if (it == persona.signatures.end()) continue;
      for (int comp : it->second.components) values[e.scenario].push_back(f.vector[static_cast<std::size_t>(comp)]);
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  ASSERT_FALSE(values[Scenario::Real].empty());
  ASSERT_FALSE(values[Scenario::Dubbing].empty());
  EXPECT_LE(mean(values[Scenario::Dubbing]), mean(values[Scenario::Real]) - c.amplitude() / 2.0);
}
