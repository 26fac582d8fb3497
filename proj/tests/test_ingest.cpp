#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wordmotion/ingest.hpp"

using namespace wordmotion;

namespace {

std::string header_row() {
  std::string h = "frame, timestamp, success";
  for (auto name : kComponentNames) h += ", " + std::string(name);
  return h + "\n";
}

std::string row(long long frame, double t, int success, double base) {
  std::ostringstream out;
  out << frame << ", " << t << ", " << success;
  for (std::size_t j = 0; j < kGestureDims; ++j) out << ", " << base + static_cast<double>(j);
  out << "\n";
  return out.str();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

}  // namespace

TEST(FrameFeatures, ThreeRowsEchoValues) {
  std::istringstream in(header_row() + row(0, 0.0, 1, 0.5) + row(1, 0.033, 1, 1.5) + row(2, 0.067, 0, 2.5));
  auto s = parse_frame_features(in, 30.0, "alice", "v1");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.person_id, "alice");
  EXPECT_EQ(s.video_id, "v1");
  EXPECT_EQ(s.frames[1].frame_index, 1);
  EXPECT_DOUBLE_EQ(s.frames[1].timestamp, 0.033);
  EXPECT_FALSE(s.frames[2].success);
  for (std::size_t j = 0; j < kGestureDims; ++j) EXPECT_DOUBLE_EQ(s.frames[2].g[j], 2.5 + static_cast<double>(j));
  EXPECT_DOUBLE_EQ(s.frames[0].lip_ver(), 0.5 + 24.0);
  EXPECT_DOUBLE_EQ(s.frames[0].rotation(1), 0.5 + 18.0);
}

TEST(FrameFeatures, MissingColumn) {
  std::string h = header_row();
  h.replace(h.find("AU17_r"), 6, "AU17_x");
  std::istringstream in(h + row(0, 0.0, 1, 0.0));
  try {
    parse_frame_features(in, 30.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingColumn);
    EXPECT_NE(std::string(e.what()).find("AU17_r"), std::string::npos);
  }
}

TEST(FrameFeatures, NonMonotonicFramesReportsRow) {
  std::istringstream in(header_row() + row(0, 0.0, 1, 0) + row(2, 0.1, 1, 0) + row(1, 0.2, 1, 0));
  try {
    parse_frame_features(in, 30.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotonicFrames);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(FrameFeatures, DecreasingTimestampRejected) {
  std::istringstream in(header_row() + row(0, 0.5, 1, 0) + row(1, 0.4, 1, 0));
  EXPECT_EQ(code_of([&] { parse_frame_features(in, 30.0); }), ErrorCode::NonMonotonicFrames);
}

TEST(FrameFeatures, EmptyAndMalformed) {
  std::istringstream empty("");
  EXPECT_EQ(code_of([&] { parse_frame_features(empty, 30.0); }), ErrorCode::EmptyFile);
  std::istringstream header_only(header_row());
  EXPECT_EQ(code_of([&] { parse_frame_features(header_only, 30.0); }), ErrorCode::EmptyFile);
  std::istringstream short_row(header_row() + "0, 0.0, 1, 2.0\n");
  EXPECT_EQ(code_of([&] { parse_frame_features(short_row, 30.0); }), ErrorCode::MalformedRecord);
  std::string bad = "0, 0.0, 1, abc";
  for (std::size_t j = 1; j < kGestureDims; ++j) bad += ", 1";
  std::istringstream bad_number(header_row() + bad + "\n");
  EXPECT_EQ(code_of([&] { parse_frame_features(bad_number, 30.0); }), ErrorCode::MalformedRecord);
}

TEST(FrameFeatures, LandmarkColumnsDeriveLips) {
  std::string h = "frame,timestamp,success";
  for (std::size_t j = 0; j < kLipHorIndex; ++j) h += "," + std::string(kComponentNames[j]);
  h += ",X_48,Y_48,Z_48,X_54,Y_54,Z_54,X_51,Y_51,Z_51,X_57,Y_57,Z_57\n";
  std::string r = "0,0,1";
  for (std::size_t j = 0; j < kLipHorIndex; ++j) r += ",0";
  r += ",0,0,0,3,4,0,1,1,1,1,1,3\n";
  std::istringstream in(h + r);
  auto s = parse_frame_features(in, 30.0);
  EXPECT_DOUBLE_EQ(s.frames[0].lip_hor(), 5.0);
  EXPECT_DOUBLE_EQ(s.frames[0].lip_ver(), 2.0);
}

TEST(FrameFeatures, PrecomputedLipsPreferredOverLandmarks) {
  std::string h = header_row();
  h.pop_back();
  h += ",X_48,Y_48,Z_48,X_54,Y_54,Z_54,X_51,Y_51,Z_51,X_57,Y_57,Z_57\n";
  std::string r = row(0, 0.0, 1, 1.0);
  r.pop_back();
  r += ",0,0,0,30,40,0,0,0,0,0,0,0\n";
  std::istringstream in(h + r);
  auto s = parse_frame_features(in, 30.0);
  EXPECT_DOUBLE_EQ(s.frames[0].lip_hor(), 1.0 + 23.0);
}

TEST(FrameFeatures, NoLipSourceIsMissingColumn) {
  std::string h = "frame,timestamp,success";
  std::string r = "0,0,1";
  for (std::size_t j = 0; j < kLipHorIndex; ++j) {
    h += "," + std::string(kComponentNames[j]);
    r += ",0";
  }
  std::istringstream in(h + "\n" + r + "\n");
  EXPECT_EQ(code_of([&] { parse_frame_features(in, 30.0); }), ErrorCode::MissingColumn);
}

TEST(FrameFeatures, RoundTripAfterSixDigitQuantisation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = oracle::random_series(rng, 50);
    std::stringstream a;
    write_frame_features(s, a);
    auto once = parse_frame_features(a, 30.0, "p", "v");
    std::stringstream b;
    write_frame_features(once, b);
    auto twice = parse_frame_features(b, 30.0, "p", "v");
    EXPECT_EQ(once, twice);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(LipGeometry, KnownTriangles) {
  auto g = derive_lip_features({0, 0, 0}, {3, 4, 0}, {0, 0, 0}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(g.lip_hor, 5.0);
  EXPECT_DOUBLE_EQ(g.lip_ver, 0.0);
  auto same = derive_lip_features({1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1});
  EXPECT_DOUBLE_EQ(same.lip_hor, 0.0);
  EXPECT_DOUBLE_EQ(same.lip_ver, 0.0);
  EXPECT_DOUBLE_EQ(derive_lip_features({1, 2, 2}, {0, 0, 0}, {}, {}).lip_hor, 3.0);
}

TEST(LipGeometry, SymmetricUnderSwaps) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 200; ++i) {
    Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)}, d{u(rng), u(rng), u(rng)};
    auto g = derive_lip_features(a, b, c, d);
    auto swapped = derive_lip_features(b, a, d, c);
    EXPECT_EQ(g.lip_hor, swapped.lip_hor);
    EXPECT_EQ(g.lip_ver, swapped.lip_ver);
  }
}

TEST(LipGeometry, NonFiniteRejected) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(code_of([&] { derive_lip_features({nan, 0, 0}, {}, {}, {}); }), ErrorCode::NonFiniteCoordinate);
}

TEST(Alignments, FrameArithmetic) {
  std::istringstream in("hi\t1.0\t1.5\n");
  auto occ = parse_alignments(in, 30.0, 3000);
  ASSERT_EQ(occ.size(), 1u);
  EXPECT_EQ(occ[0], (WordOccurrence{"hi", 30, 45}));
}

TEST(Alignments, PunctuatedCommaForm) {
  std::istringstream in("# comment\n\nHi,,0.0,0.1\n");
  auto occ = parse_alignments(in, 30.0, 100);
  ASSERT_EQ(occ.size(), 1u);
  EXPECT_EQ(occ[0].token, "hi");
  EXPECT_EQ(occ[0].start_frame, 0);
  EXPECT_EQ(occ[0].end_frame, 3);
}

TEST(Alignments, EndClampedToLastFrame) {
  std::istringstream in("late\t99.0\t101.0\n");
  auto occ = parse_alignments(in, 30.0, 3000);
  EXPECT_EQ(occ[0].end_frame, 2999);
}

TEST(Alignments, SnapToleranceHandlesRoundedTimes) {
  EXPECT_EQ(seconds_to_start_frame(1.033333, 30.0), 31);
  EXPECT_EQ(seconds_to_end_frame(1.033333, 30.0), 31);
  EXPECT_EQ(seconds_to_start_frame(1.05, 30.0), 31);
  EXPECT_EQ(seconds_to_end_frame(1.05, 30.0), 32);
}

TEST(Alignments, ErrorsAreTyped) {
  std::istringstream neg("w\t2.0\t1.0\n");
  EXPECT_EQ(code_of([&] { read_alignment_records(neg); }), ErrorCode::NegativeDuration);
  std::istringstream bad("w\tx\t1.0\n");
  EXPECT_EQ(code_of([&] { read_alignment_records(bad); }), ErrorCode::MalformedRecord);
  std::istringstream fields("w\t1.0\n");
  EXPECT_EQ(code_of([&] { read_alignment_records(fields); }), ErrorCode::MalformedRecord);
  std::istringstream empty_token("...\t1.0\t2.0\n");
  EXPECT_EQ(code_of([&] { parse_alignments(empty_token, 30.0, 100); }), ErrorCode::MalformedRecord);
}

TEST(Alignments, SpansStayInsideSeriesForAnyTimes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(0.0, 50.0);
  std::uniform_int_distribution<long long> total(1, 600);
  for (int i = 0; i < 2000; ++i) {
    double a = t(rng), b = t(rng);
    if (b < a) std::swap(a, b);
    const auto n = total(rng);
    auto occ = alignments_to_occurrences({{"w", a, b}}, 30.0, n);
    ASSERT_GE(occ[0].start_frame, 0);
    ASSERT_LE(occ[0].end_frame, n - 1);
    ASSERT_LE(occ[0].start_frame, occ[0].end_frame);
  }
}

TEST(Alignments, WriteThenReadKeepsFrames) {
  std::vector<AlignmentRecord> recs{{"alpha", 1.0 / 3.0, 2.0 / 3.0}, {"beta", 10.1, 10.9}};
  std::stringstream buf;
  write_alignments(recs, buf);
  auto back = read_alignment_records(buf);
  auto a = alignments_to_occurrences(recs, 30.0, 1000);
  auto b = alignments_to_occurrences(back, 30.0, 1000);
  EXPECT_EQ(a, b);
}

TEST(Tokens, Normalisation) {
  EXPECT_EQ(normalize_token("Hi,"), "hi");
  EXPECT_EQ(normalize_token("\"Don't!\""), "don't");
  EXPECT_EQ(normalize_token("--"), "");
  EXPECT_EQ(normalize_token("caf\xc3\xa9."), "caf\xc3\xa9");
}

TEST(Manifest, TwoEntriesAndHourTotals) {
  auto dir = oracle::scratch_dir("manifest_ok");
  for (auto f : {"a.csv", "a.align", "b.align"}) std::ofstream(dir / f) << "x";
  std::istringstream in(
      R"({"person_id":"p","video_id":"a","label":"real","scenario":"real","feature_path":"a.csv","alignment_path":"a.align","duration_hours":0.5})"
      "\n"
      R"({"person_id":"p","video_id":"b","label":"fake","scenario":"dubbing","feature_path":"a.csv","alignment_path":"b.align","duration_hours":0.25,"fps":25})"
      "\n");
  auto m = load_manifest(in, dir);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[1].scenario, Scenario::Dubbing);
  EXPECT_DOUBLE_EQ(m.entries[1].fps, 25.0);
  EXPECT_EQ(m.entries[0].feature_path, (dir / "a.csv").lexically_normal());
  auto hours = m.hours_by_person();
  EXPECT_DOUBLE_EQ(hours["p"][Scenario::Real], 0.5);
  EXPECT_DOUBLE_EQ(hours["p"][Scenario::Dubbing], 0.25);

  save_manifest(m, dir / "m.jsonl");
  EXPECT_EQ(load_manifest(dir / "m.jsonl").entries, m.entries);
}

TEST(Manifest, Errors) {
  auto dir = oracle::scratch_dir("manifest_err");
  std::istringstream holo(
      R"({"person_id":"p","video_id":"a","label":"fake","scenario":"hologram","feature_path":"a.csv","alignment_path":"a.align","duration_hours":0.5})");
  EXPECT_EQ(code_of([&] { load_manifest(holo, dir, false); }), ErrorCode::UnknownScenario);
  std::istringstream missing(
      R"({"person_id":"p","video_id":"a","label":"real","scenario":"real","feature_path":"nope.csv","alignment_path":"a.align","duration_hours":0.5})");
  EXPECT_EQ(code_of([&] { load_manifest(missing, dir, true); }), ErrorCode::MissingFile);
  std::istringstream mismatch(
      R"({"person_id":"p","video_id":"a","label":"real","scenario":"dubbing","feature_path":"a.csv","alignment_path":"a.align","duration_hours":0.5})");
  EXPECT_EQ(code_of([&] { load_manifest(mismatch, dir, false); }), ErrorCode::MalformedRecord);
  std::istringstream broken("{not json");
  EXPECT_EQ(code_of([&] { load_manifest(broken, dir, false); }), ErrorCode::MalformedRecord);
}
