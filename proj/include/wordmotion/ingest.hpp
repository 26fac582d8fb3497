#pragma once

// Parsers for per-frame facial-motion tracks (OpenFace-style CSV), word
// alignment transcripts and dataset manifests.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wordmotion/core.hpp"
#include "wordmotion/detail/text.hpp"

namespace wordmotion {

struct FrameRecord {
  long long frame_index = 0;
  double timestamp = 0.0;
  bool success = true;
  Gesture g{};  // see kComponentNames for the layout

  double au(std::size_t i) const { return g.at(i); }
  double rotation(std::size_t axis) const { return g.at(kRotationOffset + axis); }
  double translation(std::size_t axis) const { return g.at(kTranslationOffset + axis); }
  double lip_hor() const { return g[kLipHorIndex]; }
  double lip_ver() const { return g[kLipVerIndex]; }

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct FrameFeatureSeries {
  std::string person_id;
  std::string video_id;
  double fps = 30.0;
  std::vector<FrameRecord> frames;

  std::size_t size() const { return frames.size(); }
  double duration_seconds() const { return static_cast<double>(frames.size()) / fps; }

  friend bool operator==(const FrameFeatureSeries&, const FrameFeatureSeries&) = default;
};

// A spoken unit with an inclusive frame span [start_frame, end_frame].
struct WordOccurrence {
  std::string token;
  long long start_frame = 0;
  long long end_frame = 0;

  long long duration() const { return end_frame - start_frame; }

  friend bool operator==(const WordOccurrence&, const WordOccurrence&) = default;
};

// ---------------------------------------------------------------------------
// Lip geometry

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

struct LipGeometry {
  double lip_hor = 0.0;
  double lip_ver = 0.0;
};

inline LipGeometry derive_lip_features(const Point3& corner_left, const Point3& corner_right,
                                       const Point3& upper_lip, const Point3& lower_lip) {
  for (const Point3* p : {&corner_left, &corner_right, &upper_lip, &lower_lip}) {
    if (!std::isfinite(p->x) || !std::isfinite(p->y) || !std::isfinite(p->z)) {
      throw Error(ErrorCode::NonFiniteCoordinate, "lip landmark coordinate is not finite");
    }
  }
  // Differences squared are symmetric under swapping the two endpoints.
  auto dist = [](const Point3& a, const Point3& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
  };
  return {dist(corner_left, corner_right), dist(upper_lip, lower_lip)};
}

// ---------------------------------------------------------------------------
// Frame-feature files

namespace detail {

// Landmarks 48/54 are the mouth corners, 51/57 the outer upper/lower lip of
// the 68-point scheme.
inline constexpr std::array<std::string_view, 12> kLipLandmarkColumns = {
    "X_48", "Y_48", "Z_48", "X_54", "Y_54", "Z_54",
    "X_51", "Y_51", "Z_51", "X_57", "Y_57", "Z_57"};

inline bool parse_success_flag(std::string_view s, bool& out) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "True" || s == "1.0") { out = true; return true; }
  if (s == "0" || s == "false" || s == "False" || s == "0.0") { out = false; return true; }
  return false;
}

}  // namespace detail

inline FrameFeatureSeries parse_frame_features(std::istream& in, double fps,
                                               std::string person_id = {},
                                               std::string video_id = {}) {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(ErrorCode::InvalidArgument, "fps must be > 0");

  std::string line;
  std::size_t line_no = 0;
  // Header: first nonblank line.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) { have_header = true; break; }
  }
  if (!have_header) throw Error(ErrorCode::EmptyFile, "no header row");

  std::unordered_map<std::string, std::size_t> column;
  auto header = detail::split(line, ',');
  for (std::size_t i = 0; i < header.size(); ++i) {
    column.emplace(std::string(detail::trim(header[i])), i);
  }
  auto require = [&](std::string_view name) {
    auto it = column.find(std::string(name));
    if (it == column.end()) throw Error(ErrorCode::MissingColumn, std::string(name));
    return it->second;
  };

  const std::size_t col_frame = require("frame");
  const std::size_t col_time = require("timestamp");
  const std::size_t col_success = require("success");
  std::array<std::size_t, 23> col_core{};
  for (std::size_t i = 0; i < 23; ++i) col_core[i] = require(kComponentNames[i]);

  const bool precomputed_lips = column.count("lip_hor") && column.count("lip_ver");
  std::array<std::size_t, 2> col_lips{};
  std::array<std::size_t, 12> col_landmarks{};
  if (precomputed_lips) {
    col_lips = {column.at("lip_hor"), column.at("lip_ver")};
  } else {
    bool any_landmark = false;
    for (auto name : detail::kLipLandmarkColumns) any_landmark |= column.count(std::string(name)) > 0;
    if (!any_landmark) {
      throw Error(ErrorCode::MissingColumn, column.count("lip_hor") ? "lip_ver" : "lip_hor");
    }
    for (std::size_t i = 0; i < 12; ++i) col_landmarks[i] = require(detail::kLipLandmarkColumns[i]);
  }

  FrameFeatureSeries series{std::move(person_id), std::move(video_id), fps, {}};
  const std::size_t n_cols = header.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split(line, ',');
    if (fields.size() != n_cols) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": expected " +
                                                  std::to_string(n_cols) + " fields");
    }
    auto number = [&](std::size_t col) {
      auto v = detail::parse_double(fields[col]);
      if (!v) throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": bad number");
      return *v;
    };

    FrameRecord rec;
    auto frame = detail::parse_int(fields[col_frame]);
    if (!frame || *frame < 0) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": bad frame index");
    }
    rec.frame_index = *frame;
    rec.timestamp = number(col_time);
    if (!detail::parse_success_flag(fields[col_success], rec.success)) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": bad success flag");
    }
    for (std::size_t i = 0; i < 23; ++i) rec.g[i] = number(col_core[i]);
    if (precomputed_lips) {
      rec.g[kLipHorIndex] = number(col_lips[0]);
      rec.g[kLipVerIndex] = number(col_lips[1]);
    } else {
      std::array<double, 12> c{};
      for (std::size_t i = 0; i < 12; ++i) c[i] = number(col_landmarks[i]);
      auto lips = derive_lip_features({c[0], c[1], c[2]}, {c[3], c[4], c[5]},
                                      {c[6], c[7], c[8]}, {c[9], c[10], c[11]});
      rec.g[kLipHorIndex] = lips.lip_hor;
      rec.g[kLipVerIndex] = lips.lip_ver;
    }

    if (!series.frames.empty()) {
      const auto& prev = series.frames.back();
      if (rec.frame_index <= prev.frame_index || rec.timestamp < prev.timestamp) {
        throw Error(ErrorCode::NonMonotonicFrames, std::to_string(series.frames.size()));
      }
    }
    series.frames.push_back(rec);
  }
  if (series.frames.empty()) throw Error(ErrorCode::EmptyFile, "header only, no frames");
  return series;
}

inline FrameFeatureSeries parse_frame_features(const std::filesystem::path& path, double fps,
                                               std::string person_id = {},
                                               std::string video_id = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  if (video_id.empty()) video_id = path.stem().string();
  return parse_frame_features(in, fps, std::move(person_id), std::move(video_id));
}

// Canonical writer: precomputed lip columns, values at 6 significant digits.
inline void write_frame_features(const FrameFeatureSeries& series, std::ostream& out) {
  out << "frame,timestamp,success";
  for (auto name : kComponentNames) out << ',' << name;
  out << '\n';
  std::string row;
  for (const auto& f : series.frames) {
    row.clear();
    row += std::to_string(f.frame_index);
    row += ',';
    row += detail::format_g6(f.timestamp);
    row += f.success ? ",1" : ",0";
    for (double v : f.g) {
      row += ',';
      row += detail::format_g6(v);
    }
    row += '\n';
    out << row;
  }
}

inline void write_frame_features(const FrameFeatureSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_frame_features(series, out);
}

// ---------------------------------------------------------------------------
// Alignment transcripts

struct AlignmentRecord {
  std::string word;  // raw, un-normalized
  double start_seconds = 0.0;
  double end_seconds = 0.0;
};

// Decimal time stamps are snapped to the nearest frame boundary when they
// land within this many frames of it, so "1.033333" at 30 fps means frame 31.
inline constexpr double kFrameSnapTolerance = 1e-4;

inline long long seconds_to_start_frame(double seconds, double fps) {
  return static_cast<long long>(std::floor(seconds * fps + kFrameSnapTolerance));
}

inline long long seconds_to_end_frame(double seconds, double fps) {
  return static_cast<long long>(std::ceil(seconds * fps - kFrameSnapTolerance));
}

inline std::vector<AlignmentRecord> read_alignment_records(std::istream& in) {
  std::vector<AlignmentRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;

    std::string_view word_part, start_part, end_part;
    if (text.find('\t') != std::string_view::npos) {
      auto fields = detail::split(text, '\t');
      if (fields.size() != 3) {
        throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no));
      }
      word_part = fields[0];
      start_part = fields[1];
      end_part = fields[2];
    } else {
      // Comma form: the last two fields are times, the rest is the word
      // (which may itself carry punctuation such as "Hi,").
      auto last = text.rfind(',');
      if (last == std::string_view::npos || last == 0) {
        throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no));
      }
      auto second = text.rfind(',', last - 1);
      if (second == std::string_view::npos) {
        throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no));
      }
      word_part = text.substr(0, second);
      start_part = text.substr(second + 1, last - second - 1);
      end_part = text.substr(last + 1);
    }
    auto start = detail::parse_double(start_part);
    auto end = detail::parse_double(end_part);
    if (!start || !end || !std::isfinite(*start) || !std::isfinite(*end) || *start < 0.0 || *end < 0.0) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no));
    }
    if (*end < *start) {
      throw Error(ErrorCode::NegativeDuration, "line " + std::to_string(line_no));
    }
    out.push_back({std::string(detail::trim(word_part)), *start, *end});
  }
  return out;
}

inline std::vector<WordOccurrence> alignments_to_occurrences(const std::vector<AlignmentRecord>& records,
                                                             double fps, long long total_frames) {
  if (!(fps > 0.0)) throw Error(ErrorCode::InvalidArgument, "fps must be > 0");
  if (total_frames < 1) throw Error(ErrorCode::InvalidArgument, "total_frames must be >= 1");
  std::vector<WordOccurrence> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto token = normalize_token(r.word);
    if (token.empty()) {
      throw Error(ErrorCode::MalformedRecord, "record " + std::to_string(i + 1) + ": empty token");
    }
    const long long last = total_frames - 1;
    long long s = std::clamp(seconds_to_start_frame(r.start_seconds, fps), 0LL, last);
    long long n = std::clamp(seconds_to_end_frame(r.end_seconds, fps), 0LL, last);
    if (n < s) n = s;  // zero-length word inside one frame
    out.push_back({std::move(token), s, n});
  }
  return out;
}

inline std::vector<WordOccurrence> parse_alignments(std::istream& in, double fps, long long total_frames) {
  return alignments_to_occurrences(read_alignment_records(in), fps, total_frames);
}

inline std::vector<WordOccurrence> parse_alignments(const std::filesystem::path& path, double fps,
                                                    long long total_frames) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return parse_alignments(in, fps, total_frames);
}

inline void write_alignments(const std::vector<AlignmentRecord>& records, std::ostream& out) {
  for (const auto& r : records) {
    out << r.word << '\t' << detail::format_fixed(r.start_seconds, 6) << '\t'
        << detail::format_fixed(r.end_seconds, 6) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Dataset manifests (one JSON object per line)

struct ManifestEntry {
  std::string person_id;
  std::string video_id;
  Label label = Label::Real;
  Scenario scenario = Scenario::Real;
  std::filesystem::path feature_path;
  std::filesystem::path alignment_path;
  double duration_hours = 0.0;
  double fps = 30.0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  // person -> scenario -> hours
  std::map<std::string, std::map<Scenario, double>> hours_by_person() const {
    std::map<std::string, std::map<Scenario, double>> out;
    for (const auto& e : entries) out[e.person_id][e.scenario] += e.duration_hours;
    return out;
  }

  std::vector<std::string> persons() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
      if (std::find(out.begin(), out.end(), e.person_id) == out.end()) out.push_back(e.person_id);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  DatasetManifest for_person(const std::string& person) const {
    DatasetManifest out;
    for (const auto& e : entries) {
      if (e.person_id == person) out.entries.push_back(e);
    }
    return out;
  }
};

inline ManifestEntry manifest_entry_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                              bool check_files) {
  ManifestEntry e;
  try {
    e.person_id = j.at("person_id").get<std::string>();
    e.video_id = j.at("video_id").get<std::string>();
    e.label = parse_label(j.at("label").get<std::string>());
    e.scenario = parse_scenario(j.at("scenario").get<std::string>());
    e.feature_path = j.at("feature_path").get<std::string>();
    e.alignment_path = j.at("alignment_path").get<std::string>();
    e.duration_hours = j.at("duration_hours").get<double>();
    if (j.contains("fps")) e.fps = j.at("fps").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedRecord, ex.what());
  }
  if (!(e.duration_hours > 0.0)) throw Error(ErrorCode::MalformedRecord, e.video_id + ": duration_hours must be > 0");
  if (!(e.fps > 0.0)) throw Error(ErrorCode::MalformedRecord, e.video_id + ": fps must be > 0");
  if ((e.scenario == Scenario::Real) != (e.label == Label::Real)) {
    throw Error(ErrorCode::MalformedRecord, e.video_id + ": label does not match scenario");
  }
  if (e.feature_path.is_relative()) e.feature_path = base_dir / e.feature_path;
  if (e.alignment_path.is_relative()) e.alignment_path = base_dir / e.alignment_path;
  e.feature_path = e.feature_path.lexically_normal();
  e.alignment_path = e.alignment_path.lexically_normal();
  if (check_files) {
    for (const auto& p : {e.feature_path, e.alignment_path}) {
      if (!std::filesystem::exists(p)) throw Error(ErrorCode::MissingFile, p.string());
    }
  }
  return e;
}

inline DatasetManifest load_manifest(std::istream& in, const std::filesystem::path& base_dir,
                                     bool check_files = true) {
  DatasetManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::MalformedRecord, "manifest line " + std::to_string(line_no));
    }
    manifest.entries.push_back(manifest_entry_from_json(j, base_dir, check_files));
  }
  return manifest;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return load_manifest(in, path.parent_path());
}

inline nlohmann::json entry_to_json(const ManifestEntry& e, const std::filesystem::path& base_dir) {
  auto rel = [&](const std::filesystem::path& p) {
    if (base_dir.empty()) return p.generic_string();
    auto r = p.lexically_relative(base_dir);
    return (r.empty() ? p : r).generic_string();
  };
  return {{"person_id", e.person_id},
          {"video_id", e.video_id},
          {"label", std::string(to_string(e.label))},
          {"scenario", std::string(to_string(e.scenario))},
          {"feature_path", rel(e.feature_path)},
          {"alignment_path", rel(e.alignment_path)},
          {"duration_hours", e.duration_hours},
          {"fps", e.fps}};
}

// Paths are written relative to the manifest's directory.
inline void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  const auto base = path.parent_path();
  for (const auto& e : manifest.entries) out << entry_to_json(e, base).dump() << '\n';
}

}  // namespace wordmotion
