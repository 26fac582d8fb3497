#pragma once

// Shared vocabulary types for the word-conditioned facial-motion library:
// gesture dimensionality, component names, error codes, conditioning modes,
// scenario/label taxonomy and token normalization.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wordmotion {

inline constexpr std::size_t kActionUnits = 17;
inline constexpr std::size_t kGestureDims = 25;

// Component layout: 17 AU intensities, head rotation XYZ, head translation
// XYZ, lip_hor, lip_ver.
inline constexpr std::size_t kRotationOffset = 17;
inline constexpr std::size_t kTranslationOffset = 20;
inline constexpr std::size_t kLipHorIndex = 23;
inline constexpr std::size_t kLipVerIndex = 24;

using Gesture = std::array<double, kGestureDims>;

inline constexpr std::array<std::string_view, kActionUnits> kActionUnitColumns = {
    "AU01_r", "AU02_r", "AU04_r", "AU05_r", "AU06_r", "AU07_r",
    "AU09_r", "AU10_r", "AU12_r", "AU14_r", "AU15_r", "AU17_r",
    "AU20_r", "AU23_r", "AU25_r", "AU26_r", "AU45_r"};

inline constexpr std::array<std::string_view, kGestureDims> kComponentNames = {
    "AU01_r", "AU02_r", "AU04_r", "AU05_r", "AU06_r", "AU07_r", "AU09_r",
    "AU10_r", "AU12_r", "AU14_r", "AU15_r", "AU17_r", "AU20_r", "AU23_r",
    "AU25_r", "AU26_r", "AU45_r", "pose_Rx", "pose_Ry", "pose_Rz", "pose_Tx",
    "pose_Ty", "pose_Tz", "lip_hor", "lip_ver"};

enum class ErrorCode {
  // ingest
  MissingColumn,
  NonMonotonicFrames,
  EmptyFile,
  NonFiniteCoordinate,
  MalformedRecord,
  NegativeDuration,
  UnknownScenario,
  MissingFile,
  // features
  SpanOutOfRange,
  EmptyLexicon,
  InvalidLexicon,
  // classifier
  SingleClassData,
  NonFiniteInput,
  EmptyBank,
  VersionMismatch,
  CorruptModel,
  // scoring
  EmptySequence,
  ModeMismatch,
  // evaluation
  EmptyClass,
  InsufficientVideos,
  // synth
  LengthMismatch,
  // generic
  InvalidArgument,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonMonotonicFrames: return "NonMonotonicFrames";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::NegativeDuration: return "NegativeDuration";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SpanOutOfRange: return "SpanOutOfRange";
    case ErrorCode::EmptyLexicon: return "EmptyLexicon";
    case ErrorCode::InvalidLexicon: return "InvalidLexicon";
    case ErrorCode::SingleClassData: return "SingleClassData";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyBank: return "EmptyBank";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InsufficientVideos: return "InsufficientVideos";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Usage/config problems map to exit code 1, everything data- or model-related to 2.
inline bool is_usage_error(ErrorCode code) {
  return code == ErrorCode::InvalidArgument;
}

// ---------------------------------------------------------------------------
// Conditioning mode

struct ConditioningMode {
  enum class Kind { Word, Phoneme, FixedWindow, WordWindow };

  Kind kind = Kind::Word;
  int window_len = 30;  // frames; meaningful for FixedWindow only

  static ConditioningMode word() { return {Kind::Word, 30}; }
  static ConditioningMode phoneme() { return {Kind::Phoneme, 30}; }
  static ConditioningMode word_window() { return {Kind::WordWindow, 30}; }
  static ConditioningMode fixed_window(int frames = 30) {
    if (frames < 1) throw Error(ErrorCode::InvalidArgument, "fixed window length must be >= 1");
    return {Kind::FixedWindow, frames};
  }

  bool uses_alignment() const { return kind != Kind::FixedWindow; }

  friend bool operator==(const ConditioningMode& a, const ConditioningMode& b) {
    if (a.kind != b.kind) return false;
    return a.kind != Kind::FixedWindow || a.window_len == b.window_len;
  }
};

inline std::string to_string(const ConditioningMode& mode) {
  switch (mode.kind) {
    case ConditioningMode::Kind::Word: return "word";
    case ConditioningMode::Kind::Phoneme: return "phoneme";
    case ConditioningMode::Kind::WordWindow: return "word-window";
    case ConditioningMode::Kind::FixedWindow: return "fixed-window";
  }
  return "word";
}

inline ConditioningMode parse_mode(std::string_view text, int window_len = 30) {
  if (text == "word") return ConditioningMode::word();
  if (text == "phoneme") return ConditioningMode::phoneme();
  if (text == "word-window" || text == "word_window") return ConditioningMode::word_window();
  if (text == "fixed-window" || text == "fixed_window") return ConditioningMode::fixed_window(window_len);
  throw Error(ErrorCode::InvalidArgument, "unknown conditioning mode '" + std::string(text) + "'");
}

// Sentinel tokens for the pooled ablation variants.
inline constexpr std::string_view kWindowToken = "_window_";
inline constexpr std::string_view kPooledWordToken = "_word_window_";

// ---------------------------------------------------------------------------
// Scenario / label taxonomy

enum class Label { Real, Fake };

enum class Scenario { Real, Dubbing, Lipsync, Impersonator, FaceSwap, Synthetic };

inline constexpr std::array<Scenario, 6> kAllScenarios = {
    Scenario::Real, Scenario::Dubbing, Scenario::Lipsync,
    Scenario::Impersonator, Scenario::FaceSwap, Scenario::Synthetic};

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Real: return "real";
    case Scenario::Dubbing: return "dubbing";
    case Scenario::Lipsync: return "lipsync";
    case Scenario::Impersonator: return "impersonator";
    case Scenario::FaceSwap: return "faceswap";
    case Scenario::Synthetic: return "synthetic";
  }
  return "real";
}

inline Scenario parse_scenario(std::string_view text) {
  for (auto s : kAllScenarios) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::UnknownScenario, std::string(text));
}

inline std::string_view to_string(Label l) { return l == Label::Real ? "real" : "fake"; }

inline Label parse_label(std::string_view text) {
  if (text == "real") return Label::Real;
  if (text == "fake") return Label::Fake;
  throw Error(ErrorCode::MalformedRecord, "unknown label '" + std::string(text) + "'");
}

// Scenarios whose videos participate in training (the rest are test-only).
inline bool is_trainable_scenario(Scenario s) {
  return s == Scenario::Real || s == Scenario::Dubbing || s == Scenario::Lipsync;
}

// ---------------------------------------------------------------------------
// Token normalization: ASCII lowercase, strip leading/trailing characters
// that are not alphanumeric. Bytes >= 0x80 (UTF-8 multibyte sequences) count
// as word characters and are kept verbatim.

inline std::string normalize_token(std::string_view raw) {
  auto is_word_byte = [](unsigned char c) {
    return c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  };
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && !is_word_byte(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && !is_word_byte(static_cast<unsigned char>(raw[end - 1]))) --end;
  std::string out(raw.substr(begin, end - begin));
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace wordmotion
