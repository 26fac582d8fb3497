#pragma once

// wordmotion command-line front end. run_cli() is kept separate from main()
// so tests can drive it in-process.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wordmotion/config.hpp"
#include "wordmotion/experiment.hpp"
#include "wordmotion/ingest.hpp"
#include "wordmotion/log.hpp"
#include "wordmotion/model_bank.hpp"
#include "wordmotion/report.hpp"
#include "wordmotion/scoring.hpp"
#include "wordmotion/synth.hpp"
#include "wordmotion/tables.hpp"

namespace wordmotion::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct Flags {
  std::string config, manifest, bank, mode, out, lexicon, features, alignments, person, hours_grid, signature_level;
  std::uint64_t seed = 1;
  int padding = kDefaultPadding;
  int window_frames = 30;
  double clip_seconds = kDefaultClipSeconds;
  double shift_seconds = kDefaultShiftSeconds;
  double fps = 30.0;
  std::size_t top_k = 5;
  std::size_t personas = 2;
  double hours = 1.0;
  double amplitude_ratio = 4.0;
  bool impersonators = false;
  bool force = false;
  bool verbose = false;
};

// Owns an output directory for the lifetime of a command.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".wordmotion.lock") {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(path_.string().c_str(), "wx");
    if (!f) throw Error(ErrorCode::Io, "output directory is in use (lock file " + path_.string() + ")");
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
};

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return out;
}

inline void write_json(const nlohmann::json& j, const fs::path& p) {
  auto out = open_out(p);
  out << j.dump(2) << '\n';
}

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  for (auto part : wordmotion::detail::split(text, ',')) {
    auto v = wordmotion::detail::parse_double(wordmotion::detail::trim(part));
    if (!v) throw Error(ErrorCode::InvalidArgument, "bad --hours-grid value '" + std::string(part) + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "--hours-grid is empty");
  return out;
}

inline void require(const fs::path& p, const char* flag) {
  if (p.empty()) throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
}

}  // namespace detail

struct Context {
  RunConfig cfg;
  Flags flags;
  std::ostream& out;
  std::ostream& err;
};

// A phoneme run without an explicit lexicon uses lexicon.dict next to the
// manifest when there is one (synthetic corpora ship it there).
inline void resolve_lexicon(RunConfig& cfg) {
  if (!cfg.lexicon.empty() || cfg.conditioning().kind != ConditioningMode::Kind::Phoneme) return;
  if (cfg.manifest.empty()) return;
  auto candidate = cfg.manifest.parent_path() / "lexicon.dict";
  if (fs::exists(candidate)) cfg.lexicon = candidate;
}

inline void echo_config(const RunConfig& cfg, const fs::path& dir) {
  auto j = to_json(cfg);
  j["config_hash"] = config_hash(cfg);
  detail::write_json(j, dir / "config.json");
}

inline int cmd_synth(Context& ctx) {
  auto& cfg = ctx.cfg;
  detail::require(cfg.out, "--out");
  if (fs::exists(cfg.out) && !fs::is_empty(cfg.out) && !ctx.flags.force) {
    throw Error(ErrorCode::InvalidArgument, cfg.out.string() + " is not empty; pass --force to write into it");
  }
  OutputLock lock(cfg.out);
  auto synth = cfg.synth;
  synth.seed = cfg.seed;
  auto corpus = generate_corpus(synth, cfg.out);
  echo_config(cfg, cfg.out);
  ctx.out << "wrote " << corpus.manifest.entries.size() << " entries for " << corpus.personas.size()
          << " personas to " << corpus.manifest_path.string() << '\n';
  return kExitOk;
}

inline std::vector<std::string> selected_persons(const DatasetManifest& m, const Flags& flags) {
  if (flags.person.empty()) return m.persons();
  for (const auto& p : m.persons()) {
    if (p == flags.person) return {p};
  }
  throw Error(ErrorCode::InvalidArgument, "person '" + flags.person + "' is not in the manifest");
}

inline fs::path bank_path(const fs::path& dir, const std::string& person) { return dir / (person + ".bank.json"); }

inline int cmd_train(Context& ctx) {
  auto& cfg = ctx.cfg;
  detail::require(cfg.manifest, "--manifest");
  detail::require(cfg.out, "--out");
  const auto manifest = load_manifest(cfg.manifest);
  const auto ecfg = experiment_config(cfg);
  OutputLock lock(cfg.out);
  auto split = split_dataset(manifest, ecfg.split);
  CorpusCache cache;
  std::vector<PersonTraining> runs;
  for (const auto& person : selected_persons(manifest, ctx.flags)) {
    auto t = train_person(person, as_items(split.train.for_person(person).entries), ecfg, cache);
    save_bank(t.bank, bank_path(cfg.out, person));
    runs.push_back(std::move(t));
  }
  {
    auto table = detail::open_out(cfg.out / "training.tsv");
    write_training_table(runs, ecfg.config_hash, table);
  }
  nlohmann::json summary = {{"config_hash", ecfg.config_hash}, {"persons", nlohmann::json::array()}};
  for (const auto& t : runs) {
    summary["persons"].push_back({{"person", t.bank.person_id},
                                  {"bank", bank_path(cfg.out, t.bank.person_id).filename().string()},
                                  {"units_trained", t.bank.size()},
                                  {"units_seen", t.bank.metadata.units_seen},
                                  {"skipped_units", t.skipped_units},
                                  {"n_real", t.n_real_examples},
                                  {"n_fake", t.n_fake_examples}});
  }
  detail::write_json(summary, cfg.out / "summary.json");
  echo_config(cfg, cfg.out);
  write_training_table(runs, ecfg.config_hash, ctx.out);
  return kExitOk;
}

inline int cmd_score(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto& flags = ctx.flags;
  detail::require(cfg.bank, "--bank");
  detail::require(flags.features, "--features");
  const auto bank = load_bank(cfg.bank);
  if (!flags.mode.empty() && !(cfg.conditioning() == bank.mode)) {
    throw Error(ErrorCode::ModeMismatch, "bank " + cfg.bank.string() + " is " + to_string(bank.mode) +
                                             ", requested " + to_string(cfg.conditioning()));
  }
  const auto person = flags.person.empty() ? bank.person_id : flags.person;
  const auto series = parse_frame_features(fs::path(flags.features), flags.fps, person);
  std::vector<WordOccurrence> occurrences;
  if (bank.mode.uses_alignment()) {
    detail::require(flags.alignments, "--alignments");
    occurrences = parse_alignments(fs::path(flags.alignments), flags.fps, static_cast<long long>(series.size()));
  }
  std::shared_ptr<UnitLexicon> lexicon;
  if (!cfg.lexicon.empty()) lexicon = std::make_shared<UnitLexicon>(load_lexicon(cfg.lexicon));
  auto extraction = extract_units(series, occurrences, bank.mode, bank.metadata.padding, lexicon.get());
  const auto& features = extraction.batch.features;
  auto clips = score_clips(bank, series, features, cfg.clip_seconds, cfg.shift_seconds);
  auto video = score_video_features(bank, features);

  if (cfg.out.empty()) {
    write_score_records(person, series.video_id, clips, video, series.fps, ctx.out);
    return kExitOk;
  }
  OutputLock lock(cfg.out);
  {
    auto out = detail::open_out(cfg.out / "scores.jsonl");
    write_score_records(person, series.video_id, clips, video, series.fps, out);
  }
  {
    auto units = detail::open_out(cfg.out / "units.tsv");
    units << "token\tfirst_frame\tlast_frame\tscore\n";
    for (const auto& u : score_units(bank, features).scored) {
      units << u.token << '\t' << u.window_first << '\t' << u.window_last << '\t'
            << wordmotion::detail::format_fixed(u.score, 6) << '\n';
    }
  }
  echo_config(cfg, cfg.out);
  ctx.out << series.video_id << '\t'
          << (video ? wordmotion::detail::format_fixed(*video, 6) : std::string("abstain")) << '\n';
  return kExitOk;
}

inline int cmd_eval(Context& ctx) {
  auto& cfg = ctx.cfg;
  detail::require(cfg.manifest, "--manifest");
  detail::require(cfg.out, "--out");
  const auto manifest = load_manifest(cfg.manifest);
  const auto ecfg = experiment_config(cfg);
  OutputLock lock(cfg.out);
  CorpusCache cache;
  std::vector<ExperimentResult> results;
  auto split = split_dataset(manifest, ecfg.split);
  for (const auto& person : selected_persons(manifest, ctx.flags)) {
    ModelBank bank;
    if (!cfg.bank.empty()) {
      // --bank names a directory written by `train`.
      bank = load_bank(bank_path(cfg.bank, person));
      if (!(bank.mode == ecfg.mode)) {
        throw Error(ErrorCode::ModeMismatch, person + " bank is " + to_string(bank.mode) + ", config says " +
                                                 to_string(ecfg.mode));
      }
    } else {
      bank = train_person(person, as_items(split.train.for_person(person).entries), ecfg, cache).bank;
    }
    auto r = evaluate_bank(bank, split.test.for_person(person).entries, ecfg, cache);
    r.person_id = person;
    results.push_back(std::move(r));
  }
  {
    auto table = detail::open_out(cfg.out / "results.tsv");
    write_results_table(results, ecfg.config_hash, table);
  }
  {
    auto clips = detail::open_out(cfg.out / "clips.jsonl");
    write_clip_records(results, clips);
  }
  detail::write_json(results_summary(results, ecfg.config_hash), cfg.out / "summary.json");
  echo_config(cfg, cfg.out);
  write_results_table(results, ecfg.config_hash, ctx.out);
  return kExitOk;
}

inline int cmd_ablate(Context& ctx) {
  auto& cfg = ctx.cfg;
  detail::require(cfg.manifest, "--manifest");
  detail::require(cfg.out, "--out");
  const auto manifest = load_manifest(cfg.manifest);
  const auto ecfg = experiment_config(cfg);
  OutputLock lock(cfg.out);
  CorpusCache cache;
  auto rows = run_ablations(manifest, ecfg, cache, cfg.window_frames);
  {
    auto table = detail::open_out(cfg.out / "ablation.tsv");
    write_ablation_table(rows, ecfg.config_hash, table);
  }
  detail::write_json(ablation_summary(rows, ecfg.config_hash), cfg.out / "summary.json");
  echo_config(cfg, cfg.out);
  write_ablation_table(rows, ecfg.config_hash, ctx.out);
  return kExitOk;
}

inline int cmd_transfer(Context& ctx) {
  auto& cfg = ctx.cfg;
  detail::require(cfg.manifest, "--manifest");
  detail::require(cfg.out, "--out");
  const auto manifest = load_manifest(cfg.manifest);
  const auto ecfg = experiment_config(cfg);
  OutputLock lock(cfg.out);
  CorpusCache cache;
  auto rows = run_transfer(manifest, ecfg, cache);
  {
    auto table = detail::open_out(cfg.out / "transfer.tsv");
    write_transfer_table(rows, ecfg.config_hash, table);
  }
  detail::write_json(transfer_summary(rows, ecfg.config_hash), cfg.out / "summary.json");
  echo_config(cfg, cfg.out);
  write_transfer_table(rows, ecfg.config_hash, ctx.out);
  return kExitOk;
}

inline int cmd_sweep(Context& ctx) {
  auto& cfg = ctx.cfg;
  detail::require(cfg.manifest, "--manifest");
  detail::require(cfg.out, "--out");
  const auto manifest = load_manifest(cfg.manifest);
  const auto ecfg = experiment_config(cfg);
  OutputLock lock(cfg.out);
  CorpusCache cache;
  auto points = run_size_sweep(manifest, cfg.hours_grid, ecfg, cache);
  {
    auto table = detail::open_out(cfg.out / "sweep.tsv");
    write_sweep_table(points, ecfg.config_hash, table);
  }
  detail::write_json(sweep_summary(points, ecfg.config_hash), cfg.out / "summary.json");
  echo_config(cfg, cfg.out);
  write_sweep_table(points, ecfg.config_hash, ctx.out);
  return kExitOk;
}

inline int cmd_report(Context& ctx) {
  auto& cfg = ctx.cfg;
  detail::require(cfg.manifest, "--manifest");
  detail::require(cfg.out, "--out");
  const auto manifest = load_manifest(cfg.manifest);
  const auto ecfg = experiment_config(cfg);
  OutputLock lock(cfg.out);
  CorpusCache cache;
  nlohmann::json summary = {{"config_hash", ecfg.config_hash}, {"top_k", cfg.top_k}, {"persons", nlohmann::json::array()}};
  for (const auto& person : selected_persons(manifest, ctx.flags)) {
    auto r = run_report(manifest, person, ecfg, cache);
    write_report(r.report, cfg.out / person, cfg.top_k);
    nlohmann::json top = nlohmann::json::array();
    for (const auto& t : r.report.top(cfg.top_k)) top.push_back({{"token", t}, {"auc", *r.report.find(t)->auc}});
    summary["persons"].push_back({{"person", person}, {"top", top}, {"words_reported", r.report.words.size()}});
    ctx.out << person << ':';
    for (const auto& t : r.report.top(cfg.top_k)) ctx.out << ' ' << t;
    ctx.out << '\n';
  }
  detail::write_json(summary, cfg.out / "summary.json");
  echo_config(cfg, cfg.out);
  return kExitOk;
}

inline void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration; flags override it");
  sub->add_option("--manifest", f.manifest, "dataset manifest (JSONL)");
  sub->add_option("--bank", f.bank, "model bank file (score) or directory of banks (eval)");
  sub->add_option("--mode", f.mode, "word | phoneme | fixed-window | word-window");
  sub->add_option("--seed", f.seed, "seed for every random choice");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--padding-frames", f.padding, "frames of padding around each unit (default 3)");
  sub->add_option("--window-frames", f.window_frames, "fixed-window length in frames (default 30)");
  sub->add_option("--clip-seconds", f.clip_seconds, "clip length (default 10)");
  sub->add_option("--shift-seconds", f.shift_seconds, "clip shift (default 2)");
  sub->add_option("--lexicon", f.lexicon, "pronunciation dictionary for phoneme mode");
  sub->add_option("--person", f.person, "restrict to one person");
  sub->add_flag("--force", f.force, "write into a non-empty output directory");
  sub->add_flag("-v,--verbose", f.verbose, "log progress to stderr");
}

// Effective configuration: defaults, then --config, then explicit flags.
inline RunConfig merge_config(const CLI::App& sub, const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = load_run_config(f.config, cfg);
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--manifest")) cfg.manifest = f.manifest;
  if (given("--bank")) cfg.bank = f.bank;
  if (given("--mode")) cfg.mode = f.mode;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--out")) cfg.out = f.out;
  if (given("--padding-frames")) cfg.padding = f.padding;
  if (given("--window-frames")) cfg.window_frames = f.window_frames;
  if (given("--clip-seconds")) cfg.clip_seconds = f.clip_seconds;
  if (given("--shift-seconds")) cfg.shift_seconds = f.shift_seconds;
  if (given("--lexicon")) cfg.lexicon = f.lexicon;
  if (sub.get_name() == "synth") {
    if (given("--personas")) cfg.synth.personas = f.personas;
    if (given("--hours")) cfg.synth.hours_per_persona = f.hours;
    if (given("--amplitude-ratio")) cfg.synth.amplitude_ratio = f.amplitude_ratio;
    if (given("--impersonators")) cfg.synth.impersonators = f.impersonators;
    if (given("--signature-level")) cfg.synth.signature_level = parse_signature_level(f.signature_level);
  }
  if (sub.get_name() == "sweep" && given("--hours-grid")) cfg.hours_grid = detail::parse_grid(f.hours_grid);
  if (sub.get_name() == "report" && given("--top-k")) cfg.top_k = f.top_k;
  resolve_lexicon(cfg);
  cfg.validate();
  return cfg;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Word-conditioned facial-motion forensics"};
  app.require_subcommand(1);
  Flags f;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  auto* train = app.add_subcommand("train", "train per-person model banks");
  auto* score = app.add_subcommand("score", "score one video with a bank");
  auto* eval = app.add_subcommand("eval", "train and evaluate per scenario");
  auto* ablate = app.add_subcommand("ablate", "fixed-window / word-window / word comparison");
  auto* transfer = app.add_subcommand("transfer", "score each person with other persons' banks");
  auto* sweep = app.add_subcommand("sweep", "AUC as a function of training hours");
  auto* report = app.add_subcommand("report", "per-word rankings, histograms and timelines");
  for (auto* sub : {synth, train, score, eval, ablate, transfer, sweep, report}) add_common(sub, f);
  synth->add_option("--personas", f.personas, "number of personas");
  synth->add_option("--hours", f.hours, "real hours per persona");
  synth->add_option("--amplitude-ratio", f.amplitude_ratio, "signature amplitude over noise std");
  synth->add_option("--signature-level", f.signature_level, "word | phoneme");
  synth->add_flag("--impersonators", f.impersonators, "add impersonator entries");
  score->add_option("--features", f.features, "frame-feature CSV of the video");
  score->add_option("--alignments", f.alignments, "word alignments of the video");
  score->add_option("--fps", f.fps, "frame rate of the video (default 30)");
  sweep->add_option("--hours-grid", f.hours_grid, "comma-separated training hours");
  report->add_option("--top-k", f.top_k, "number of top words to detail");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (f.verbose) log::set_level(log::Level::Info);
  try {
    Context ctx{merge_config(*sub, f), f, out, err};
    const auto& name = sub->get_name();
    if (name == "synth") return cmd_synth(ctx);
    if (name == "train") return cmd_train(ctx);
    if (name == "score") return cmd_score(ctx);
    if (name == "eval") return cmd_eval(ctx);
    if (name == "ablate") return cmd_ablate(ctx);
    if (name == "transfer") return cmd_transfer(ctx);
    if (name == "sweep") return cmd_sweep(ctx);
    return cmd_report(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace wordmotion::cli
