#pragma once

// Tab-separated result tables (rows persons or variants, columns scenarios)
// and their JSON summaries. Every table starts with a "# config <hash>"
// line. Numbers use fixed decimals so reruns compare byte for byte.

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordmotion/core.hpp"
#include "wordmotion/detail/text.hpp"
#include "wordmotion/experiment.hpp"
#include "wordmotion/scoring.hpp"

namespace wordmotion {

namespace detail {

inline std::string cell(const std::optional<double>& v) { return v ? format_fixed(*v, 4) : "-"; }

// Fake scenarios that appear anywhere in the results, in declaration order.
inline std::vector<Scenario> fake_columns(const std::vector<std::map<Scenario, double>>& rows) {
  std::set<Scenario> seen;
  for (const auto& r : rows) {
    for (const auto& [s, v] : r) seen.insert(s);
  }
  std::vector<Scenario> out;
  for (auto s : kAllScenarios) {
    if (s != Scenario::Real && seen.count(s)) out.push_back(s);
  }
  return out;
}

inline std::map<Scenario, double> defined_aucs(const ExperimentResult& r) {
  std::map<Scenario, double> out;
  for (const auto& [s, m] : r.scenarios) {
    if (m.auc) out[s] = *m.auc;
  }
  return out;
}

inline std::optional<double> lookup(const std::map<Scenario, double>& m, Scenario s) {
  auto it = m.find(s);
  return it == m.end() ? std::nullopt : std::optional<double>(it->second);
}

inline nlohmann::json auc_object(const std::map<Scenario, double>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [s, v] : m) j[std::string(to_string(s))] = v;
  return j;
}

}  // namespace detail

inline void write_training_table(const std::vector<PersonTraining>& runs, const std::string& hash, std::ostream& out) {
  out << "# config " << hash << '\n';
  out << "person\tmode\ttraining_hours\tthreshold\tunits_seen\tunits_trained\tn_real\tn_fake\n";
  for (const auto& t : runs) {
    const auto& m = t.bank.metadata;
    out << t.bank.person_id << '\t' << to_string(t.bank.mode) << '\t' << detail::format_fixed(m.training_hours, 4)
        << '\t' << m.frequency_threshold << '\t' << m.units_seen << '\t' << t.bank.size() << '\t' << t.n_real_examples
        << '\t' << t.n_fake_examples << '\n';
  }
}

inline void write_results_table(const std::vector<ExperimentResult>& results, const std::string& hash,
                                std::ostream& out) {
  std::vector<std::map<Scenario, double>> rows;
  for (const auto& r : results) rows.push_back(detail::defined_aucs(r));
  const auto cols = detail::fake_columns(rows);
  out << "# config " << hash << '\n';
  out << "person\tmode";
  for (auto s : cols) out << '\t' << to_string(s);
  out << "\tunits_in_bank\tunits_tested\tclips\tabstained\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::size_t clips = 0, abstained = 0;
    for (const auto& [s, m] : r.scenarios) {
      clips += m.n_clips;
      abstained += m.n_abstained;
    }
    out << r.person_id << '\t' << to_string(r.mode);
    for (auto s : cols) out << '\t' << detail::cell(detail::lookup(rows[i], s));
    out << '\t' << r.units_in_bank << '\t' << r.units_tested << '\t' << clips << '\t' << abstained << '\n';
  }
  const auto mean = mean_auc(results);
  out << "mean\t" << (results.empty() ? std::string("-") : to_string(results.front().mode));
  for (auto s : cols) out << '\t' << detail::cell(detail::lookup(mean, s));
  out << "\t-\t-\t-\t-\n";
}

inline nlohmann::json results_summary(const std::vector<ExperimentResult>& results, const std::string& hash) {
  nlohmann::json persons = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json sc = nlohmann::json::object();
    for (const auto& [s, m] : r.scenarios) {
      sc[std::string(to_string(s))] = {{"auc", m.auc ? nlohmann::json(*m.auc) : nlohmann::json(nullptr)},
                                       {"clips", m.n_clips},
                                       {"abstained", m.n_abstained},
                                       {"abstention_rate", m.abstention_rate()}};
    }
    persons.push_back({{"person", r.person_id},
                       {"bank_person", r.bank_person_id},
                       {"mode", to_string(r.mode)},
                       {"units_in_bank", r.units_in_bank},
                       {"units_tested", r.units_tested},
                       {"scenarios", sc}});
  }
  return {{"config_hash", hash}, {"persons", persons}, {"mean_auc", detail::auc_object(mean_auc(results))}};
}

inline void write_clip_records(const std::vector<ExperimentResult>& results, std::ostream& out) {
  for (const auto& r : results) {
    for (const auto& c : r.clips) {
      nlohmann::json j = {{"person", c.person_id},
                          {"video", c.video_id},
                          {"scenario", to_string(c.scenario)},
                          {"label", to_string(c.label)},
                          {"start_s", c.start_seconds},
                          {"score", c.score ? nlohmann::json(*c.score) : nlohmann::json("abstain")},
                          {"n_scored", c.n_scored},
                          {"n_discarded", c.n_discarded}};
      out << j.dump() << '\n';
    }
  }
}

inline void write_ablation_table(const std::vector<AblationRow>& rows, const std::string& hash, std::ostream& out) {
  std::vector<std::map<Scenario, double>> aucs;
  for (const auto& r : rows) aucs.push_back(r.mean_auc);
  const auto cols = detail::fake_columns(aucs);
  out << "# config " << hash << '\n';
  out << "variant";
  for (auto s : cols) out << '\t' << to_string(s);
  out << '\n';
  for (const auto& r : rows) {
    out << r.variant;
    for (auto s : cols) out << '\t' << detail::cell(detail::lookup(r.mean_auc, s));
    out << '\n';
  }
}

inline nlohmann::json ablation_summary(const std::vector<AblationRow>& rows, const std::string& hash) {
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& r : rows) variants.push_back({{"variant", r.variant}, {"mean_auc", detail::auc_object(r.mean_auc)}});
  return {{"config_hash", hash}, {"variants", variants}};
}

inline void write_transfer_table(const std::vector<TransferResult>& rows, const std::string& hash, std::ostream& out) {
  std::vector<std::map<Scenario, double>> aucs;
  for (const auto& r : rows) {
    aucs.push_back(r.mean_auc);
    aucs.push_back(r.self_auc);
  }
  const auto cols = detail::fake_columns(aucs);
  out << "# config " << hash << '\n';
  out << "person";
  for (auto s : cols) out << '\t' << to_string(s) << "\tself_" << to_string(s);
  out << "\tabstain_dominated\n";
  for (const auto& r : rows) {
    out << r.person_id;
    for (auto s : cols) {
      out << '\t' << detail::cell(detail::lookup(r.mean_auc, s)) << '\t' << detail::cell(detail::lookup(r.self_auc, s));
    }
    out << '\t' << (r.abstain_dominated ? "yes" : "no") << '\n';
  }
}

inline nlohmann::json transfer_summary(const std::vector<TransferResult>& rows, const std::string& hash) {
  nlohmann::json persons = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json trainers = nlohmann::json::object();
    for (const auto& [q, res] : r.by_trainer) trainers[q] = detail::auc_object(detail::defined_aucs(res));
    persons.push_back({{"person", r.person_id},
                       {"transfer_auc", detail::auc_object(r.mean_auc)},
                       {"self_auc", detail::auc_object(r.self_auc)},
                       {"by_trainer", trainers},
                       {"abstain_dominated", r.abstain_dominated}});
  }
  return {{"config_hash", hash}, {"persons", persons}};
}

inline void write_sweep_table(const std::vector<SweepPoint>& points, const std::string& hash, std::ostream& out) {
  std::vector<std::map<Scenario, double>> aucs;
  for (const auto& p : points) aucs.push_back(p.auc);
  const auto cols = detail::fake_columns(aucs);
  out << "# config " << hash << '\n';
  out << "person\trequested_hours\ttraining_hours";
  for (auto s : cols) out << '\t' << to_string(s);
  out << '\n';
  for (const auto& p : points) {
    out << p.person_id << '\t' << detail::format_fixed(p.requested_hours, 4) << '\t'
        << detail::format_fixed(p.training_hours, 4);
    for (auto s : cols) out << '\t' << detail::cell(detail::lookup(p.auc, s));
    out << '\n';
  }
  for (const auto& [h, m] : sweep_curve(points)) {
    out << "mean\t" << detail::format_fixed(h, 4) << "\t-";
    for (auto s : cols) out << '\t' << detail::cell(detail::lookup(m, s));
    out << '\n';
  }
}

inline nlohmann::json sweep_summary(const std::vector<SweepPoint>& points, const std::string& hash) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& [h, m] : sweep_curve(points)) curve.push_back({{"hours", h}, {"mean_auc", detail::auc_object(m)}});
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"person", p.person_id},
                   {"requested_hours", p.requested_hours},
                   {"training_hours", p.training_hours},
                   {"auc", detail::auc_object(p.auc)}});
  }
  return {{"config_hash", hash}, {"curve", curve}, {"points", pts}};
}

// One record per clip, then one for the whole video.
inline void write_score_records(const std::string& person, const std::string& video,
                                const std::vector<ClipScore>& clips, const std::optional<double>& video_score,
                                double fps, std::ostream& out) {
  for (const auto& c : clips) {
    nlohmann::json j = {{"person", person},
                        {"video", video},
                        {"start_s", c.clip.start_seconds(fps)},
                        {"score", c.score ? nlohmann::json(*c.score) : nlohmann::json("abstain")},
                        {"n_scored", c.n_scored_units},
                        {"n_discarded", c.n_discarded_units}};
    out << j.dump() << '\n';
  }
  nlohmann::json v = {{"person", person},
                      {"video", video},
                      {"scope", "video"},
                      {"score", video_score ? nlohmann::json(*video_score) : nlohmann::json("abstain")}};
  out << v.dump() << '\n';
}

}  // namespace wordmotion
