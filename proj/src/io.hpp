#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sim.hpp"

namespace optscale::io {

// Major.minor carried by every JSON report; readers reject unknown majors.
inline constexpr int kSchemaMajor = 1;
inline constexpr int kSchemaMinor = 0;
inline const std::string kSchemaVersion = "1.0";

// Throws Error(data) when a schema_version string has an unknown major.
void check_schema_version(const std::string& version);

// Score log: JSONL, one object per line with the ScoreLogEntry fields
// (question_id, sample_index, step_scores, tokens, answer_key, correct).
// Unknown fields are ignored. Question order follows first appearance;
// records per question are sorted by sample_index.
struct ScoreLog {
  std::vector<std::string> question_order;
  std::map<std::string, std::vector<controller::SampleRecord>> by_question;
};

ScoreLog read_score_log(const std::string& path,
                        planner::AggregationMode aggregation);

void write_score_log(const std::string& path,
                     const std::vector<controller::SampleRecord>& records);

// One-sample Kolmogorov-Smirnov distance between data and a truncated-normal
// CDF.
double ks_statistic(std::vector<double> data, const dist::TruncNormParams& p);

struct FitReport {
  std::string question_id;
  double mu_hat = 0.0;
  double sigma_hat = 0.0;
  double ks = 0.0;
  std::uint32_t n_scores = 0;
};

enum class FitMode { mle, map };

// Per-question fit over a score log. Questions with zero scores are skipped
// (their ids returned in skipped).
struct FitRun {
  std::vector<FitReport> reports;
  std::vector<std::string> skipped;
};

FitRun fit_log(const ScoreLog& log, FitMode mode,
               const estimate::PriorBelief& prior);

std::string fit_reports_to_jsonl(const std::vector<FitReport>& reports);
std::string fit_reports_to_csv(const std::vector<FitReport>& reports);

// Simulation campaign: the cross product of configured strategies and n
// caps, reported as CSV + JSON summary + SVG frontier chart.
struct SimulateConfig {
  std::uint64_t seed = 42;
  sim::GenerationConfig generation{};
  sim::SuiteMeta suite_meta{};
  std::uint32_t n_questions = 100;
  std::vector<std::string> strategies;  // fixed_bon | self_consistency | optscale0 | optscale_t
  std::vector<std::uint32_t> n_caps;
  planner::StoppingPolicy policy{};     // n_max overridden by each cap
  bool has_prior = false;
  estimate::PriorBelief prior{};
  std::uint32_t score_log_samples = 0;  // when > 0, also write scorelog.jsonl
};

SimulateConfig parse_simulate_config(const std::string& json_text);
SimulateConfig load_simulate_config(const std::string& path);

struct SimulateRow {
  std::string strategy;
  std::uint32_t n_cap = 0;
  sim::StrategyReport report;
};

std::vector<SimulateRow> run_campaign(const SimulateConfig& config,
                                      const std::vector<sim::QuestionSpec>& suite);

// Writes report.csv, summary.json, chart.svg (and scorelog.jsonl when
// configured) into out_dir. Byte-identical across reruns with the same
// config and seed.
void write_simulation_outputs(const SimulateConfig& config,
                              const std::string& out_dir);

// Offline counterfactual: how many samples the controller would have used on
// a recorded log, consuming samples in recorded order.
struct ReplayQuestion {
  std::string question_id;
  std::uint32_t n_used = 0;
  std::uint64_t tokens_used = 0;
  std::string selected_at_stop;
  std::string selected_full;
  bool agreement = false;
  bool truncated = false;  // log ended before the plan was satisfied
  std::string stop_reason;
};

struct ReplayReport {
  std::vector<ReplayQuestion> per_question;
  std::uint64_t tokens_used = 0;
  std::uint64_t tokens_full = 0;
  double token_reduction = 0.0;   // 1 - tokens_used / tokens_full
  double agreement_rate = 0.0;
};

ReplayReport replay_log(const ScoreLog& log,
                        const planner::StoppingPolicy& policy, FitMode mode,
                        const estimate::PriorBelief& prior);

std::string replay_to_csv(const ReplayReport& report);
std::string replay_summary_json(const ReplayReport& report,
                                std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Minimal SVG 1.1 line chart: accuracy (y) vs total tokens (x), one
// polyline per strategy.
std::string frontier_svg(const std::vector<SimulateRow>& rows);

}  // namespace optscale::io
