#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace optscale::io {

using nlohmann::json;

namespace {

// Shortest round-trip decimal form, so reports are byte-identical across
// reruns.
std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

planner::AggregationMode parse_aggregation(const std::string& s) {
  if (s == "mean") return planner::AggregationMode::mean;
  if (s == "last") return planner::AggregationMode::last;
  if (s == "min") return planner::AggregationMode::min;
  fail(ErrorKind::param, "unknown aggregation mode: " + s);
}

sim::Range parse_range(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (j.is_array() && j.size() == 2) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(ErrorKind::data, std::string(what) + ": expected number or [lo, hi]");
}

}  // namespace

void check_schema_version(const std::string& version) {
  int major = -1;
  const auto dot = version.find('.');
  auto [ptr, ec] = std::from_chars(version.data(),
                                   version.data() + (dot == std::string::npos
                                                         ? version.size()
                                                         : dot),
                                   major);
  if (ec != std::errc{} || major != kSchemaMajor) {
    fail(ErrorKind::data, "unsupported schema_version: " + version);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorKind::io, "write failed for " + path);
}

ScoreLog read_score_log(const std::string& path,
                        planner::AggregationMode aggregation) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path);

  ScoreLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      fail(ErrorKind::data,
           path + ":" + std::to_string(line_no) + ": malformed JSON line");
    }
    try {
      controller::SampleRecord rec;
      rec.question_id = j.at("question_id").get<std::string>();
      rec.sample_index = j.at("sample_index").get<std::uint32_t>();
      rec.step_scores = j.at("step_scores").get<std::vector<double>>();
      rec.token_count = j.at("tokens").get<std::uint64_t>();
      rec.answer_key = j.at("answer_key").get<std::string>();
      if (j.contains("correct") && !j["correct"].is_null()) {
        rec.correct = j["correct"].get<bool>();
      }
      if (rec.token_count < 1) {
        fail(ErrorKind::data, "tokens must be >= 1");
      }
      rec.aggregate_score = controller::aggregate(rec.step_scores, aggregation);
      if (!log.by_question.contains(rec.question_id)) {
        log.question_order.push_back(rec.question_id);
      }
      log.by_question[rec.question_id].push_back(std::move(rec));
    } catch (const json::exception& e) {
      fail(ErrorKind::data,
           path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& [qid, records] : log.by_question) {
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) {
                return a.sample_index < b.sample_index;
              });
  }
  return log;
}

void write_score_log(const std::string& path,
                     const std::vector<controller::SampleRecord>& records) {
  std::ostringstream out;
  for (const auto& rec : records) {
    json j;
    j["question_id"] = rec.question_id;
    j["sample_index"] = rec.sample_index;
    j["step_scores"] = rec.step_scores;
    j["tokens"] = rec.token_count;
    j["answer_key"] = rec.answer_key;
    if (rec.correct) j["correct"] = *rec.correct;
    out << j.dump() << '\n';
  }
  write_text_file(path, out.str());
}

double ks_statistic(std::vector<double> data, const dist::TruncNormParams& p) {
  if (data.empty()) fail(ErrorKind::data, "ks_statistic: empty data");
  std::sort(data.begin(), data.end());
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = dist::truncnorm_cdf(data[i], p);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

FitRun fit_log(const ScoreLog& log, FitMode mode,
               const estimate::PriorBelief& prior) {
  FitRun run;
  for (const auto& qid : log.question_order) {
    const auto& records = log.by_question.at(qid);
    std::vector<double> scores;
    scores.reserve(records.size());
    for (const auto& r : records) scores.push_back(r.aggregate_score);
    if (scores.empty()) {
      run.skipped.push_back(qid);
      continue;
    }
    estimate::FitResult fit;
    if (mode == FitMode::mle) {
      fit = estimate::mle_fit(scores, estimate::moment_init(scores));
    } else {
      fit = estimate::map_fit(scores, prior);
    }
    FitReport rep;
    rep.question_id = qid;
    rep.mu_hat = fit.params.mu;
    rep.sigma_hat = fit.params.sigma;
    rep.ks = ks_statistic(scores, fit.params);
    rep.n_scores = static_cast<std::uint32_t>(scores.size());
    run.reports.push_back(std::move(rep));
  }
  return run;
}

std::string fit_reports_to_jsonl(const std::vector<FitReport>& reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["question_id"] = r.question_id;
    j["mu_hat"] = r.mu_hat;
    j["sigma_hat"] = r.sigma_hat;
    j["ks_statistic"] = r.ks;
    j["n_scores"] = r.n_scores;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string fit_reports_to_csv(const std::vector<FitReport>& reports) {
  std::ostringstream out;
  out << "question_id,mu_hat,sigma_hat,ks_statistic,n_scores\r\n";
  for (const auto& r : reports) {
    out << csv_escape(r.question_id) << ',' << fmt(r.mu_hat) << ','
        << fmt(r.sigma_hat) << ',' << fmt(r.ks) << ',' << r.n_scores << "\r\n";
  }
  return out.str();
}

SimulateConfig parse_simulate_config(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorKind::data, "simulate config: malformed JSON");
  }
  SimulateConfig cfg;
  try {
    if (j.contains("schema_version")) {
      check_schema_version(j["schema_version"].get<std::string>());
    }
    cfg.seed = j.value("seed", std::uint64_t{42});
    cfg.generation.seed = cfg.seed;
    if (j.contains("generation")) {
      const auto& g = j["generation"];
      cfg.generation.temperature = g.value("temperature", 0.7);
      cfg.generation.top_p = g.value("top_p", 0.95);
    }
    const auto& suite = j.at("suite");
    cfg.n_questions = suite.value("n_questions", 100u);
    if (suite.contains("mu")) cfg.suite_meta.mu = parse_range(suite["mu"], "mu");
    if (suite.contains("sigma")) {
      cfg.suite_meta.sigma = parse_range(suite["sigma"], "sigma");
    }
    if (suite.contains("correctness_midpoint")) {
      cfg.suite_meta.correctness_midpoint =
          parse_range(suite["correctness_midpoint"], "correctness_midpoint");
    }
    if (suite.contains("correctness_slope")) {
      cfg.suite_meta.correctness_slope =
          parse_range(suite["correctness_slope"], "correctness_slope");
    }
    cfg.suite_meta.distractor_count = suite.value("distractor_count", 4u);
    cfg.suite_meta.token_mean = suite.value("token_mean", 3000.0);
    cfg.suite_meta.token_dispersion = suite.value("token_dispersion", 0.5);

    cfg.strategies = j.at("strategies").get<std::vector<std::string>>();
    cfg.n_caps = j.at("n_caps").get<std::vector<std::uint32_t>>();
    if (j.contains("policy")) {
      const auto& p = j["policy"];
      cfg.policy.s_min = p.value("s_min", 0.95);
      cfg.policy.alpha = p.value("alpha", 0.9);
      cfg.policy.n_init = p.value("n_init", 0u);
      cfg.policy.batch_size = p.value("batch_size", 1u);
      cfg.policy.aggregation =
          parse_aggregation(p.value("aggregation", std::string("mean")));
    }
    if (j.contains("prior")) {
      const auto& p = j["prior"];
      cfg.has_prior = true;
      cfg.prior.mu_bar = p.at("mu_bar").get<double>();
      cfg.prior.sigma_bar = p.at("sigma_bar").get<double>();
      cfg.prior.sigma_mu = p.value("sigma_mu", estimate::kDefaultSigmaMu);
      cfg.prior.sigma_sigma =
          p.value("sigma_sigma", estimate::kDefaultSigmaSigma);
    }
    cfg.score_log_samples = j.value("score_log_samples", 0u);
  } catch (const json::exception& e) {
    fail(ErrorKind::data, std::string("simulate config: ") + e.what());
  }
  if (cfg.strategies.empty() || cfg.n_caps.empty()) {
    fail(ErrorKind::data, "simulate config: strategies and n_caps required");
  }
  return cfg;
}

SimulateConfig load_simulate_config(const std::string& path) {
  return parse_simulate_config(read_text_file(path));
}

namespace {

sim::Strategy make_strategy(const std::string& name, std::uint32_t cap,
                            const SimulateConfig& cfg) {
  sim::Strategy s;
  if (name == "fixed_bon") {
    s.kind = sim::StrategyKind::fixed_bon;
    s.n = cap;
  } else if (name == "self_consistency") {
    s.kind = sim::StrategyKind::self_consistency;
    s.n = cap;
  } else if (name == "optscale0" || name == "optscale_t") {
    s.kind = name == "optscale0" ? sim::StrategyKind::optscale0
                                 : sim::StrategyKind::optscale_t;
    s.policy = cfg.policy;
    s.policy.n_max = cap;
    if (s.policy.n_init > cap) s.policy.n_init = cap;
    if (s.kind == sim::StrategyKind::optscale_t) {
      if (!cfg.has_prior) {
        fail(ErrorKind::data, "optscale_t requires a prior in the config");
      }
      s.prior_source = controller::PriorSource::constant(cfg.prior);
    }
  } else {
    fail(ErrorKind::data, "unknown strategy: " + name);
  }
  return s;
}

}  // namespace

std::vector<SimulateRow> run_campaign(
    const SimulateConfig& config, const std::vector<sim::QuestionSpec>& suite) {
  std::vector<SimulateRow> rows;
  for (const auto& name : config.strategies) {
    for (std::uint32_t cap : config.n_caps) {
      SimulateRow row;
      row.strategy = name;
      row.n_cap = cap;
      row.report = sim::run_strategy(make_strategy(name, cap, config), suite,
                                     config.seed);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string frontier_svg(const std::vector<SimulateRow>& rows) {
  constexpr int kW = 720, kH = 480, kPad = 60;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};

  double tok_max = 1.0;
  for (const auto& r : rows) {
    tok_max = std::max(tok_max, static_cast<double>(r.report.total_tokens));
  }

  auto x_of = [&](double tokens) {
    return kPad + (kW - 2 * kPad) * tokens / tok_max;
  };
  auto y_of = [&](double acc) { return kH - kPad - (kH - 2 * kPad) * acc; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      << "width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW
      << ' ' << kH << "\">\n"
      << "  <rect width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n"
      << "  <line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\""
      << kW - kPad << "\" y2=\"" << kH - kPad
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "  <line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
      << "\" y2=\"" << kH - kPad
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "  <text x=\"" << kW / 2 << "\" y=\"" << kH - kPad / 3
      << "\" text-anchor=\"middle\" font-size=\"13\">total tokens (max "
      << fmt(tok_max) << ")</text>\n"
      << "  <text x=\"15\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 "
         "15 "
      << kH / 2 << ")\">accuracy</text>\n";

  // one polyline per distinct strategy, points in n_cap order
  std::vector<std::string> names;
  for (const auto& r : rows) {
    if (std::find(names.begin(), names.end(), r.strategy) == names.end()) {
      names.push_back(r.strategy);
    }
  }
  for (std::size_t s = 0; s < names.size(); ++s) {
    std::ostringstream pts;
    for (const auto& r : rows) {
      if (r.strategy != names[s]) continue;
      pts << fmt(x_of(static_cast<double>(r.report.total_tokens))) << ','
          << fmt(y_of(r.report.accuracy)) << ' ';
    }
    const char* color = kColors[s % (sizeof kColors / sizeof *kColors)];
    svg << "  <polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n"
        << "  <text x=\"" << kW - kPad + 5 << "\" y=\"" << kPad + 16 * s
        << "\" font-size=\"11\" fill=\"" << color << "\">" << names[s]
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_simulation_outputs(const SimulateConfig& config,
                              const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory " + out_dir);

  const auto suite =
      sim::generate_suite(config.suite_meta, config.n_questions, config.seed);
  const auto rows = run_campaign(config, suite);

  std::ostringstream csv;
  csv << "strategy,n_cap,accuracy,total_tokens,mean_samples\r\n";
  for (const auto& r : rows) {
    csv << csv_escape(r.strategy) << ',' << r.n_cap << ','
        << fmt(r.report.accuracy) << ',' << r.report.total_tokens << ','
        << fmt(r.report.mean_samples) << "\r\n";
  }
  write_text_file(out_dir + "/report.csv", csv.str());

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["seed"] = config.seed;
  summary["generation"] = {{"temperature", config.generation.temperature},
                           {"top_p", config.generation.top_p},
                           {"seed", config.generation.seed}};
  summary["n_questions"] = config.n_questions;
  json jrows = json::array();
  for (const auto& r : rows) {
    json jr;
    jr["strategy"] = r.strategy;
    jr["n_cap"] = r.n_cap;
    jr["accuracy"] = r.report.accuracy;
    jr["total_tokens"] = r.report.total_tokens;
    jr["mean_samples"] = r.report.mean_samples;
    json pq = json::array();
    for (const auto& q : r.report.per_question) {
      pq.push_back({{"question_id", q.question_id},
                    {"n_used", q.n_used},
                    {"tokens", q.tokens},
                    {"selected_correct", q.selected_correct}});
    }
    jr["per_question"] = std::move(pq);
    jrows.push_back(std::move(jr));
  }
  summary["rows"] = std::move(jrows);
  write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

  write_text_file(out_dir + "/chart.svg", frontier_svg(rows));

  if (config.score_log_samples > 0) {
    write_score_log(
        out_dir + "/scorelog.jsonl",
        sim::generate_log(suite, config.score_log_samples, config.seed));
  }
}

ReplayReport replay_log(const ScoreLog& log,
                        const planner::StoppingPolicy& policy, FitMode mode,
                        const estimate::PriorBelief& prior) {
  ReplayReport report;
  std::uint32_t agreements = 0;
  for (const auto& qid : log.question_order) {
    const auto& records = log.by_question.at(qid);
    if (records.empty()) continue;

    ReplayQuestion rq;
    rq.question_id = qid;
    rq.selected_full = controller::select_best(records).answer_key;
    for (const auto& r : records) report.tokens_full += r.token_count;

    controller::Session session(
        qid, policy,
        mode == FitMode::map ? controller::PriorSource::constant(prior)
                             : controller::PriorSource::none());
    std::size_t pos = 0;
    for (;;) {
      const controller::Decision d = session.decide();
      if (d.stop) {
        rq.stop_reason = d.reason == controller::StopReason::plan_satisfied
                             ? "plan_satisfied"
                             : "budget_exhausted";
        break;
      }
      if (pos >= records.size()) {
        // recorded log shorter than the plan
        rq.truncated = true;
        rq.stop_reason = "budget_exhausted";
        break;
      }
      const std::size_t take =
          std::min<std::size_t>(d.continue_count, records.size() - pos);
      for (std::size_t i = 0; i < take; ++i) {
        session.observe(records[pos]);
        rq.tokens_used += records[pos].token_count;
        ++pos;
      }
    }
    rq.n_used = static_cast<std::uint32_t>(session.observed().size());
    rq.selected_at_stop = session.best().answer_key;
    rq.agreement = rq.selected_at_stop == rq.selected_full;
    agreements += rq.agreement ? 1 : 0;
    report.tokens_used += rq.tokens_used;
    report.per_question.push_back(std::move(rq));
  }
  if (report.per_question.empty()) {
    fail(ErrorKind::data, "replay: log contains no questions");
  }
  report.token_reduction =
      report.tokens_full == 0
          ? 0.0
          : 1.0 - static_cast<double>(report.tokens_used) /
                      static_cast<double>(report.tokens_full);
  report.agreement_rate = static_cast<double>(agreements) /
                          static_cast<double>(report.per_question.size());
  return report;
}

std::string replay_to_csv(const ReplayReport& report) {
  std::ostringstream out;
  out << "question_id,n_used,tokens_used,selected_at_stop,selected_full,"
         "agreement,truncated,stop_reason\r\n";
  for (const auto& q : report.per_question) {
    out << csv_escape(q.question_id) << ',' << q.n_used << ','
        << q.tokens_used << ',' << csv_escape(q.selected_at_stop) << ','
        << csv_escape(q.selected_full) << ',' << (q.agreement ? 1 : 0) << ','
        << (q.truncated ? 1 : 0) << ',' << q.stop_reason << "\r\n";
  }
  return out.str();
}

std::string replay_summary_json(const ReplayReport& report,
                                std::uint64_t seed) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["n_questions"] = report.per_question.size();
  j["tokens_used"] = report.tokens_used;
  j["tokens_full"] = report.tokens_full;
  j["token_reduction"] = report.token_reduction;
  j["agreement_rate"] = report.agreement_rate;
  return j.dump(2) + "\n";
}

}  // namespace optscale::io
