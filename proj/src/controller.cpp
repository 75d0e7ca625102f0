#include "controller.hpp"

#include <algorithm>

namespace optscale::controller {

double aggregate(const std::vector<double>& step_scores,
                 planner::AggregationMode mode) {
  if (step_scores.empty()) fail(ErrorKind::data, "aggregate: empty step scores");
  for (double s : step_scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorKind::data, "aggregate: step score outside [0,1]");
    }
  }
  switch (mode) {
    case planner::AggregationMode::mean: {
      double sum = 0.0;
      for (double s : step_scores) sum += s;
      return sum / static_cast<double>(step_scores.size());
    }
    case planner::AggregationMode::last:
      return step_scores.back();
    case planner::AggregationMode::min:
      return *std::min_element(step_scores.begin(), step_scores.end());
  }
  fail(ErrorKind::param, "aggregate: unknown mode");
}

const SampleRecord& select_best(const std::vector<SampleRecord>& records) {
  if (records.empty()) fail(ErrorKind::data, "select_best: no records");
  const SampleRecord* best = &records.front();
  for (const SampleRecord& r : records) {
    if (r.aggregate_score > best->aggregate_score) best = &r;
  }
  return *best;
}

PriorSource PriorSource::none() { return PriorSource{}; }

PriorSource PriorSource::constant(const estimate::PriorBelief& belief) {
  estimate::validate(belief);
  PriorSource src;
  src.mode_ = Mode::constant;
  src.fallback_ = belief;
  return src;
}

PriorSource PriorSource::calibration_table(
    std::vector<std::pair<std::string, estimate::PriorBelief>> table,
    const estimate::PriorBelief& fallback) {
  estimate::validate(fallback);
  for (const auto& [tag, belief] : table) estimate::validate(belief);
  PriorSource src;
  src.mode_ = Mode::table;
  src.table_ = std::move(table);
  src.fallback_ = fallback;
  return src;
}

std::optional<estimate::PriorBelief> PriorSource::lookup(
    const std::string& tag) const {
  if (mode_ == Mode::none) return std::nullopt;
  if (mode_ == Mode::table) {
    for (const auto& [key, belief] : table_) {
      if (key == tag) return belief;
    }
  }
  return fallback_;  // unknown tags fall back to the declared default
}

Session::Session(std::string question_id, planner::StoppingPolicy policy,
                 PriorSource prior_source)
    : question_id_(std::move(question_id)),
      policy_(policy),
      prior_source_(std::move(prior_source)) {
  planner::validate(policy_);
}

void Session::observe(const SampleRecord& record) {
  if (phase_ == Phase::stopped) {
    fail(ErrorKind::state, "observe: session already stopped");
  }
  if (record.question_id != question_id_) {
    fail(ErrorKind::data, "observe: record belongs to another question");
  }
  if (observed_.size() >= policy_.n_max) {
    fail(ErrorKind::state, "observe: budget already exhausted");
  }
  observed_.push_back(record);
  if (phase_ == Phase::warmup &&
      observed_.size() >= policy_.effective_n_init()) {
    phase_ = Phase::planning;
  }
}

Decision Session::decide() {
  if (phase_ == Phase::stopped) {
    fail(ErrorKind::state, "decide: session already stopped");
  }
  const std::uint32_t count = static_cast<std::uint32_t>(observed_.size());
  const std::uint32_t n_init = policy_.effective_n_init();

  if (count < n_init) {
    Decision d;
    d.continue_count = std::min(policy_.batch_size, n_init - count);
    return d;
  }

  std::vector<double> scores;
  scores.reserve(observed_.size());
  for (const SampleRecord& r : observed_) scores.push_back(r.aggregate_score);

  const auto prior = prior_source_.lookup(question_id_);
  if (prior) {
    // Sequential refinement: seed from the previous fit once one exists,
    // otherwise from the prior mode.
    std::optional<dist::TruncNormParams> seed;
    if (fit_) seed = fit_->params;
    fit_ = estimate::map_fit(scores, *prior, seed);
  } else {
    const dist::TruncNormParams seed =
        fit_ ? fit_->params : estimate::moment_init(scores);
    fit_ = estimate::mle_fit(scores, seed);
  }
  plan_ = planner::optimal_n(fit_->params, policy_, count);

  Decision d;
  if (static_cast<double>(count) >= plan_->n_star_unclamped) {
    phase_ = Phase::stopped;
    stop_reason_ = StopReason::plan_satisfied;
    d.stop = true;
    d.reason = stop_reason_;
  } else if (count >= policy_.n_max) {
    phase_ = Phase::stopped;
    stop_reason_ = StopReason::budget_exhausted;
    d.stop = true;
    d.reason = stop_reason_;
  } else {
    d.continue_count = std::min({policy_.batch_size, plan_->n_star - count,
                                 policy_.n_max - count});
  }
  return d;
}

}  // namespace optscale::controller
