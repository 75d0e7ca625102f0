#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "estimate.hpp"
#include "planner.hpp"

namespace optscale::controller {

// One candidate answer as seen by the controller: per-step verifier scores,
// their aggregate, cost, and identity of the extracted answer.
struct SampleRecord {
  std::string question_id;
  std::uint32_t sample_index = 0;
  std::vector<double> step_scores;
  double aggregate_score = 0.0;
  std::uint64_t token_count = 1;
  std::string answer_key;
  std::optional<bool> correct;
};

double aggregate(const std::vector<double>& step_scores,
                 planner::AggregationMode mode);

// Record with maximal aggregate score; ties broken by lowest sample_index.
const SampleRecord& select_best(const std::vector<SampleRecord>& records);

// Where prior beliefs come from: a fixed belief, a lookup table keyed by
// question tag with a declared default, or nothing (pure-MLE operation).
class PriorSource {
 public:
  static PriorSource none();
  static PriorSource constant(const estimate::PriorBelief& belief);
  static PriorSource calibration_table(
      std::vector<std::pair<std::string, estimate::PriorBelief>> table,
      const estimate::PriorBelief& fallback);

  std::optional<estimate::PriorBelief> lookup(const std::string& tag) const;
  bool has_prior() const { return mode_ != Mode::none; }

 private:
  enum class Mode { none, constant, table };
  Mode mode_ = Mode::none;
  estimate::PriorBelief fallback_{};
  std::vector<std::pair<std::string, estimate::PriorBelief>> table_{};
};

enum class Phase { warmup, planning, stopped };
enum class StopReason { plan_satisfied, budget_exhausted };

struct Decision {
  bool stop = false;
  std::uint32_t continue_count = 0;          // valid when !stop
  std::optional<StopReason> reason;          // valid when stop
};

// Adaptive scaling session for one question: observe scores, refit the score
// distribution, replan, and emit continue/stop decisions. Owned by a single
// logical thread of control.
class Session {
 public:
  Session(std::string question_id, planner::StoppingPolicy policy,
          PriorSource prior_source);

  // Appends one record; transitions warmup -> planning when the count
  // reaches n_init. No fit happens here. Throws Error(state) after a stop
  // and Error(data) on a question-id mismatch.
  void observe(const SampleRecord& record);

  // Warmup: continue(min(batch, n_init - observed)) without fitting.
  // Otherwise refit (MAP when a prior is available, MLE seeded by the
  // moment estimate otherwise), replan, and stop once observed >= n_star
  // or the budget is exhausted. Deterministic given the observation order.
  Decision decide();

  const std::vector<SampleRecord>& observed() const { return observed_; }
  Phase phase() const { return phase_; }
  std::optional<StopReason> stop_reason() const { return stop_reason_; }
  const std::optional<estimate::FitResult>& current_fit() const {
    return fit_;
  }
  const std::optional<planner::Plan>& current_plan() const { return plan_; }
  const planner::StoppingPolicy& policy() const { return policy_; }

  const SampleRecord& best() const { return select_best(observed_); }

 private:
  std::string question_id_;
  planner::StoppingPolicy policy_;
  PriorSource prior_source_;
  std::vector<SampleRecord> observed_;
  std::optional<estimate::FitResult> fit_;
  std::optional<planner::Plan> plan_;
  Phase phase_ = Phase::warmup;
  std::optional<StopReason> stop_reason_;
};

}  // namespace optscale::controller
