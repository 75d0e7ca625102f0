#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "controller.hpp"

namespace optscale::sim {

// Generation hyperparameters. The simulator records these verbatim into
// reports; they do not affect the synthetic score model.
struct GenerationConfig {
  double temperature = 0.7;
  double top_p = 0.95;
  std::uint64_t seed = 42;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Ranges the suite generator draws question parameters from.
struct SuiteMeta {
  Range mu{0.3, 0.9};
  Range sigma{0.05, 0.3};
  Range correctness_midpoint{0.7, 0.7};
  Range correctness_slope{10.0, 10.0};
  std::uint32_t distractor_count = 4;
  double token_mean = 3000.0;
  double token_dispersion = 0.5;
};

// Ground truth for one synthetic question: the latent score distribution
// plus the models linking score to correctness and sample to token cost.
struct QuestionSpec {
  std::string question_id;
  dist::TruncNormParams latent;
  double correctness_midpoint = 0.7;
  double correctness_slope = 10.0;
  std::uint32_t distractor_count = 4;
  double token_mean = 3000.0;
  double token_dispersion = 0.5;
};

struct PerQuestionResult {
  std::string question_id;
  std::uint32_t n_used = 0;
  std::uint64_t tokens = 0;
  bool selected_correct = false;
};

struct StrategyReport {
  std::string strategy_name;
  double accuracy = 0.0;
  std::uint64_t total_tokens = 0;
  double mean_samples = 0.0;
  std::vector<PerQuestionResult> per_question;
};

enum class StrategyKind { fixed_bon, self_consistency, optscale0, optscale_t };

struct Strategy {
  StrategyKind kind = StrategyKind::fixed_bon;
  std::uint32_t n = 8;  // sample count for fixed_bon / self_consistency
  planner::StoppingPolicy policy{};              // optscale variants
  controller::PriorSource prior_source = controller::PriorSource::none();
  std::string name() const;
};

// Deterministic under seed: per-question substreams are derived by hashing
// seed with the question index, latent parameters uniform in their ranges.
std::vector<QuestionSpec> generate_suite(const SuiteMeta& meta,
                                         std::uint32_t n_questions,
                                         std::uint64_t seed);

// One candidate answer: score from the latent truncated normal, correctness
// Bernoulli(logistic(slope * (score - midpoint))), answer key "CORRECT" or a
// uniform distractor, token count rounded log-normal (min 1), and a length-3
// step-score list whose mean equals the drawn score.
controller::SampleRecord draw_sample(const QuestionSpec& q, Rng& rng,
                                     std::uint32_t sample_index = 0);

// Most frequent answer key; ties broken by earliest first occurrence.
std::string majority_vote(const std::vector<controller::SampleRecord>& records);

StrategyReport run_strategy(const Strategy& strategy,
                            const std::vector<QuestionSpec>& suite,
                            std::uint64_t seed);

// n samples per question from the same substreams run_strategy uses, so a
// recorded log and a live controller run see identical sample sequences.
std::vector<controller::SampleRecord> generate_log(
    const std::vector<QuestionSpec>& suite, std::uint32_t samples_per_question,
    std::uint64_t seed);

}  // namespace optscale::sim
