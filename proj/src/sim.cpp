#include "sim.hpp"

#include <algorithm>
#include <cmath>

namespace optscale::sim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double uniform_in(Range r, Rng& rng) {
  return r.lo + (r.hi - r.lo) * rng.next_double();
}

void validate_range(Range r, const char* what) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    fail(ErrorKind::param, std::string("invalid range for ") + what);
  }
}

double standard_normal_draw(Rng& rng) {
  // Box-Muller; u1 nudged away from 0 so the log stays finite.
  const double u1 = std::max(rng.next_double(), 1e-300);
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace

std::string Strategy::name() const {
  switch (kind) {
    case StrategyKind::fixed_bon:
      return "fixed_bon(" + std::to_string(n) + ")";
    case StrategyKind::self_consistency:
      return "self_consistency(" + std::to_string(n) + ")";
    case StrategyKind::optscale0:
      return "optscale0(n_max=" + std::to_string(policy.n_max) + ")";
    case StrategyKind::optscale_t:
      return "optscale_t(n_max=" + std::to_string(policy.n_max) + ")";
  }
  return "unknown";
}

std::vector<QuestionSpec> generate_suite(const SuiteMeta& meta,
                                         std::uint32_t n_questions,
                                         std::uint64_t seed) {
  if (n_questions < 1) fail(ErrorKind::param, "n_questions must be >= 1");
  validate_range(meta.mu, "mu");
  validate_range(meta.sigma, "sigma");
  validate_range(meta.correctness_midpoint, "correctness_midpoint");
  validate_range(meta.correctness_slope, "correctness_slope");
  if (meta.distractor_count < 1) {
    fail(ErrorKind::param, "distractor_count must be >= 1");
  }
  if (meta.mu.lo < dist::kMuLo || meta.mu.hi > dist::kMuHi ||
      meta.sigma.lo < dist::kSigmaFloor || meta.sigma.hi > dist::kSigmaCeil) {
    fail(ErrorKind::param, "latent parameter range outside the parameter box");
  }

  std::vector<QuestionSpec> suite;
  suite.reserve(n_questions);
  for (std::uint32_t i = 0; i < n_questions; ++i) {
    // Separate stream from the sampling stream so adding questions never
    // perturbs earlier ones.
    Rng rng = Rng::substream(seed ^ 0xa5a5a5a5a5a5a5a5ULL, i);
    QuestionSpec q;
    q.question_id = "q" + std::to_string(i);
    q.latent.mu = uniform_in(meta.mu, rng);
    q.latent.sigma = uniform_in(meta.sigma, rng);
    q.correctness_midpoint = uniform_in(meta.correctness_midpoint, rng);
    q.correctness_slope = uniform_in(meta.correctness_slope, rng);
    q.distractor_count = meta.distractor_count;
    q.token_mean = meta.token_mean;
    q.token_dispersion = meta.token_dispersion;
    suite.push_back(std::move(q));
  }
  return suite;
}

controller::SampleRecord draw_sample(const QuestionSpec& q, Rng& rng,
                                     std::uint32_t sample_index) {
  const double score = dist::truncnorm_quantile(rng.next_double(), q.latent);
  const double p_correct =
      1.0 / (1.0 + std::exp(-q.correctness_slope *
                            (score - q.correctness_midpoint)));
  const bool correct = rng.next_double() < p_correct;

  controller::SampleRecord rec;
  rec.question_id = q.question_id;
  rec.sample_index = sample_index;
  if (correct) {
    rec.answer_key = "CORRECT";
  } else {
    const std::uint32_t k = static_cast<std::uint32_t>(
        rng.next_double() * static_cast<double>(q.distractor_count));
    rec.answer_key = "D" + std::to_string(std::min(k, q.distractor_count - 1));
  }
  rec.correct = correct;

  const double z = standard_normal_draw(rng);
  const double tokens =
      std::round(std::exp(std::log(q.token_mean) + q.token_dispersion * z));
  rec.token_count = static_cast<std::uint64_t>(std::max(1.0, tokens));

  const double delta = std::min({0.02, score, 1.0 - score});
  rec.step_scores = {score - delta, score, score + delta};
  rec.aggregate_score =
      controller::aggregate(rec.step_scores, planner::AggregationMode::mean);
  return rec;
}

std::string majority_vote(
    const std::vector<controller::SampleRecord>& records) {
  if (records.empty()) fail(ErrorKind::data, "majority_vote: no records");
  std::vector<std::pair<std::string, std::uint32_t>> counts;
  for (const auto& r : records) {
    bool found = false;
    for (auto& [key, count] : counts) {
      if (key == r.answer_key) {
        ++count;
        found = true;
        break;
      }
    }
    if (!found) counts.emplace_back(r.answer_key, 1);
  }
  // first-seen order breaks ties
  const auto* best = &counts.front();
  for (const auto& entry : counts) {
    if (entry.second > best->second) best = &entry;
  }
  return best->first;
}

namespace {

PerQuestionResult run_question(const Strategy& strategy, const QuestionSpec& q,
                               Rng rng) {
  PerQuestionResult res;
  res.question_id = q.question_id;

  if (strategy.kind == StrategyKind::fixed_bon ||
      strategy.kind == StrategyKind::self_consistency) {
    std::vector<controller::SampleRecord> records;
    records.reserve(strategy.n);
    for (std::uint32_t i = 0; i < strategy.n; ++i) {
      records.push_back(draw_sample(q, rng, i));
      res.tokens += records.back().token_count;
    }
    res.n_used = strategy.n;
    if (strategy.kind == StrategyKind::fixed_bon) {
      res.selected_correct = controller::select_best(records).correct.value();
    } else {
      res.selected_correct = majority_vote(records) == "CORRECT";
    }
    return res;
  }

  controller::Session session(q.question_id, strategy.policy,
                              strategy.kind == StrategyKind::optscale_t
                                  ? strategy.prior_source
                                  : controller::PriorSource::none());
  std::uint32_t index = 0;
  for (;;) {
    const controller::Decision d = session.decide();
    if (d.stop) break;
    for (std::uint32_t i = 0; i < d.continue_count; ++i) {
      const auto rec = draw_sample(q, rng, index++);
      res.tokens += rec.token_count;
      session.observe(rec);
    }
  }
  res.n_used = static_cast<std::uint32_t>(session.observed().size());
  res.selected_correct = session.best().correct.value();
  return res;
}

}  // namespace

StrategyReport run_strategy(const Strategy& strategy,
                            const std::vector<QuestionSpec>& suite,
                            std::uint64_t seed) {
  if (suite.empty()) fail(ErrorKind::param, "run_strategy: empty suite");
  StrategyReport report;
  report.strategy_name = strategy.name();
  report.per_question.reserve(suite.size());

  std::uint32_t correct = 0;
  std::uint64_t samples = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    PerQuestionResult res =
        run_question(strategy, suite[i], Rng::substream(seed, i));
    correct += res.selected_correct ? 1 : 0;
    samples += res.n_used;
    report.total_tokens += res.tokens;
    report.per_question.push_back(std::move(res));
  }
  report.accuracy = static_cast<double>(correct) /
                    static_cast<double>(suite.size());
  report.mean_samples =
      static_cast<double>(samples) / static_cast<double>(suite.size());
  return report;
}

std::vector<controller::SampleRecord> generate_log(
    const std::vector<QuestionSpec>& suite, std::uint32_t samples_per_question,
    std::uint64_t seed) {
  if (samples_per_question < 1) {
    fail(ErrorKind::param, "samples_per_question must be >= 1");
  }
  std::vector<controller::SampleRecord> log;
  log.reserve(static_cast<std::size_t>(samples_per_question) * suite.size());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    Rng rng = Rng::substream(seed, i);
    for (std::uint32_t k = 0; k < samples_per_question; ++k) {
      log.push_back(draw_sample(suite[i], rng, k));
    }
  }
  return log;
}

}  // namespace optscale::sim
