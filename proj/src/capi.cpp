#include "optscale/optscale.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <string>

#include "controller.hpp"
#include "io.hpp"

namespace {

thread_local std::string g_last_error;

int code_of(optscale::ErrorKind kind) {
  using optscale::ErrorKind;
  switch (kind) {
    case ErrorKind::domain:
      return OPTSCALE_ERR_DOMAIN;
    case ErrorKind::data:
      return OPTSCALE_ERR_DATA;
    case ErrorKind::param:
      return OPTSCALE_ERR_PARAM;
    case ErrorKind::state:
      return OPTSCALE_ERR_STATE;
    case ErrorKind::degenerate:
      return OPTSCALE_ERR_DEGENERATE;
    case ErrorKind::io:
      return OPTSCALE_ERR_IO;
  }
  return OPTSCALE_ERR_PARAM;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return OPTSCALE_OK;
  } catch (const optscale::Error& e) {
    g_last_error = e.what();
    return code_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OPTSCALE_ERR_PARAM;
  }
}

optscale::dist::TruncNormParams to_params(optscale_params_t p) {
  return {p.mu, p.sigma};
}

optscale::planner::AggregationMode to_aggregation(int mode) {
  switch (mode) {
    case OPTSCALE_AGG_MEAN:
      return optscale::planner::AggregationMode::mean;
    case OPTSCALE_AGG_LAST:
      return optscale::planner::AggregationMode::last;
    case OPTSCALE_AGG_MIN:
      return optscale::planner::AggregationMode::min;
  }
  optscale::fail(optscale::ErrorKind::param, "unknown aggregation mode");
}

optscale::planner::StoppingPolicy to_policy(const optscale_policy_t* policy) {
  if (!policy) {
    optscale::fail(optscale::ErrorKind::param, "policy must not be NULL");
  }
  optscale::planner::StoppingPolicy out;
  out.s_min = policy->s_min;
  out.alpha = policy->alpha;
  out.n_max = policy->n_max;
  out.n_init = policy->n_init;
  out.batch_size = policy->batch_size;
  out.aggregation = to_aggregation(policy->aggregation);
  return out;
}

optscale::estimate::PriorBelief to_prior(const optscale_prior_t* prior) {
  if (!prior) {
    optscale::fail(optscale::ErrorKind::param, "prior must not be NULL");
  }
  return {prior->mu_bar, prior->sigma_mu, prior->sigma_bar,
          prior->sigma_sigma};
}

optscale_plan_t from_plan(const optscale::planner::Plan& plan) {
  return {plan.n_star, plan.cdf_at_threshold, plan.exceedance_now,
          plan.clamped ? 1 : 0};
}

optscale_fit_t from_fit(const optscale::estimate::FitResult& fit) {
  return {{fit.params.mu, fit.params.sigma},
          fit.objective,
          fit.iterations,
          fit.converged ? 1 : 0};
}

}  // namespace

struct optscale_session {
  optscale::controller::Session impl;
};

extern "C" {

const char* optscale_version(void) { return "1.0.0"; }

const char* optscale_last_error(void) { return g_last_error.c_str(); }

int optscale_std_normal_cdf(double x, double* out) {
  return guarded([&] { *out = optscale::dist::std_normal_cdf(x); });
}

int optscale_truncnorm_pdf(double s, optscale_params_t p, double* out) {
  return guarded([&] { *out = optscale::dist::truncnorm_pdf(s, to_params(p)); });
}

int optscale_truncnorm_cdf(double s, optscale_params_t p, double* out) {
  return guarded([&] { *out = optscale::dist::truncnorm_cdf(s, to_params(p)); });
}

int optscale_truncnorm_sample(optscale_params_t p, uint64_t seed, size_t n,
                              double* out) {
  return guarded([&] {
    optscale::Rng rng(seed);
    const auto draws = optscale::dist::truncnorm_sample(to_params(p), rng, n);
    std::memcpy(out, draws.data(), n * sizeof(double));
  });
}

int optscale_log_likelihood(const double* data, size_t n, optscale_params_t p,
                            double* out) {
  return guarded([&] {
    std::vector<double> scores(data, data + n);
    *out = optscale::dist::log_likelihood(scores, to_params(p));
  });
}

int optscale_exceedance(double s, optscale_params_t p, uint32_t n,
                        double* out) {
  return guarded(
      [&] { *out = optscale::planner::exceedance(s, to_params(p), n); });
}

int optscale_max_pdf(double s, optscale_params_t p, uint32_t n, double* out) {
  return guarded([&] { *out = optscale::planner::max_pdf(s, to_params(p), n); });
}

int optscale_optimal_n(optscale_params_t p, const optscale_policy_t* policy,
                       uint32_t current_n, optscale_plan_t* out) {
  return guarded([&] {
    *out = from_plan(
        optscale::planner::optimal_n(to_params(p), to_policy(policy),
                                     current_n));
  });
}

int optscale_moment_init(const double* data, size_t n, optscale_params_t* out) {
  return guarded([&] {
    std::vector<double> scores(data, data + n);
    const auto params = optscale::estimate::moment_init(scores);
    *out = {params.mu, params.sigma};
  });
}

int optscale_mle_fit(const double* data, size_t n, optscale_params_t init,
                     optscale_fit_t* out) {
  return guarded([&] {
    std::vector<double> scores(data, data + n);
    *out = from_fit(optscale::estimate::mle_fit(scores, to_params(init)));
  });
}

int optscale_map_fit(const double* data, size_t n,
                     const optscale_prior_t* prior,
                     const optscale_params_t* init, optscale_fit_t* out) {
  return guarded([&] {
    std::vector<double> scores(data, data + n);
    std::optional<optscale::dist::TruncNormParams> seed;
    if (init) seed = to_params(*init);
    *out = from_fit(optscale::estimate::map_fit(scores, to_prior(prior), seed));
  });
}

optscale_session_t* optscale_session_new(const char* question_id,
                                         const optscale_policy_t* policy,
                                         const optscale_prior_t* prior) {
  optscale_session_t* session = nullptr;
  const int rc = guarded([&] {
    auto source = prior
                      ? optscale::controller::PriorSource::constant(
                            to_prior(prior))
                      : optscale::controller::PriorSource::none();
    session = new optscale_session{optscale::controller::Session(
        question_id ? question_id : "", to_policy(policy), std::move(source))};
  });
  return rc == OPTSCALE_OK ? session : nullptr;
}

void optscale_session_free(optscale_session_t* session) { delete session; }

int optscale_session_observe(optscale_session_t* session,
                             const char* question_id, uint32_t sample_index,
                             const double* step_scores, size_t n_steps,
                             uint64_t tokens, const char* answer_key,
                             int correct) {
  return guarded([&] {
    if (!session) {
      optscale::fail(optscale::ErrorKind::param, "session must not be NULL");
    }
    optscale::controller::SampleRecord rec;
    rec.question_id = question_id ? question_id : "";
    rec.sample_index = sample_index;
    rec.step_scores.assign(step_scores, step_scores + n_steps);
    rec.token_count = tokens;
    rec.answer_key = answer_key ? answer_key : "";
    if (correct >= 0) rec.correct = correct != 0;
    rec.aggregate_score = optscale::controller::aggregate(
        rec.step_scores, session->impl.policy().aggregation);
    session->impl.observe(rec);
  });
}

int optscale_session_decide(optscale_session_t* session,
                            optscale_decision_t* out) {
  return guarded([&] {
    if (!session) {
      optscale::fail(optscale::ErrorKind::param, "session must not be NULL");
    }
    const auto d = session->impl.decide();
    out->stop = d.stop ? 1 : 0;
    out->continue_count = d.continue_count;
    out->reason = !d.reason ? OPTSCALE_STOP_NONE
                  : (*d.reason ==
                             optscale::controller::StopReason::plan_satisfied
                         ? OPTSCALE_STOP_PLAN_SATISFIED
                         : OPTSCALE_STOP_BUDGET_EXHAUSTED);
  });
}

int optscale_session_observed_count(const optscale_session_t* session,
                                    uint32_t* out) {
  return guarded([&] {
    if (!session) {
      optscale::fail(optscale::ErrorKind::param, "session must not be NULL");
    }
    *out = static_cast<uint32_t>(session->impl.observed().size());
  });
}

int optscale_session_current_plan(const optscale_session_t* session,
                                  optscale_plan_t* out) {
  return guarded([&] {
    if (!session || !session->impl.current_plan()) {
      optscale::fail(optscale::ErrorKind::state, "no plan computed yet");
    }
    *out = from_plan(*session->impl.current_plan());
  });
}

int optscale_session_current_fit(const optscale_session_t* session,
                                 optscale_fit_t* out) {
  return guarded([&] {
    if (!session || !session->impl.current_fit()) {
      optscale::fail(optscale::ErrorKind::state, "no fit computed yet");
    }
    *out = from_fit(*session->impl.current_fit());
  });
}

int optscale_session_best(const optscale_session_t* session,
                          uint32_t* sample_index, double* score, char* key_buf,
                          size_t key_len) {
  return guarded([&] {
    if (!session) {
      optscale::fail(optscale::ErrorKind::param, "session must not be NULL");
    }
    const auto& best = session->impl.best();
    if (sample_index) *sample_index = best.sample_index;
    if (score) *score = best.aggregate_score;
    if (key_buf && key_len > 0) {
      std::strncpy(key_buf, best.answer_key.c_str(), key_len - 1);
      key_buf[key_len - 1] = '\0';
    }
  });
}

int optscale_fit_scorelog(const char* log_path, int fit_mode,
                          const optscale_prior_t* prior, int aggregation,
                          int csv_format, char** out_text, uint32_t* skipped,
                          int* used_default_prior) {
  return guarded([&] {
    namespace io = optscale::io;
    const auto mode = fit_mode == OPTSCALE_FIT_MAP ? io::FitMode::map
                                                   : io::FitMode::mle;
    optscale::estimate::PriorBelief belief{};
    bool defaulted = false;
    if (prior) {
      belief = to_prior(prior);
    } else if (mode == io::FitMode::map) {
      defaulted = true;  // falls back to the default belief
    }
    const auto log = io::read_score_log(log_path, to_aggregation(aggregation));
    const auto run = io::fit_log(log, mode, belief);
    const std::string text = csv_format
                                 ? io::fit_reports_to_csv(run.reports)
                                 : io::fit_reports_to_jsonl(run.reports);
    if (out_text) {
      *out_text = new char[text.size() + 1];
      std::memcpy(*out_text, text.c_str(), text.size() + 1);
    }
    if (skipped) *skipped = static_cast<uint32_t>(run.skipped.size());
    if (used_default_prior) *used_default_prior = defaulted ? 1 : 0;
  });
}

int optscale_simulate(const char* config_path, const char* out_dir,
                      const uint64_t* seed_override) {
  return guarded([&] {
    auto config = optscale::io::load_simulate_config(config_path);
    if (seed_override) {
      config.seed = *seed_override;
      config.generation.seed = *seed_override;
    }
    optscale::io::write_simulation_outputs(config, out_dir);
  });
}

int optscale_replay(const char* log_path, const optscale_policy_t* policy,
                    int fit_mode, const optscale_prior_t* prior, uint64_t seed,
                    const char* out_dir) {
  return guarded([&] {
    namespace io = optscale::io;
    const auto cpp_policy = to_policy(policy);
    const auto mode = fit_mode == OPTSCALE_FIT_MAP ? io::FitMode::map
                                                   : io::FitMode::mle;
    optscale::estimate::PriorBelief belief{};
    if (prior) belief = to_prior(prior);
    const auto log = io::read_score_log(log_path, cpp_policy.aggregation);
    const auto report = io::replay_log(log, cpp_policy, mode, belief);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      optscale::fail(optscale::ErrorKind::io,
                     std::string("cannot create output directory ") + out_dir);
    }
    io::write_text_file(std::string(out_dir) + "/replay.csv",
                        io::replay_to_csv(report));
    io::write_text_file(std::string(out_dir) + "/replay_summary.json",
                        io::replay_summary_json(report, seed));
  });
}

void optscale_string_free(char* text) { delete[] text; }

}  // extern "C"
