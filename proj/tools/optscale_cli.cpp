// optscale command-line tool: plan computation, score-log fitting,
// simulation campaigns, and offline replay. Thin shell over the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "optscale/optscale.h"

namespace {

// exit codes: 0 success, 2 usage, 3 data error, 4 I/O error
int exit_code_of(int status) {
  switch (status) {
    case OPTSCALE_OK:
      return 0;
    case OPTSCALE_ERR_PARAM:
    case OPTSCALE_ERR_DOMAIN:
      return 2;
    case OPTSCALE_ERR_IO:
      return 4;
    default:
      return 3;
  }
}

int report_failure(int status) {
  std::cerr << "error: " << optscale_last_error() << "\n";
  return exit_code_of(status);
}

int parse_aggregation(const std::string& name) {
  if (name == "last") return OPTSCALE_AGG_LAST;
  if (name == "min") return OPTSCALE_AGG_MIN;
  return OPTSCALE_AGG_MEAN;
}

struct PolicyFlags {
  double s_min = 0.95;
  double alpha = 0.9;
  std::uint32_t n_max = 64;
  std::uint32_t n_init = 0;
  std::uint32_t batch = 1;
  std::string aggregation = "mean";

  void attach(CLI::App* cmd, bool require_core) {
    static const CLI::Validator open_unit_interval(
        [](std::string& value) -> std::string {
          const double v = std::stod(value);
          if (!(v > 0.0 && v < 1.0)) return "must lie strictly in (0,1)";
          return {};
        },
        "OPEN_UNIT_INTERVAL");
    auto* s = cmd->add_option("--s-min", s_min, "Quality threshold in (0,1)")
                  ->check(open_unit_interval);
    auto* a = cmd->add_option("--alpha", alpha, "Confidence level in (0,1)")
                  ->check(open_unit_interval);
    auto* n = cmd->add_option("--n-max", n_max, "Maximum samples")
                  ->check(CLI::PositiveNumber);
    if (require_core) {
      s->required();
      a->required();
      n->required();
    }
    cmd->add_option("--n-init", n_init,
                    "Warmup samples (default: ceil(n_max/3))");
    cmd->add_option("--batch", batch, "Samples per continuation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--aggregation", aggregation,
                    "Step-score aggregation")
        ->check(CLI::IsMember({"mean", "last", "min"}));
  }

  optscale_policy_t to_c() const {
    return {s_min, alpha, n_max, n_init, batch, parse_aggregation(aggregation)};
  }
};

struct PriorFlags {
  double mu_bar = 0.5;
  double sigma_mu = 0.1;
  double sigma_bar = 0.2;
  double sigma_sigma = 0.05;
  bool any_set = false;

  void attach(CLI::App* cmd) {
    auto mark = [this](double) { any_set = true; };
    cmd->add_option("--prior-mu", mu_bar, "Prior center for mu")
        ->each([this](const std::string&) { any_set = true; });
    cmd->add_option("--prior-sigma-mu", sigma_mu, "Prior std for mu")
        ->check(CLI::PositiveNumber)
        ->each([this](const std::string&) { any_set = true; });
    cmd->add_option("--prior-sigma", sigma_bar, "Prior center for sigma")
        ->check(CLI::PositiveNumber)
        ->each([this](const std::string&) { any_set = true; });
    cmd->add_option("--prior-sigma-sigma", sigma_sigma, "Prior std for sigma")
        ->check(CLI::PositiveNumber)
        ->each([this](const std::string&) { any_set = true; });
    (void)mark;
  }

  optscale_prior_t to_c() const {
    return {mu_bar, sigma_mu, sigma_bar, sigma_sigma};
  }
};

bool write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistically optimal Best-of-N sample planning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", optscale_version());

  // plan
  double mu = 0.5, sigma = 0.2;
  PolicyFlags plan_policy;
  auto* plan = app.add_subcommand(
      "plan", "Closed-form optimal sample count for given (mu, sigma)");
  plan->add_option("--mu", mu, "Location parameter")->required();
  plan->add_option("--sigma", sigma, "Scale parameter")
      ->required()
      ->check(CLI::PositiveNumber);
  plan_policy.attach(plan, /*require_core=*/true);

  // fit
  std::string fit_log_path, fit_mode = "mle", fit_format = "jsonl",
              fit_out, fit_aggregation = "mean";
  PriorFlags fit_prior;
  auto* fit = app.add_subcommand(
      "fit", "Per-question truncated-normal fits over a JSONL score log");
  fit->add_option("--log", fit_log_path, "Score log (JSONL)")->required();
  fit->add_option("--mode", fit_mode, "Fit mode")
      ->check(CLI::IsMember({"mle", "map"}));
  fit->add_option("--format", fit_format, "Output format")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  fit->add_option("--aggregation", fit_aggregation, "Step-score aggregation")
      ->check(CLI::IsMember({"mean", "last", "min"}));
  fit->add_option("--out", fit_out, "Output path (default: stdout)");
  fit_prior.attach(fit);

  // simulate
  std::string sim_config, sim_out;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  auto* simulate = app.add_subcommand(
      "simulate", "Run a synthetic strategy-comparison campaign");
  simulate->add_option("--config", sim_config, "Campaign config (JSON)")
      ->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--seed", sim_seed, "Override the config seed")
      ->each([&](const std::string&) { sim_seed_set = true; });

  // replay
  std::string replay_log_path, replay_out, replay_mode = "mle";
  std::uint64_t replay_seed = 42;
  PolicyFlags replay_policy;
  PriorFlags replay_prior;
  auto* replay = app.add_subcommand(
      "replay", "Offline counterfactual replay of a recorded score log");
  replay->add_option("--log", replay_log_path, "Score log (JSONL)")->required();
  replay->add_option("--out", replay_out, "Output directory")->required();
  replay->add_option("--mode", replay_mode, "Fit mode")
      ->check(CLI::IsMember({"mle", "map"}));
  replay->add_option("--seed", replay_seed, "Seed recorded in the report");
  replay_policy.attach(replay, /*require_core=*/true);
  replay_prior.attach(replay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // normalize CLI11's exit codes onto the documented 0/2 contract
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (plan->parsed()) {
    const optscale_policy_t policy = plan_policy.to_c();
    optscale_plan_t out{};
    const int rc =
        optscale_optimal_n({mu, sigma}, &policy, /*current_n=*/0, &out);
    if (rc != OPTSCALE_OK) return report_failure(rc);
    std::printf("n_star: %u\n", out.n_star);
    std::printf("cdf_at_threshold: %.17g\n", out.cdf_at_threshold);
    std::printf("exceedance_at_n_star: %.17g\n", out.exceedance_now);
    std::printf("clamped: %s\n", out.clamped ? "true" : "false");
    return 0;
  }

  if (fit->parsed()) {
    const optscale_prior_t prior = fit_prior.to_c();
    const bool map_mode = fit_mode == "map";
    char* text = nullptr;
    uint32_t skipped = 0;
    int used_default = 0;
    const int rc = optscale_fit_scorelog(
        fit_log_path.c_str(), map_mode ? OPTSCALE_FIT_MAP : OPTSCALE_FIT_MLE,
        fit_prior.any_set ? &prior : nullptr,
        parse_aggregation(fit_aggregation), fit_format == "csv" ? 1 : 0,
        &text, &skipped, &used_default);
    if (rc != OPTSCALE_OK) return report_failure(rc);
    if (used_default) {
      std::cerr << "notice: map mode without prior flags, using default "
                   "prior belief\n";
    }
    if (skipped > 0) {
      std::cerr << "warning: skipped " << skipped
                << " question(s) with zero scores\n";
    }
    const bool ok = write_or_print(fit_out, text);
    optscale_string_free(text);
    if (!ok) {
      std::cerr << "error: cannot write " << fit_out << "\n";
      return 4;
    }
    return 0;
  }

  if (simulate->parsed()) {
    const int rc = optscale_simulate(sim_config.c_str(), sim_out.c_str(),
                                     sim_seed_set ? &sim_seed : nullptr);
    if (rc != OPTSCALE_OK) return report_failure(rc);
    std::cout << "reports written to " << sim_out << "\n";
    return 0;
  }

  if (replay->parsed()) {
    const optscale_policy_t policy = replay_policy.to_c();
    const optscale_prior_t prior = replay_prior.to_c();
    const int rc = optscale_replay(
        replay_log_path.c_str(), &policy,
        replay_mode == "map" ? OPTSCALE_FIT_MAP : OPTSCALE_FIT_MLE,
        replay_prior.any_set ? &prior : nullptr, replay_seed,
        replay_out.c_str());
    if (rc != OPTSCALE_OK) return report_failure(rc);
    std::cout << "seed: " << replay_seed << "\n"
              << "reports written to " << replay_out << "\n";
    return 0;
  }

  return 2;
}
