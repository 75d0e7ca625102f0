#include "optscale/optscale.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("optscale_capi_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string score_line(const std::string& qid, unsigned idx, double score,
                       unsigned tokens, const std::string& key) {
  return "{\"question_id\":\"" + qid + "\",\"sample_index\":" +
         std::to_string(idx) + ",\"step_scores\":[" + std::to_string(score) +
         "],\"tokens\":" + std::to_string(tokens) + ",\"answer_key\":\"" +
         key + "\"}\n";
}

optscale_policy_t default_policy() {
  optscale_policy_t p;
  p.s_min = 0.9;
  p.alpha = 0.9;
  p.n_max = 16;
  p.n_init = 0;
  p.batch_size = 1;
  p.aggregation = OPTSCALE_AGG_MEAN;
  return p;
}

}  // namespace

TEST_CASE("version and error strings exist") {
  CHECK(optscale_version() != nullptr);
  CHECK(std::strlen(optscale_version()) > 0);
  CHECK(optscale_last_error() != nullptr);
}

TEST_CASE("math surface: values and error codes") {
  double out = 0.0;
  CHECK(optscale_std_normal_cdf(0.0, &out) == OPTSCALE_OK);
  CHECK(out == doctest::Approx(0.5));
  CHECK(optscale_std_normal_cdf(NAN, &out) == OPTSCALE_ERR_DOMAIN);
  CHECK(std::strlen(optscale_last_error()) > 0);

  const optscale_params_t p{0.6, 0.15};
  CHECK(optscale_truncnorm_pdf(0.6, p, &out) == OPTSCALE_OK);
  CHECK(out > 2.0);
  CHECK(optscale_truncnorm_cdf(1.0, p, &out) == OPTSCALE_OK);
  CHECK(out == doctest::Approx(1.0));
  const optscale_params_t bad{0.5, 0.0};
  CHECK(optscale_truncnorm_cdf(0.5, bad, &out) == OPTSCALE_ERR_PARAM);
  const optscale_params_t degen{1.5, 0.001};
  CHECK(optscale_truncnorm_cdf(0.5, degen, &out) == OPTSCALE_ERR_DEGENERATE);
}

TEST_CASE("sampling is deterministic under a seed") {
  const optscale_params_t p{0.6, 0.15};
  std::vector<double> a(64), b(64);
  REQUIRE(optscale_truncnorm_sample(p, 9, a.size(), a.data()) == OPTSCALE_OK);
  REQUIRE(optscale_truncnorm_sample(p, 9, b.size(), b.data()) == OPTSCALE_OK);
  CHECK(a == b);
  for (double v : a) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  double ll = 0.0;
  CHECK(optscale_log_likelihood(a.data(), a.size(), p, &ll) == OPTSCALE_OK);
  CHECK(std::isfinite(ll));
  const double outside = 1.5;
  CHECK(optscale_log_likelihood(&outside, 1, p, &ll) == OPTSCALE_ERR_DATA);
}

TEST_CASE("planning surface") {
  double out = 0.0;
  const optscale_params_t p{0.5, 0.2};
  CHECK(optscale_exceedance(0.9, p, 4, &out) == OPTSCALE_OK);
  CHECK(out > 0.0);
  CHECK(out < 1.0);
  CHECK(optscale_exceedance(0.9, p, 0, &out) == OPTSCALE_ERR_DOMAIN);
  CHECK(optscale_max_pdf(0.5, p, 8, &out) == OPTSCALE_OK);
  CHECK(out > 0.0);

  optscale_policy_t pol = default_policy();
  pol.s_min = 0.5;  // cdf at threshold = 0.5 by symmetry
  optscale_plan_t plan;
  const optscale_params_t sym{0.5, 0.2};
  REQUIRE(optscale_optimal_n(sym, &pol, 0, &plan) == OPTSCALE_OK);
  CHECK(plan.n_star == 4);
  CHECK(plan.cdf_at_threshold == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(plan.clamped == 0);

  pol.alpha = 1.5;
  CHECK(optscale_optimal_n(sym, &pol, 0, &plan) == OPTSCALE_ERR_PARAM);
}

TEST_CASE("estimation surface") {
  const optscale_params_t truth{0.6, 0.15};
  std::vector<double> data(5000);
  REQUIRE(optscale_truncnorm_sample(truth, 123, data.size(), data.data()) ==
          OPTSCALE_OK);

  optscale_params_t init;
  REQUIRE(optscale_moment_init(data.data(), data.size(), &init) == OPTSCALE_OK);
  CHECK(std::abs(init.mu - 0.6) < 0.05);

  optscale_fit_t fit;
  REQUIRE(optscale_mle_fit(data.data(), data.size(), init, &fit) ==
          OPTSCALE_OK);
  CHECK(std::abs(fit.params.mu - 0.6) < 0.03);
  CHECK(std::abs(fit.params.sigma - 0.15) < 0.03);
  CHECK(fit.converged == 1);

  // MAP with NULL init starts at the prior mode; empty data returns it.
  const optscale_prior_t prior{0.4, 0.1, 0.2, 0.05};
  optscale_fit_t map;
  REQUIRE(optscale_map_fit(nullptr, 0, &prior, nullptr, &map) == OPTSCALE_OK);
  CHECK(map.params.mu == doctest::Approx(0.4));
  CHECK(map.params.sigma == doctest::Approx(0.2));
  REQUIRE(optscale_map_fit(data.data(), data.size(), &prior, nullptr, &map) ==
          OPTSCALE_OK);
  CHECK(map.params.mu > 0.4);
  CHECK(map.params.mu < 0.65);
  CHECK(optscale_map_fit(data.data(), data.size(), nullptr, nullptr, &map) ==
        OPTSCALE_ERR_PARAM);
}

TEST_CASE("session loop mirrors the adaptive controller") {
  optscale_policy_t pol = default_policy();
  pol.s_min = 0.5;
  pol.n_max = 8;

  optscale_session_t* s = optscale_session_new("q1", &pol, nullptr);
  REQUIRE(s != nullptr);

  const double scores[] = {0.30, 0.45, 0.55, 0.70, 0.50, 0.60, 0.40, 0.65};
  uint32_t used = 0;
  for (;;) {
    optscale_decision_t d;
    REQUIRE(optscale_session_decide(s, &d) == OPTSCALE_OK);
    if (d.stop) {
      CHECK((d.reason == OPTSCALE_STOP_PLAN_SATISFIED ||
             d.reason == OPTSCALE_STOP_BUDGET_EXHAUSTED));
      break;
    }
    for (uint32_t i = 0; i < d.continue_count; ++i) {
      const double step = scores[used];
      const char* key = used == 3 ? "BEST" : "OTHER";
      REQUIRE(optscale_session_observe(s, "q1", used, &step, 1, 100, key,
                                       -1) == OPTSCALE_OK);
      ++used;
    }
  }

  uint32_t count = 0;
  REQUIRE(optscale_session_observed_count(s, &count) == OPTSCALE_OK);
  CHECK(count == used);
  CHECK(count >= 3);  // warmup = ceil(8 / 3)
  CHECK(count <= 8);

  optscale_plan_t plan;
  CHECK(optscale_session_current_plan(s, &plan) == OPTSCALE_OK);
  CHECK(plan.n_star >= 1);
  optscale_fit_t fit;
  CHECK(optscale_session_current_fit(s, &fit) == OPTSCALE_OK);
  CHECK(fit.params.sigma >= 0.001);

  uint32_t best_idx = 0;
  double best_score = 0.0;
  char key[16];
  REQUIRE(optscale_session_best(s, &best_idx, &best_score, key,
                                sizeof key) == OPTSCALE_OK);
  CHECK(best_idx == 3);
  CHECK(best_score == doctest::Approx(0.70));
  CHECK(std::string(key) == "BEST");

  // illegal operations after stop, and mismatched question ids
  const double step = 0.5;
  CHECK(optscale_session_observe(s, "q1", used, &step, 1, 10, "X", -1) ==
        OPTSCALE_ERR_STATE);
  optscale_session_free(s);

  optscale_session_t* t = optscale_session_new("q2", &pol, nullptr);
  REQUIRE(t != nullptr);
  CHECK(optscale_session_observe(t, "other", 0, &step, 1, 10, "X", -1) ==
        OPTSCALE_ERR_DATA);
  optscale_session_free(t);
  optscale_session_free(nullptr);  // must be a no-op

  optscale_policy_t bad = default_policy();
  bad.n_max = 0;
  CHECK(optscale_session_new("q", &bad, nullptr) == nullptr);
  CHECK(std::strlen(optscale_last_error()) > 0);
}

TEST_CASE("fit_scorelog command core") {
  TempDir tmp;
  std::string log;
  for (unsigned i = 0; i < 40; ++i) {
    log += score_line("qa", i, 0.45 + 0.005 * (i % 20), 50, "A");
  }
  write_file(tmp.file("log.jsonl"), log);

  char* text = nullptr;
  uint32_t skipped = 7;
  int used_default = 0;
  REQUIRE(optscale_fit_scorelog(tmp.file("log.jsonl").c_str(),
                                OPTSCALE_FIT_MLE, nullptr, OPTSCALE_AGG_MEAN,
                                0, &text, &skipped, &used_default) ==
          OPTSCALE_OK);
  REQUIRE(text != nullptr);
  CHECK(std::string(text).find("\"question_id\":\"qa\"") != std::string::npos);
  CHECK(skipped == 0);
  CHECK(used_default == 0);
  optscale_string_free(text);

  text = nullptr;
  REQUIRE(optscale_fit_scorelog(tmp.file("log.jsonl").c_str(),
                                OPTSCALE_FIT_MAP, nullptr, OPTSCALE_AGG_MEAN,
                                1, &text, &skipped, &used_default) ==
          OPTSCALE_OK);
  CHECK(used_default == 1);
  CHECK(std::string(text).find("question_id,mu_hat") == 0);
  optscale_string_free(text);

  CHECK(optscale_fit_scorelog(tmp.file("absent.jsonl").c_str(),
                              OPTSCALE_FIT_MLE, nullptr, OPTSCALE_AGG_MEAN, 0,
                              &text, &skipped, &used_default) ==
        OPTSCALE_ERR_IO);
}

TEST_CASE("simulate command core writes the output bundle") {
  TempDir tmp;
  write_file(tmp.file("config.json"), R"({
    "seed": 5,
    "suite": {"n_questions": 6, "mu": [0.5, 0.9], "sigma": [0.1, 0.2]},
    "strategies": ["fixed_bon", "optscale0"],
    "n_caps": [4, 8],
    "policy": {"s_min": 0.9, "alpha": 0.9}
  })");

  REQUIRE(optscale_simulate(tmp.file("config.json").c_str(),
                            tmp.file("out").c_str(), nullptr) == OPTSCALE_OK);
  CHECK(fs::exists(tmp.file("out") + "/report.csv"));
  CHECK(fs::exists(tmp.file("out") + "/summary.json"));
  CHECK(fs::exists(tmp.file("out") + "/chart.svg"));

  // a seed override changes the report
  const uint64_t other_seed = 99;
  REQUIRE(optscale_simulate(tmp.file("config.json").c_str(),
                            tmp.file("out2").c_str(), &other_seed) ==
          OPTSCALE_OK);
  std::ifstream a(tmp.file("out") + "/report.csv"),
      b(tmp.file("out2") + "/report.csv");
  std::string ta((std::istreambuf_iterator<char>(a)),
                 std::istreambuf_iterator<char>());
  std::string tb((std::istreambuf_iterator<char>(b)),
                 std::istreambuf_iterator<char>());
  CHECK(ta != tb);

  CHECK(optscale_simulate(tmp.file("absent.json").c_str(),
                          tmp.file("out3").c_str(), nullptr) ==
        OPTSCALE_ERR_IO);
}

TEST_CASE("replay command core") {
  TempDir tmp;
  std::string log;
  for (unsigned q = 0; q < 4; ++q) {
    for (unsigned i = 0; i < 12; ++i) {
      log += score_line("q" + std::to_string(q), i,
                        0.3 + 0.04 * ((i * 7 + q) % 12), 80, "K" +
                        std::to_string(i % 3));
    }
  }
  write_file(tmp.file("log.jsonl"), log);

  optscale_policy_t pol = default_policy();
  pol.s_min = 0.6;
  pol.n_max = 12;
  REQUIRE(optscale_replay(tmp.file("log.jsonl").c_str(), &pol,
                          OPTSCALE_FIT_MLE, nullptr, 3,
                          tmp.file("rp").c_str()) == OPTSCALE_OK);
  CHECK(fs::exists(tmp.file("rp") + "/replay.csv"));
  CHECK(fs::exists(tmp.file("rp") + "/replay_summary.json"));

  std::ifstream in(tmp.file("rp") + "/replay.csv");
  std::string csv((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  CHECK(csv.find("question_id,n_used") == 0);
  int rows = 0;
  for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos;
       pos += 2) {
    ++rows;
  }
  CHECK(rows == 5);  // header + 4 questions
}
