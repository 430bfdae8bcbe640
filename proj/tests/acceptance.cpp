// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each check is self-contained and uses independent oracles
// (enumeration, grid search, closed forms) rather than the library's own
// computation wherever the value is derived.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rulesel/btmodel.hpp"
#include "rulesel/dataset.hpp"
#include "rulesel/dpp.hpp"
#include "rulesel/evalharness.hpp"
#include "rulesel/pipeline.hpp"
#include "rulesel/prompts.hpp"
#include "rulesel/rng.hpp"
#include "rulesel/select.hpp"
#include "rulesel/stats.hpp"

using namespace rulesel;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok,
            const std::string& detail = "") {
  std::printf("%s  criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ScoreMatrix random_scores(int n, int r, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd M(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) M(i, j) = rng.uniform();
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
  std::vector<int> cols(static_cast<std::size_t>(r));
  std::iota(cols.begin(), cols.end(), 0);
  return ScoreMatrix(std::move(ids), std::move(cols), std::move(M));
}

// --------------------------------------------------------------------------
// 1. k-DPP sampler exactness against the enumerated law

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  const int draws = 100000;

  for (int kernel_id = 0; kernel_id < 10 && ok; ++kernel_id) {
    const Kernel K =
        build_kernel(random_scores(8, 5, 100 + static_cast<std::uint64_t>(kernel_id)));
    const EigenDecomposition eig = eig_sym(K);
    for (int k = 1; k <= 3 && ok; ++k) {
      const auto exact = kdpp_distribution(K, k);
      std::map<std::vector<int>, int> counts;
      Rng rng(500 + static_cast<std::uint64_t>(kernel_id * 3 + k));
      for (int t = 0; t < draws; ++t) ++counts[sample_kdpp(K, eig, k, rng)];
      for (const auto& [subset, p] : exact) {
        const double freq = static_cast<double>(counts[subset]) / draws;
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / draws);
        if (std::abs(freq - p) > 4 * se) {
          ok = false;
          std::ostringstream d;
          d << "kernel " << kernel_id << " k=" << k << " freq " << freq
            << " vs p " << p;
          detail = d.str();
          break;
        }
      }
    }
  }
  const double secs = elapsed_s(t0);
  if (ok && secs >= 30.0) {
    ok = false;
    detail = "runtime " + std::to_string(secs) + "s exceeds 30s";
  }
  report(1, "k-DPP frequencies match the exact law (4 SE, <30s)", ok, detail);
}

// --------------------------------------------------------------------------
// 2. Pair marginal identity by exhaustive enumeration of the point process

void criterion_2() {
  bool ok = true;
  std::string detail;

  for (int trial = 0; trial < 20 && ok; ++trial) {
    Rng rng(300 + static_cast<std::uint64_t>(trial));
    const int R = 2 + static_cast<int>(rng.index(3));  // 2..4

    // random marginal kernel: eigenvalues strictly inside (0,1)
    Eigen::MatrixXd A(R, R);
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < R; ++j) A(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd lambda(R);
    for (int i = 0; i < R; ++i) lambda(i) = 0.05 + 0.9 * rng.uniform();
    const Eigen::MatrixXd K = Q * lambda.asDiagonal() * Q.transpose();

    // enumerate P(Y = S) through the equivalent L-ensemble
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(R, R);
    const Eigen::MatrixXd L = K * (I - K).inverse();
    const double normalizer = (I + L).determinant();

    auto subset_prob = [&](unsigned mask) {
      std::vector<int> items;
      for (int i = 0; i < R; ++i)
        if (mask & (1u << i)) items.push_back(i);
      Eigen::MatrixXd sub(items.size(), items.size());
      for (std::size_t a = 0; a < items.size(); ++a)
        for (std::size_t b = 0; b < items.size(); ++b)
          sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              L(items[a], items[b]);
      const double det = items.empty() ? 1.0 : sub.determinant();
      return det / normalizer;
    };

    for (int i = 0; i < R && ok; ++i)
      for (int j = i + 1; j < R && ok; ++j) {
        double marginal = 0.0;
        for (unsigned mask = 0; mask < (1u << R); ++mask)
          if ((mask & (1u << i)) && (mask & (1u << j)))
            marginal += subset_prob(mask);
        const double closed = K(i, i) * K(j, j) - K(i, j) * K(i, j);
        const double lib = marginal_pair_probability(Kernel(K), i, j);
        if (std::abs(marginal - closed) > 1e-9 ||
            std::abs(lib - closed) > 1e-9) {
          ok = false;
          std::ostringstream d;
          d << "trial " << trial << " enumerated " << marginal << " closed "
            << closed << " library " << lib;
          detail = d.str();
        }
      }
  }
  report(2, "pair marginal equals K_ii*K_jj - K_ij^2 (1e-9)", ok, detail);
}

// --------------------------------------------------------------------------
// 3. Rule-correlation dual routes and the identical-column constant

void criterion_3() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 1000 && ok; ++seed) {
    const int n = 10 + static_cast<int>(seed % 40);
    const int r = 2 + static_cast<int>(seed % 5);
    const auto S = random_scores(n, r, 7000 + seed);
    const double a = rule_correlation(S);
    const double b = rule_correlation_pairwise(S);
    if (std::abs(a - b) > 1e-12) {
      ok = false;
      detail = "routes differ by " + std::to_string(std::abs(a - b));
    }
  }

  if (ok) {
    Eigen::MatrixXd M(3, 2);
    M << 0.1, 0.1, 0.9, 0.9, 0.4, 0.4;
    const ScoreMatrix S({"a", "b", "c"}, {0, 1}, M);
    const double rho = rule_correlation(S);
    if (std::abs(rho - 0.70711) > 1e-5 ||
        std::abs(rho - std::sqrt(2.0) / 2) > 1e-9) {
      ok = false;
      detail = "identical-column value " + std::to_string(rho);
    }
  }
  report(3, "rule correlation: dual routes (1e-12) and 0.70711 constant", ok,
         detail);
}

// --------------------------------------------------------------------------
// 4. DPP subsets are less correlated than random subsets

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticModelConfig cfg;
    cfg.n = 500;
    cfg.total_rules = 12;
    cfg.groups = {4, 4, 4};
    cfg.group_noise = 0.2;
    cfg.rule_noise = 0.02;
    cfg.seed = 900 + seed;
    const auto [S, gt] = synthetic_scores(cfg);
    Rng rng = Rng::derive(900 + seed, "acceptance/dpp-vs-random");
    const auto res = dpp_vs_random(S, nullptr, 3, 100, rng);
    if (res.mean_rc_dpp < res.mean_rc_random) ++wins;
  }
  const double secs = elapsed_s(t0);
  bool ok = wins >= 9;
  std::string detail = std::to_string(wins) + "/10 seeds";
  if (ok && secs >= 60.0) {
    ok = false;
    detail = "runtime " + std::to_string(secs) + "s exceeds 60s";
  }
  report(4, "mean rule correlation: DPP < random in >=9/10 seeds (<60s)", ok,
         detail);
}

// --------------------------------------------------------------------------
// 5. Higher rule correlation predicts higher estimation error

void criterion_5() {
  int positive = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticModelConfig cfg;
    cfg.n = 500;
    cfg.total_rules = 12;
    cfg.groups = {4, 4, 4};
    cfg.group_noise = 0.2;
    cfg.rule_noise = 0.02;
    cfg.seed = 1200 + seed;
    const auto [S, gt] = synthetic_scores(cfg);
    Rng rng = Rng::derive(1200 + seed, "acceptance/sweep");
    const auto sweep = correlation_vs_mse_sweep(S, gt, 3, 10000, rng);
    if (sweep.pearson > 0.0) ++positive;
  }
  report(5, "Pearson(rho, mse) positive over exhaustive r=3 sweep in >=8/10",
         positive >= 8, std::to_string(positive) + "/10 seeds");
}

// --------------------------------------------------------------------------
// 6. Bradley-Terry: grid-search oracle and strength recovery

void criterion_6() {
  bool ok = true;
  std::string detail;

  const std::vector<ComparisonRecord> records{
      {"i", "j", 3}, {"j", "i", 1}, {"j", "k", 3},
      {"k", "j", 1}, {"i", "k", 3}, {"k", "i", 1}};
  BTOptions opts;
  opts.smoothing = 0.0;
  const BTFit fit = fit_bradley_terry(records, opts);

  // independent dense grid search over mean-zero beta
  auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(
        std::find(fit.ids.begin(), fit.ids.end(), s) - fit.ids.begin());
  };
  auto loglik = [&](double b0, double b1) {
    const double v[3] = {std::exp(b0), std::exp(b1), std::exp(-b0 - b1)};
    double ll = 0;
    for (const auto& r : records)
      ll += r.count * (std::log(v[idx(r.winner)]) -
                       std::log(v[idx(r.winner)] + v[idx(r.loser)]));
    return ll;
  };
  double best0 = 0, best1 = 0, best_ll = -1e300;
  auto scan = [&](double c0, double c1, double radius, double step) {
    for (double b0 = c0 - radius; b0 <= c0 + radius + 1e-15; b0 += step)
      for (double b1 = c1 - radius; b1 <= c1 + radius + 1e-15; b1 += step) {
        const double ll = loglik(b0, b1);
        if (ll > best_ll) best_ll = ll, best0 = b0, best1 = b1;
      }
  };
  scan(0, 0, 3.0, 0.01);
  scan(best0, best1, 0.02, 1e-3);
  const double oracle[3] = {best0, best1, -best0 - best1};
  for (int c = 0; c < 3; ++c)
    if (std::abs(fit.beta[static_cast<std::size_t>(c)] - oracle[c]) > 5e-3) {
      ok = false;
      detail = "beta[" + std::to_string(c) + "] off by " +
               std::to_string(std::abs(fit.beta[static_cast<std::size_t>(c)] -
                                       oracle[c]));
    }

  int recovered = 0;
  if (ok) {
    const std::vector<double> truth{0.8, 0.3, 0.0, -0.4, -0.7};
    for (int trial = 0; trial < 20; ++trial) {
      Rng rng(1500 + static_cast<std::uint64_t>(trial));
      std::vector<ComparisonRecord> recs;
      for (std::size_t i = 0; i < truth.size(); ++i)
        for (std::size_t j = i + 1; j < truth.size(); ++j) {
          const double p = 1.0 / (1.0 + std::exp(-(truth[i] - truth[j])));
          int wins_i = 0;
          for (int t = 0; t < 500; ++t)
            if (rng.uniform() < p) ++wins_i;
          if (wins_i > 0)
            recs.emplace_back("p" + std::to_string(i), "p" + std::to_string(j),
                              wins_i);
          if (wins_i < 500)
            recs.emplace_back("p" + std::to_string(j), "p" + std::to_string(i),
                              500 - wins_i);
        }
      const BTFit f = fit_bradley_terry(recs, opts);
      std::vector<double> est(truth.size());
      for (std::size_t i = 0; i < f.ids.size(); ++i)
        est[static_cast<std::size_t>(std::stoi(f.ids[i].substr(1)))] =
            f.beta[i];
      bool ranked = f.converged;
      for (std::size_t i = 0; i + 1 < est.size(); ++i)
        ranked = ranked && est[i] > est[i + 1];
      if (ranked) ++recovered;
    }
    if (recovered < 19) {
      ok = false;
      detail = std::to_string(recovered) + "/20 recoveries";
    }
  }
  report(6, "Bradley-Terry: grid oracle (5e-3) and >=19/20 rank recovery", ok,
         detail);
}

// --------------------------------------------------------------------------
// 7. Gumbel top-k equals sequential sampling without replacement

void criterion_7() {
  const QualityVector v({"s0", "s1", "s2", "s3"}, {0.1, 0.45, 0.7, 1.0});
  const double temperature = 0.6;
  const auto p = softmax_distribution(v, temperature);

  const int draws = 200000;
  Rng rng(1700);
  std::map<std::set<std::string>, int> counts;
  for (int t = 0; t < draws; ++t) {
    const auto sel = gumbel_topk(v, 2, temperature, rng);
    ++counts[{sel[0], sel[1]}];
  }

  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < 4 && ok; ++i)
    for (std::size_t j = i + 1; j < 4 && ok; ++j) {
      // both draw orders contribute to the unordered inclusion probability
      const double prob = p[i] * p[j] / (1.0 - p[i]) +
                          p[j] * p[i] / (1.0 - p[j]);
      const std::set<std::string> key{"s" + std::to_string(i),
                                      "s" + std::to_string(j)};
      const double freq =
          static_cast<double>(counts.count(key) ? counts.at(key) : 0) / draws;
      const double se = std::sqrt(prob * (1 - prob) / draws);
      if (std::abs(freq - prob) > 4 * se) {
        ok = false;
        std::ostringstream d;
        d << "pair {" << i << "," << j << "} freq " << freq << " vs " << prob;
        detail = d.str();
      }
    }
  report(7, "Gumbel top-k matches sequential softmax sampling (4 SE)", ok,
         detail);
}

// --------------------------------------------------------------------------
// 8. Protocol constants: subset cap and trial count

void criterion_8() {
  bool ok = true;
  std::string detail;

  auto binom = [](int n, int k) {
    double v = 1;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
  };
  Rng rng(1800);
  for (int r : {1, 2, 3, 10, 25}) {
    const auto subsets = sample_rule_subsets(50, r, 10000, rng);
    const std::size_t expected = static_cast<std::size_t>(
        std::min(10000.0, binom(50, r)));
    if (subsets.size() != expected) {
      ok = false;
      detail = "r=" + std::to_string(r) + " drew " +
               std::to_string(subsets.size()) + " subsets, expected " +
               std::to_string(expected);
    }
  }

  if (ok) {
    const EvaluationOptions defaults;
    if (defaults.subset_cap != 10000 || defaults.dpp_trials != 100) {
      ok = false;
      detail = "default protocol constants are not 10000/100";
    }
  }
  if (ok) {
    SyntheticModelConfig cfg;
    cfg.n = 200;
    cfg.total_rules = 8;
    cfg.groups = {4, 4};
    cfg.seed = 1801;
    const auto [S, gt] = synthetic_scores(cfg);
    Rng trial_rng(1802);
    const auto res = dpp_vs_random(S, &gt, 3, 100, trial_rng);
    if (res.trials != 100 || res.mse_dpp.size() != 100 ||
        res.mse_random.size() != 100) {
      ok = false;
      detail = "trial counters " + std::to_string(res.trials) + "/" +
               std::to_string(res.mse_dpp.size());
    }
  }
  report(8, "protocol constants: min{10000, C(50,r)} subsets, 100 DPP trials",
         ok, detail);
}

// --------------------------------------------------------------------------
// 9. End-to-end determinism of the mock pipeline

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_9() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  const fs::path base = fs::temp_directory_path() / "rulesel_acceptance_e2e";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path dataset = base / "pool.jsonl";
  {
    std::ofstream out(dataset);
    for (int i = 0; i < 1000; ++i)
      out << "{\"text\":\"pool document " << i << " body\"}\n";
  }

  auto run = [&](const fs::path& out_dir, int workers) {
    RunConfig cfg;
    cfg.selection.total_rules = 12;
    cfg.selection.selected_rules = 4;
    cfg.selection.batch_size = 200;
    cfg.selection.data_budget = 50;
    cfg.selection.seed = 42;
    cfg.selection.temperature = 0.5;
    cfg.dataset_path = dataset;
    cfg.out_dir = out_dir;
    cfg.rater_kind = "mock";
    cfg.mock_groups = {3, 3, 3, 3};
    cfg.max_in_flight = workers;
    cmd_generate_rules(cfg);
    cmd_rate(cfg);
    cmd_select_rules(cfg);
    cmd_select_data(cfg);
    return slurp(out_dir / "manifest.json");
  };

  const std::string m1 = run(base / "run1", 1);
  const std::string m2 = run(base / "run2", 1);
  const std::string m8 = run(base / "run8", 8);
  if (m1.empty() || m1 != m2) {
    ok = false;
    detail = "repeat runs differ";
  } else if (m1 != m8) {
    ok = false;
    detail = "1-worker and 8-worker runs differ";
  }

  const double secs = elapsed_s(t0);
  if (ok && secs >= 60.0) {
    ok = false;
    detail = "runtime " + std::to_string(secs) + "s exceeds 60s";
  }
  report(9, "end-to-end mock pipeline manifests are bit-identical (<60s)", ok,
         detail);
}

// --------------------------------------------------------------------------
// 10. Prompt templates match the golden fixtures

void criterion_10() {
  const TaskSpec spec(
      "Improve large language model performance on mathematical reasoning "
      "benchmarks such as GSM8K and MATH, covering arithmetic, algebra, and "
      "proof-style reasoning.",
      "SlimPajama, a deduplicated open-source corpus of web text, books, "
      "academic papers, and code, with document-level source tags.",
      "Math");
  const Rule rule(3, "Grammar Quality",
                  "Exclude texts with frequent grammatical errors or "
                  "incoherent sentence structure.");
  const DataSample a("a", "Let x be an integer such that x + 2 = 5. Then x = 3.");
  const DataSample b("b", "buy cheap watches online best prices click here");

  const std::vector<std::pair<std::string, std::string>> cases{
      {"rule_generation_prompt.txt", build_rule_generation_prompt(spec, 50)},
      {"rating_prompt.txt", build_individual_rating_prompt(spec, &rule, a)},
      {"rating_prompt_norule.txt",
       build_individual_rating_prompt(spec, nullptr, a)},
      {"comparison_prompt.txt", build_pairwise_prompt(spec, rule, a, b)},
      {"comparison_prompt_norule.txt",
       build_pairwise_prompt(spec, std::nullopt, a, b)},
  };

  bool ok = true;
  std::string detail;
  for (const auto& [name, rendered] : cases) {
    const std::string golden =
        slurp(fs::path(RULESEL_GOLDEN_DIR) / name);
    if (golden.empty() || rendered != golden) {
      ok = false;
      detail = name + (golden.empty() ? " missing" : " differs");
      break;
    }
  }
  report(10, "rendered prompts are byte-identical to golden files", ok, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures == 0) {
    std::printf("ALL ACCEPTANCE CRITERIA PASSED\n");
    return 0;
  }
  std::printf("%d criterion(s) FAILED\n", failures);
  return 1;
}
