#include "rulesel/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "rulesel/dpp.hpp"
#include "rulesel/stats.hpp"

namespace rulesel {

void SyntheticModelConfig::validate() const {
  if (n < 2) throw ConfigError("synthetic model needs n >= 2");
  if (total_rules < 1) throw ConfigError("synthetic model needs R >= 1");
  if (groups.empty()) throw ConfigError("synthetic model needs group sizes");
  int total = 0;
  for (int g : groups) {
    if (g < 1) throw ConfigError("group sizes must be >= 1");
    total += g;
  }
  if (total != total_rules)
    throw ConfigError("group sizes must sum to R");
  if (!(group_noise >= 0) || !std::isfinite(group_noise) ||
      !(rule_noise >= 0) || !std::isfinite(rule_noise))
    throw ConfigError("noise parameters must be finite and >= 0");
}

namespace {

double binomial_capped(int n, int k, double cap) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) {
    v = v * (n - i) / (i + 1);
    if (v > cap) return cap + 1;  // enough to know we exceed the cap
  }
  return v;
}

double mean(const std::vector<double>& xs) {
  return xs.empty() ? 0.0
                    : std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

}  // namespace

std::vector<std::vector<int>> sample_rule_subsets(int R, int r, int cap,
                                                  Rng& rng) {
  if (r < 1 || r > R) throw ConfigError("need 1 <= r <= R");
  std::vector<std::vector<int>> out;

  if (binomial_capped(R, r, cap) <= cap) {
    // exhaustive enumeration in lexicographic order
    std::vector<int> subset(r);
    std::iota(subset.begin(), subset.end(), 0);
    for (;;) {
      out.push_back(subset);
      int i = r - 1;
      while (i >= 0 && subset[i] == R - r + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < r; ++j) subset[j] = subset[j - 1] + 1;
    }
    return out;
  }

  // rejection sampling against a seen-set; collisions are negligible at
  // cap = 1e4 against C(50,10) ~ 1e10
  std::set<std::vector<int>> seen;
  while (static_cast<int>(out.size()) < cap) {
    std::vector<int> pool(R);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> subset(r);
    for (int i = 0; i < r; ++i) {
      const std::size_t j = i + rng.index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      subset[i] = pool[i];
    }
    std::sort(subset.begin(), subset.end());
    if (seen.insert(subset).second) out.push_back(std::move(subset));
  }
  return out;
}

SweepResult correlation_vs_mse_sweep(const ScoreMatrix& S,
                                     const GroundTruthVector& gt, int r,
                                     int cap, Rng& rng) {
  const auto subsets = sample_rule_subsets(static_cast<int>(S.cols()), r, cap,
                                           rng);
  SweepResult res;
  for (const auto& subset : subsets) {
    std::vector<int> cols;
    cols.reserve(subset.size());
    for (int j : subset) cols.push_back(S.col_ids()[static_cast<std::size_t>(j)]);
    const ScoreMatrix sub = S.submatrix(cols);
    try {
      const double rho = rule_correlation(sub);
      res.rho.push_back(rho);
      res.mse.push_back(mse(sub, gt));
    } catch (const ZeroVarianceColumn&) {
      ++res.skipped;
    }
  }
  if (res.rho.size() < 2)
    throw NumericalError(
        "correlation_vs_mse_sweep: fewer than 2 valid subsets");
  res.pearson = pearson(res.rho, res.mse);
  return res;
}

DppVsRandomResult dpp_vs_random(const ScoreMatrix& S,
                                const GroundTruthVector* gt, int r, int trials,
                                Rng& rng) {
  const Kernel K = build_kernel(S);
  const EigenDecomposition eig = eig_sym(K);

  DppVsRandomResult res;
  res.trials = trials;
  std::vector<double> rc_dpp, rc_random;

  const int R = static_cast<int>(S.cols());
  for (int t = 0; t < trials; ++t) {
    const std::vector<int> dpp_subset = sample_kdpp(K, eig, r, rng);

    std::vector<int> pool(R);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> random_subset(r);
    for (int i = 0; i < r; ++i) {
      const std::size_t j = i + rng.index(pool.size() - i);
      std::swap(pool[i], pool[static_cast<std::size_t>(j)]);
      random_subset[i] = pool[i];
    }
    std::sort(random_subset.begin(), random_subset.end());

    auto to_cols = [&](const std::vector<int>& subset) {
      std::vector<int> cols;
      cols.reserve(subset.size());
      for (int j : subset)
        cols.push_back(S.col_ids()[static_cast<std::size_t>(j)]);
      return cols;
    };
    const ScoreMatrix sub_dpp = S.submatrix(to_cols(dpp_subset));
    const ScoreMatrix sub_rand = S.submatrix(to_cols(random_subset));

    rc_dpp.push_back(rule_correlation(sub_dpp));
    rc_random.push_back(rule_correlation(sub_rand));
    if (gt) {
      res.mse_dpp.push_back(mse(sub_dpp, *gt));
      res.mse_random.push_back(mse(sub_rand, *gt));
    }
  }

  res.mean_rc_dpp = mean(rc_dpp);
  res.mean_rc_random = mean(rc_random);
  res.mean_mse_dpp = mean(res.mse_dpp);
  res.mean_mse_random = mean(res.mse_random);
  return res;
}

double winning_rate(const std::vector<double>& mse_trials,
                    double baseline_mse) {
  if (mse_trials.empty()) throw ConfigError("winning_rate: empty trials");
  double wins = 0.0;
  for (double v : mse_trials) {
    if (v < baseline_mse)
      wins += 1.0;
    else if (v == baseline_mse)
      wins += 0.5;
  }
  return wins / static_cast<double>(mse_trials.size());
}

std::pair<ScoreMatrix, GroundTruthVector> synthetic_scores(
    const SyntheticModelConfig& cfg) {
  cfg.validate();

  Rng gt_rng = Rng::derive(cfg.seed, "synthetic/gt");
  Rng group_rng = Rng::derive(cfg.seed, "synthetic/group");
  Rng rule_rng = Rng::derive(cfg.seed, "synthetic/rule");

  std::vector<std::string> ids(static_cast<std::size_t>(cfg.n));
  std::vector<double> gt_values(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    ids[static_cast<std::size_t>(i)] = "synthetic:" + std::to_string(i);
    gt_values[static_cast<std::size_t>(i)] = gt_rng.uniform();
  }

  // shared per-(sample, group) perturbations
  const int num_groups = static_cast<int>(cfg.groups.size());
  Eigen::MatrixXd group_noise(cfg.n, num_groups);
  for (int i = 0; i < cfg.n; ++i)
    for (int g = 0; g < num_groups; ++g)
      group_noise(i, g) = cfg.group_noise * group_rng.normal();

  Eigen::MatrixXd entries(cfg.n, cfg.total_rules);
  int col = 0;
  for (int g = 0; g < num_groups; ++g) {
    for (int m = 0; m < cfg.groups[static_cast<std::size_t>(g)]; ++m, ++col) {
      for (int i = 0; i < cfg.n; ++i) {
        const double v = gt_values[static_cast<std::size_t>(i)] +
                         group_noise(i, g) +
                         cfg.rule_noise * rule_rng.normal();
        entries(i, col) = std::clamp(v, 0.0, 1.0);
      }
    }
  }

  std::vector<int> col_ids(static_cast<std::size_t>(cfg.total_rules));
  std::iota(col_ids.begin(), col_ids.end(), 0);
  return {ScoreMatrix(ids, std::move(col_ids), std::move(entries)),
          GroundTruthVector(std::move(ids), std::move(gt_values))};
}

double norule_baseline(Rater& rater, const TaskSpec& spec,
                       const std::vector<DataSample>& batch,
                       const GroundTruthVector& gt) {
  if (batch.size() != gt.size())
    throw ConfigError("norule_baseline: batch and ground truth differ");
  std::vector<std::string> row_ids;
  Eigen::MatrixXd entries(batch.size(), 1);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    row_ids.push_back(batch[i].id);
    entries(static_cast<Eigen::Index>(i), 0) =
        rater.rate(spec, nullptr, batch[i]);
  }
  const ScoreMatrix S(std::move(row_ids), {0}, std::move(entries));
  return mse(S, gt);
}

GroundTruthVector pairwise_groundtruth_run(Rater& rater, const TaskSpec& spec,
                                           const std::vector<DataSample>& batch,
                                           PairwiseRunStats* stats) {
  if (batch.size() < 2)
    throw ConfigError("pairwise ground truth needs at least 2 samples");

  ChoiceMap forward, backward;
  int queried = 0;
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (std::size_t j = i + 1; j < batch.size(); ++j) {
      forward[{batch[i].id, batch[j].id}] =
          rater.compare(spec, std::nullopt, batch[i], batch[j]);
      backward[{batch[j].id, batch[i].id}] =
          rater.compare(spec, std::nullopt, batch[j], batch[i]);
      queried += 2;
    }

  ConsistencyReport report;
  const auto records = filter_consistent(forward, backward, &report);
  if (stats) {
    stats->queried = queried;
    stats->consistency = report;
  }

  const BTFit fit = fit_bradley_terry(records);
  return ground_truth_from_fit(fit);
}

SubsetExperimentReport run_evaluation(const ScoreMatrix& S,
                                      const GroundTruthVector& gt,
                                      double norule_mse,
                                      const EvaluationOptions& opts,
                                      std::uint64_t master_seed) {
  const int R = static_cast<int>(S.cols());
  const Kernel K = build_kernel(S);
  const EigenDecomposition eig = eig_sym(K);
  const int rank = numerical_rank(eig);
  const int max_r = std::min(opts.max_r.value_or(R), rank);

  SubsetExperimentReport report;
  for (int r = 1; r <= max_r; ++r) {
    Rng sweep_rng = Rng::derive(master_seed, "eval/sweep", r);
    Rng trial_rng = Rng::derive(master_seed, "eval/trials", r);

    SubsetRecord rec;
    rec.r = r;
    try {
      const SweepResult sweep =
          correlation_vs_mse_sweep(S, gt, r, opts.subset_cap, sweep_rng);
      rec.num_subsets = static_cast<int>(sweep.rho.size()) + sweep.skipped;
      rec.pearson_rho_vs_mse = sweep.pearson;
    } catch (const NumericalError&) {
      // r = rank corner cases can leave too few valid subsets; the DPP
      // comparison below still runs
      rec.num_subsets = 0;
      rec.pearson_rho_vs_mse = std::numeric_limits<double>::quiet_NaN();
    }

    const DppVsRandomResult cmp =
        dpp_vs_random(S, &gt, r, opts.dpp_trials, trial_rng);
    rec.mean_rc_dpp = cmp.mean_rc_dpp;
    rec.mean_rc_random = cmp.mean_rc_random;
    rec.mean_mse_dpp = cmp.mean_mse_dpp;
    rec.mean_mse_random = cmp.mean_mse_random;
    rec.win_rate_vs_norule = winning_rate(cmp.mse_dpp, norule_mse);
    rec.win_rate_vs_baseline = winning_rate(cmp.mse_dpp, cmp.mean_mse_random);
    report.per_r.push_back(rec);
  }
  return report;
}

std::vector<std::tuple<double, double, int>> mse_histogram(
    const std::vector<double>& values, int bins) {
  if (values.empty() || bins < 1)
    throw ConfigError("mse_histogram: need values and bins >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double width = std::max((*hi_it - lo) / bins, 1e-12);

  std::vector<std::tuple<double, double, int>> out;
  out.reserve(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b)
    out.emplace_back(lo + b * width, lo + (b + 1) * width, 0);
  for (double v : values) {
    int b = std::min(static_cast<int>((v - lo) / width), bins - 1);
    ++std::get<2>(out[static_cast<std::size_t>(b)]);
  }
  return out;
}

}  // namespace rulesel
