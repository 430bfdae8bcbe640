#ifndef RULESEL_EVALHARNESS_HPP
#define RULESEL_EVALHARNESS_HPP

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "rulesel/btmodel.hpp"
#include "rulesel/rater.hpp"
#include "rulesel/rng.hpp"
#include "rulesel/score_matrix.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

struct SubsetRecord {
  int r = 0;
  int num_subsets = 0;
  double pearson_rho_vs_mse = 0.0;
  double mean_mse_random = 0.0;
  double mean_mse_dpp = 0.0;
  double mean_rc_random = 0.0;
  double mean_rc_dpp = 0.0;
  double win_rate_vs_norule = 0.0;
  double win_rate_vs_baseline = 0.0;
};

struct SubsetExperimentReport {
  std::vector<SubsetRecord> per_r;
};

struct SyntheticModelConfig {
  int n = 500;
  int total_rules = 12;
  std::vector<int> groups;  // sizes summing to total_rules
  double group_noise = 0.2;
  double rule_noise = 0.02;
  std::uint64_t seed = 0;

  void validate() const;
};

// All size-r subsets when C(R,r) <= cap, else cap distinct uniform subsets.
std::vector<std::vector<int>> sample_rule_subsets(int R, int r, int cap,
                                                  Rng& rng);

struct SweepResult {
  std::vector<double> rho;
  std::vector<double> mse;
  double pearson = 0.0;
  int skipped = 0;  // subsets hitting ZeroVarianceColumn
};

SweepResult correlation_vs_mse_sweep(const ScoreMatrix& S,
                                     const GroundTruthVector& gt, int r,
                                     int cap, Rng& rng);

struct DppVsRandomResult {
  int trials = 0;
  double mean_rc_dpp = 0.0;
  double mean_rc_random = 0.0;
  std::vector<double> mse_dpp;     // empty when no ground truth given
  std::vector<double> mse_random;
  double mean_mse_dpp = 0.0;
  double mean_mse_random = 0.0;
};

DppVsRandomResult dpp_vs_random(const ScoreMatrix& S,
                                const GroundTruthVector* gt, int r, int trials,
                                Rng& rng);

// Fraction of trials beating the baseline; exact ties count 0.5.
double winning_rate(const std::vector<double>& mse_trials,
                    double baseline_mse);

// Synthetic score model: gt ~ U[0,1]; each rule group shares a per-sample
// Normal(0, group_noise) perturbation; each rule adds Normal(0, rule_noise);
// clipped to [0,1].
std::pair<ScoreMatrix, GroundTruthVector> synthetic_scores(
    const SyntheticModelConfig& cfg);

// MSE of a rule-free single-column rating against the ground truth.
double norule_baseline(Rater& rater, const TaskSpec& spec,
                       const std::vector<DataSample>& batch,
                       const GroundTruthVector& gt);

struct PairwiseRunStats {
  int queried = 0;
  ConsistencyReport consistency;
};

// Both presentation orders for every unordered pair, consistency filtering,
// Bradley-Terry fit.
GroundTruthVector pairwise_groundtruth_run(Rater& rater, const TaskSpec& spec,
                                           const std::vector<DataSample>& batch,
                                           PairwiseRunStats* stats = nullptr);

struct EvaluationOptions {
  int subset_cap = 10000;
  int dpp_trials = 100;
  std::optional<int> max_r;  // default: up to R
};

// The full per-r sweep: subset enumeration/sampling, rho-vs-mse Pearson,
// DPP-vs-random means, winning rates against NoRule and random baselines.
SubsetExperimentReport run_evaluation(const ScoreMatrix& S,
                                      const GroundTruthVector& gt,
                                      double norule_mse,
                                      const EvaluationOptions& opts,
                                      std::uint64_t master_seed);

// Histogram bins for MSE distributions: (lo, hi, count) triples.
std::vector<std::tuple<double, double, int>> mse_histogram(
    const std::vector<double>& values, int bins);

}  // namespace rulesel

#endif  // RULESEL_EVALHARNESS_HPP
