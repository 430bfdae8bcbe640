#ifndef RULESEL_BTMODEL_HPP
#define RULESEL_BTMODEL_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rulesel/types.hpp"

namespace rulesel {

struct ComparisonRecord {
  std::string winner;
  std::string loser;
  int count = 1;

  ComparisonRecord(std::string winner_, std::string loser_, int count_ = 1)
      : winner(std::move(winner_)), loser(std::move(loser_)), count(count_) {
    if (winner == loser)
      throw ConfigError("comparison record with winner == loser: " + winner);
    if (count < 1) throw ConfigError("comparison count must be >= 1");
  }
};

enum class Choice { First, Second };

// Key is the ordered presentation (first shown, second shown); value is
// which presented sample the judge preferred.
using ChoiceMap = std::map<std::pair<std::string, std::string>, Choice>;

struct ConsistencyReport {
  int kept = 0;
  int inconsistent = 0;
  int missing = 0;
};

// Keep pair (i,j) only when the (i,j) query and the (j,i) query prefer the
// same underlying sample. Each consistent pair yields one record.
std::vector<ComparisonRecord> filter_consistent(const ChoiceMap& forward,
                                                const ChoiceMap& backward,
                                                ConsistencyReport* report = nullptr);

struct BTFit {
  std::vector<std::string> ids;
  std::vector<double> beta;    // log-strengths, mean zero
  std::vector<double> scores;  // min-max rescaling of beta to [0,1]
  int iterations = 0;
  bool converged = false;

  // P(i beats j) under the fitted model, by position in ids.
  double win_probability(std::size_t i, std::size_t j) const;
};

struct BTOptions {
  double smoothing = 0.1;  // virtual wins per direction for compared pairs
  double tol = 1e-8;
  int max_iter = 10000;
  bool check_ascent = false;  // assert log-likelihood is non-decreasing
};

// Maximum-likelihood Bradley-Terry strengths via the MM iteration
// v_i <- W_i / sum_{j!=i} n_ij / (v_i + v_j).
BTFit fit_bradley_terry(const std::vector<ComparisonRecord>& records,
                        const BTOptions& opts = {});

GroundTruthVector ground_truth_from_fit(const BTFit& fit);

}  // namespace rulesel

#endif  // RULESEL_BTMODEL_HPP
