#ifndef RULESEL_STATS_HPP
#define RULESEL_STATS_HPP

#include <Eigen/Dense>
#include <span>

#include "rulesel/score_matrix.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

struct CorrelationMatrix {
  int dim = 0;
  Eigen::MatrixXd entries;  // symmetric, unit diagonal
};

// Population (1/n) covariance of the score columns.
Eigen::MatrixXd covariance(const ScoreMatrix& S);

// Sample correlation matrix; throws ZeroVarianceColumn on constant columns.
CorrelationMatrix correlation(const ScoreMatrix& S);

// Rule correlation: (1/r) * ||Corr(S) - I||_F.
double rule_correlation(const ScoreMatrix& S);

// Same quantity via the pairwise sum (1/r) * sqrt(sum_{i!=j} Corr_ij^2);
// kept as an independent route for cross-checking.
double rule_correlation_pairwise(const ScoreMatrix& S);

// Normalized Gram determinant: sqrt(det(S^T S)) / prod ||col_i||.
// 1 for mutually orthogonal columns, 0 for linearly dependent ones.
double volume(const ScoreMatrix& S);

// (1/n) * || row-mean(S) - gt ||^2, aligned by sample id.
double mse(const ScoreMatrix& S, const GroundTruthVector& gt);

double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace rulesel

#endif  // RULESEL_STATS_HPP
