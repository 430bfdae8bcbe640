#include "rulesel/stats.hpp"

#include <cmath>
#include <unordered_map>

namespace rulesel {

Eigen::MatrixXd covariance(const ScoreMatrix& S) {
  const Eigen::Index n = S.rows();
  if (n < 2)
    throw NumericalError("covariance needs at least 2 rows, got " +
                         std::to_string(n));
  const Eigen::MatrixXd centered =
      S.entries().rowwise() - S.entries().colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(n);
}

CorrelationMatrix correlation(const ScoreMatrix& S) {
  const Eigen::MatrixXd cov = covariance(S);
  const Eigen::Index r = cov.rows();
  for (Eigen::Index i = 0; i < r; ++i)
    if (cov(i, i) <= 0.0) throw ZeroVarianceColumn(static_cast<int>(i));

  CorrelationMatrix out;
  out.dim = static_cast<int>(r);
  out.entries.resize(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      out.entries(i, j) =
          i == j ? 1.0 : cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
  return out;
}

double rule_correlation(const ScoreMatrix& S) {
  const CorrelationMatrix corr = correlation(S);
  const Eigen::MatrixXd dev =
      corr.entries - Eigen::MatrixXd::Identity(corr.dim, corr.dim);
  return dev.norm() / corr.dim;
}

double rule_correlation_pairwise(const ScoreMatrix& S) {
  const CorrelationMatrix corr = correlation(S);
  double sum = 0.0;
  for (int i = 0; i < corr.dim; ++i)
    for (int j = 0; j < corr.dim; ++j)
      if (i != j) sum += corr.entries(i, j) * corr.entries(i, j);
  return std::sqrt(sum) / corr.dim;
}

double volume(const ScoreMatrix& S) {
  const Eigen::Index r = S.cols();
  double norm_product = 1.0;
  for (Eigen::Index j = 0; j < r; ++j) {
    const double nrm = S.entries().col(j).norm();
    if (nrm <= 0.0) throw ZeroNormColumn(static_cast<int>(j));
    norm_product *= nrm;
  }
  const Eigen::MatrixXd gram = S.entries().transpose() * S.entries();
  const double det = gram.determinant();
  if (det <= 0.0) return 0.0;  // linearly dependent columns
  return std::min(std::sqrt(det) / norm_product, 1.0);
}

double mse(const ScoreMatrix& S, const GroundTruthVector& gt) {
  if (static_cast<std::size_t>(S.rows()) != gt.size())
    throw ConfigError("score matrix and ground truth differ in length");
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < gt.size(); ++i) pos.emplace(gt.ids[i], i);

  const Eigen::VectorXd row_mean = S.entries().rowwise().mean();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    auto it = pos.find(S.row_ids()[i]);
    if (it == pos.end())
      throw ConfigError("sample id missing from ground truth: " +
                        S.row_ids()[i]);
    const double d = row_mean(i) - gt.values[it->second];
    sum += d * d;
  }
  return sum / static_cast<double>(S.rows());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ConfigError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw NumericalError("pearson needs at least 2 points");

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0 || syy <= 0)
    throw NumericalError("pearson undefined: zero variance input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace rulesel
