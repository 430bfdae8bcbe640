#include "rulesel/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace rulesel {

namespace {
constexpr double kSymTol = 1e-9;
constexpr double kPsdTol = 1e-8;
constexpr double kRankTol = 1e-8;
constexpr double kProjTol = 1e-12;
}  // namespace

Kernel::Kernel(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw NumericalError("kernel must be square and non-empty");
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol)
    throw NumericalError("kernel asymmetry " + std::to_string(asym) +
                         " exceeds tolerance");
}

Kernel build_kernel(const ScoreMatrix& S, bool center) {
  if (S.rows() == 0 || S.cols() == 0)
    throw NumericalError("cannot build kernel from an empty score matrix");
  Eigen::MatrixXd M = S.entries();
  if (center) M.rowwise() -= M.colwise().mean();
  Eigen::MatrixXd K = M.transpose() * M;
  // enforce exact symmetry against floating-point noise
  K = ((K + K.transpose()) / 2.0).eval();
  return Kernel(std::move(K));
}

EigenDecomposition eig_sym(const Kernel& K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K.entries());
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition failed");

  EigenDecomposition eig;
  eig.eigenvalues = solver.eigenvalues();  // ascending
  eig.eigenvectors = solver.eigenvectors();

  const double lambda_max = std::max(eig.eigenvalues.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues(i) < -kPsdTol * lambda_max)
      throw NumericalError("kernel eigenvalue " +
                           std::to_string(eig.eigenvalues(i)) +
                           " below PSD tolerance; kernel is not S^T S");
    if (eig.eigenvalues(i) < 0) eig.eigenvalues(i) = 0;
  }
  return eig;
}

int numerical_rank(const EigenDecomposition& eig) {
  const double lambda_max = eig.eigenvalues.maxCoeff();
  const double cutoff = kRankTol * lambda_max;
  int rank = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > cutoff) ++rank;
  return rank;
}

std::vector<std::vector<double>> elementary_symmetric(
    const Eigen::VectorXd& eigenvalues, int k) {
  const int R = static_cast<int>(eigenvalues.size());
  if (k < 0 || k > R)
    throw NumericalError("elementary_symmetric: need 0 <= k <= R");
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues(i) < 0)
      throw NumericalError("elementary_symmetric: negative eigenvalue");

  std::vector<std::vector<double>> E(
      static_cast<std::size_t>(k) + 1,
      std::vector<double>(static_cast<std::size_t>(R) + 1, 0.0));
  for (int j = 0; j <= R; ++j) E[0][j] = 1.0;
  for (int l = 1; l <= k; ++l)
    for (int j = 1; j <= R; ++j)
      E[l][j] = E[l][j - 1] + eigenvalues(j - 1) * E[l - 1][j - 1];
  return E;
}

std::vector<int> sample_kdpp(const Kernel& K, int k, Rng& rng) {
  const EigenDecomposition eig = eig_sym(K);
  return sample_kdpp(K, eig, k, rng);
}

std::vector<int> sample_kdpp(const Kernel& K, const EigenDecomposition& eig,
                             int k, Rng& rng) {
  const int R = K.dim();
  if (k < 1 || k > R)
    throw NumericalError("sample_kdpp: need 1 <= k <= R");
  const int rank = numerical_rank(eig);
  if (k > rank) throw RankDeficient(k, rank);

  // Phase 1: choose k eigenvector indices; index j enters with probability
  // lambda_j * e_{l-1}(1..j-1) / e_l(1..j) given l slots remain.
  const auto E = elementary_symmetric(eig.eigenvalues, k);
  std::vector<int> chosen_eigs;
  int remaining = k;
  for (int j = R; j >= 1 && remaining > 0; --j) {
    double p;
    if (j == remaining || E[remaining][j] <= 0.0) {
      p = 1.0;  // must take all that are left
    } else {
      p = eig.eigenvalues(j - 1) * E[remaining - 1][j - 1] / E[remaining][j];
    }
    if (rng.uniform() < p) {
      chosen_eigs.push_back(j - 1);
      --remaining;
    }
  }

  // Phase 2: iteratively pick items with probability proportional to the
  // squared projection onto the current eigenvector subspace, then restrict
  // to the orthogonal complement of the picked coordinate direction.
  Eigen::MatrixXd V(R, k);
  for (int t = 0; t < k; ++t)
    V.col(t) = eig.eigenvectors.col(chosen_eigs[static_cast<std::size_t>(t)]);

  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(k));
  while (V.cols() > 0) {
    const Eigen::VectorXd p = V.rowwise().squaredNorm();
    const double total = p.sum();
    if (total <= kProjTol) throw DegenerateProjection();

    double u = rng.uniform() * total;
    int item = R - 1;
    for (int i = 0; i < R; ++i) {
      u -= p(i);
      if (u <= 0) {
        item = i;
        break;
      }
    }
    selected.push_back(item);

    if (V.cols() == 1) break;

    // Eliminate coordinate `item`: subtract the pivot column from the rest,
    // drop it, and re-orthonormalize the remainder.
    Eigen::Index pivot;
    V.row(item).cwiseAbs().maxCoeff(&pivot);
    if (std::abs(V(item, pivot)) <= kProjTol) throw DegenerateProjection();
    const Eigen::VectorXd pivot_col = V.col(pivot);
    for (Eigen::Index c = 0; c < V.cols(); ++c)
      if (c != pivot)
        V.col(c) -= pivot_col * (V(item, c) / V(item, pivot));
    // remove pivot column
    Eigen::MatrixXd W(R, V.cols() - 1);
    Eigen::Index w = 0;
    for (Eigen::Index c = 0; c < V.cols(); ++c)
      if (c != pivot) W.col(w++) = V.col(c);
    // orthonormalize via thin QR
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(R, W.cols());
    V = std::move(Q);
  }

  std::sort(selected.begin(), selected.end());
  return selected;
}

namespace {

double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
  return v;
}

void enumerate_subsets(int R, int k, std::vector<int>& current, int start,
                       const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(current.size()) == k) {
    fn(current);
    return;
  }
  for (int i = start; i < R; ++i) {
    current.push_back(i);
    enumerate_subsets(R, k, current, i + 1, fn);
    current.pop_back();
  }
}

}  // namespace

std::map<std::vector<int>, double> kdpp_distribution(const Kernel& K, int k) {
  const int R = K.dim();
  if (k < 0 || k > R) throw NumericalError("kdpp_distribution: bad k");
  if (binomial(R, k) > 1e6)
    throw NumericalError("kdpp_distribution: C(R,k) exceeds enumeration guard");

  std::map<std::vector<int>, double> dist;
  double total = 0.0;
  std::vector<int> current;
  enumerate_subsets(R, k, current, 0, [&](const std::vector<int>& subset) {
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        sub(a, b) = K.entries()(subset[static_cast<std::size_t>(a)],
                                subset[static_cast<std::size_t>(b)]);
    const double det = k == 0 ? 1.0 : std::max(sub.determinant(), 0.0);
    dist[subset] = det;
    total += det;
  });
  if (total <= 0)
    throw NumericalError("kdpp_distribution: all size-" + std::to_string(k) +
                         " determinants vanish");
  for (auto& [_, p] : dist) p /= total;
  return dist;
}

double marginal_pair_probability(const Kernel& K, int i, int j) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K.entries());
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo < -kPsdTol || hi > 1.0 + kPsdTol)
    throw NumericalError(
        "marginal kernel eigenvalues must lie in [0,1]; got [" +
        std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const auto& M = K.entries();
  return M(i, i) * M(j, j) - M(i, j) * M(i, j);
}

}  // namespace rulesel
