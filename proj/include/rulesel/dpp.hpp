#ifndef RULESEL_DPP_HPP
#define RULESEL_DPP_HPP

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "rulesel/rng.hpp"
#include "rulesel/score_matrix.hpp"

namespace rulesel {

// Symmetric PSD Gram kernel over rules.
class Kernel {
 public:
  explicit Kernel(Eigen::MatrixXd entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending, clamped to >= 0
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
};

// K = S^T S; entry (i,j) is the inner product of score columns i and j.
// When center is set, columns are mean-centered first (experimental).
Kernel build_kernel(const ScoreMatrix& S, bool center = false);

// Symmetric eigendecomposition with small-negative clamping. Eigenvalues
// below -1e-8 * lambda_max signal a non-PSD kernel (upstream bug).
EigenDecomposition eig_sym(const Kernel& K);

// Count of eigenvalues > 1e-8 * lambda_max.
int numerical_rank(const EigenDecomposition& eig);

// E[l][j] = e_l(lambda_1..lambda_j); table of size (k+1) x (R+1).
std::vector<std::vector<double>> elementary_symmetric(
    const Eigen::VectorXd& eigenvalues, int k);

// Draw a size-k subset with probability det(K_A) / e_k(lambda)
// (L-ensemble k-DPP). Returns sorted indices.
std::vector<int> sample_kdpp(const Kernel& K, int k, Rng& rng);

// Same, reusing a precomputed decomposition of K.
std::vector<int> sample_kdpp(const Kernel& K, const EigenDecomposition& eig,
                             int k, Rng& rng);

// Exact k-DPP law by subset enumeration; test oracle, small R only
// (guards C(R,k) <= 1e6).
std::map<std::vector<int>, double> kdpp_distribution(const Kernel& K, int k);

// Marginal-kernel pair inclusion: P({i,j} subset Y) = K_ii K_jj - K_ij^2.
// Requires eigenvalues in [0,1].
double marginal_pair_probability(const Kernel& K_marginal, int i, int j);

}  // namespace rulesel

#endif  // RULESEL_DPP_HPP
