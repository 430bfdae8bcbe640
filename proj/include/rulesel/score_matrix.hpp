#ifndef RULESEL_SCORE_MATRIX_HPP
#define RULESEL_SCORE_MATRIX_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rulesel/errors.hpp"

namespace rulesel {

// n samples x r rules matrix of quality scores in [0,1].
// Immutable after construction; safe to share across threads.
class ScoreMatrix {
 public:
  ScoreMatrix(std::vector<std::string> row_ids, std::vector<int> col_ids,
              Eigen::MatrixXd entries);

  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<int>& col_ids() const { return col_ids_; }
  const Eigen::MatrixXd& entries() const { return entries_; }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }

  // Column subset in the given order; rows unchanged.
  ScoreMatrix submatrix(const std::vector<int>& cols) const;

 private:
  std::vector<std::string> row_ids_;
  std::vector<int> col_ids_;
  Eigen::MatrixXd entries_;
};

}  // namespace rulesel

#endif  // RULESEL_SCORE_MATRIX_HPP
