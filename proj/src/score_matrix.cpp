#include "rulesel/score_matrix.hpp"

#include <unordered_map>
#include <unordered_set>

namespace rulesel {

ScoreMatrix::ScoreMatrix(std::vector<std::string> row_ids,
                         std::vector<int> col_ids, Eigen::MatrixXd entries)
    : row_ids_(std::move(row_ids)),
      col_ids_(std::move(col_ids)),
      entries_(std::move(entries)) {
  if (entries_.rows() != static_cast<Eigen::Index>(row_ids_.size()) ||
      entries_.cols() != static_cast<Eigen::Index>(col_ids_.size()))
    throw ConfigError("score matrix dimensions do not match id lists");

  std::unordered_set<std::string> seen_rows;
  for (const auto& id : row_ids_)
    if (!seen_rows.insert(id).second)
      throw ConfigError("duplicate sample id in score matrix: " + id);

  std::unordered_set<int> seen_cols;
  for (int c : col_ids_)
    if (!seen_cols.insert(c).second)
      throw ConfigError("duplicate rule index in score matrix: " +
                        std::to_string(c));

  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double v = entries_(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError("score entry (" + row_ids_[i] + ", rule_" +
                          std::to_string(col_ids_[j]) + ") = " +
                          std::to_string(v) + " outside [0,1]");
    }
}

ScoreMatrix ScoreMatrix::submatrix(const std::vector<int>& cols) const {
  std::unordered_map<int, Eigen::Index> pos;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(col_ids_.size()); ++j)
    pos.emplace(col_ids_[j], j);

  std::unordered_set<int> seen;
  Eigen::MatrixXd out(entries_.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (!seen.insert(cols[j]).second)
      throw ConfigError("duplicate column index in submatrix request: " +
                        std::to_string(cols[j]));
    auto it = pos.find(cols[j]);
    if (it == pos.end())
      throw ConfigError("unknown column index in submatrix request: " +
                        std::to_string(cols[j]));
    out.col(static_cast<Eigen::Index>(j)) = entries_.col(it->second);
  }
  return ScoreMatrix(row_ids_, cols, std::move(out));
}

}  // namespace rulesel
