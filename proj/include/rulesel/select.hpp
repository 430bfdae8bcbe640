#ifndef RULESEL_SELECT_HPP
#define RULESEL_SELECT_HPP

#include <vector>

#include "rulesel/rng.hpp"
#include "rulesel/score_matrix.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

struct QualityVector {
  std::vector<std::string> ids;
  std::vector<double> values;  // in [0,1]

  QualityVector() = default;
  QualityVector(std::vector<std::string> ids_, std::vector<double> values_)
      : ids(std::move(ids_)), values(std::move(values_)) {
    if (ids.size() != values.size())
      throw ConfigError("quality vector ids/values length mismatch");
    for (double v : values)
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError("quality value outside [0,1]");
  }

  std::size_t size() const { return ids.size(); }
};

// Row means of the score matrix.
QualityVector aggregate_scores(const ScoreMatrix& S);

// softmax(v / temperature), computed with max-subtraction.
std::vector<double> softmax_distribution(const QualityVector& v,
                                         double temperature = 1.0);

// Gumbel top-k: s_i = log p_i - log(-log u_i); take the k largest. Equal in
// law to sequential sampling without replacement from the softmax.
std::vector<std::string> gumbel_topk(const QualityVector& v, int k,
                                     double temperature, Rng& rng);

// Exact top-k by quality, ties by id; ablation path.
std::vector<std::string> deterministic_topk(const QualityVector& v, int k);

// Materialize Gumbel top-k winners from the dataset by id.
std::vector<DataSample> select_data(const std::vector<DataSample>& dataset,
                                    const QualityVector& v, int k,
                                    double temperature, Rng& rng);

}  // namespace rulesel

#endif  // RULESEL_SELECT_HPP
