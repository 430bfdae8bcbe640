#include "rulesel/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace rulesel {

QualityVector aggregate_scores(const ScoreMatrix& S) {
  if (S.rows() == 0 || S.cols() == 0)
    throw ConfigError("cannot aggregate an empty score matrix");
  const Eigen::VectorXd means = S.entries().rowwise().mean();
  std::vector<double> values(means.data(), means.data() + means.size());
  return QualityVector(S.row_ids(), std::move(values));
}

std::vector<double> softmax_distribution(const QualityVector& v,
                                         double temperature) {
  if (v.size() == 0) throw ConfigError("softmax over an empty vector");
  if (!(temperature > 0)) throw ConfigError("temperature must be > 0");

  const std::size_t n = v.size();
  std::vector<double> logits(n);
  for (std::size_t i = 0; i < n; ++i) logits[i] = v.values[i] / temperature;
  const double max_logit = *std::max_element(logits.begin(), logits.end());

  std::vector<double> p(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(logits[i] - max_logit);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<std::string> gumbel_topk(const QualityVector& v, int k,
                                     double temperature, Rng& rng) {
  if (k < 0 || static_cast<std::size_t>(k) > v.size())
    throw ConfigError("gumbel_topk: k exceeds pool size");
  const std::vector<double> p = softmax_distribution(v, temperature);

  const std::size_t n = v.size();
  std::vector<double> keys(n);
  for (std::size_t i = 0; i < n; ++i)
    keys[i] = std::log(p[i]) + rng.gumbel();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // descending keys; ties (pathological rng only) broken by smaller index
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return keys[a] > keys[b];
                   });

  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(v.ids[order[static_cast<std::size_t>(i)]]);
  return out;
}

std::vector<std::string> deterministic_topk(const QualityVector& v, int k) {
  if (k < 0 || static_cast<std::size_t>(k) > v.size())
    throw ConfigError("deterministic_topk: k exceeds pool size");
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (v.values[a] != v.values[b]) return v.values[a] > v.values[b];
    return v.ids[a] < v.ids[b];
  });
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(v.ids[order[static_cast<std::size_t>(i)]]);
  return out;
}

std::vector<DataSample> select_data(const std::vector<DataSample>& dataset,
                                    const QualityVector& v, int k,
                                    double temperature, Rng& rng) {
  std::unordered_map<std::string, const DataSample*> by_id;
  for (const auto& s : dataset) by_id.emplace(s.id, &s);
  for (const auto& id : v.ids)
    if (!by_id.count(id))
      throw ConfigError("quality vector id not present in dataset: " + id);

  std::vector<DataSample> out;
  out.reserve(static_cast<std::size_t>(k));
  for (const auto& id : gumbel_topk(v, k, temperature, rng))
    out.push_back(*by_id.at(id));
  return out;
}

}  // namespace rulesel
