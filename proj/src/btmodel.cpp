#include "rulesel/btmodel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace rulesel {

std::vector<ComparisonRecord> filter_consistent(const ChoiceMap& forward,
                                                const ChoiceMap& backward,
                                                ConsistencyReport* report) {
  ConsistencyReport rep;
  // winner -> loser -> count
  std::map<std::pair<std::string, std::string>, int> wins;

  for (const auto& [pair, fwd_choice] : forward) {
    const auto& [i, j] = pair;
    auto it = backward.find({j, i});
    if (it == backward.end()) {
      ++rep.missing;
      continue;
    }
    // Forward query presented (i, j); backward presented (j, i). Map both
    // answers back to the underlying sample.
    const std::string& fwd_winner = fwd_choice == Choice::First ? i : j;
    const std::string& bwd_winner = it->second == Choice::First ? j : i;
    if (fwd_winner != bwd_winner) {
      ++rep.inconsistent;
      continue;
    }
    ++rep.kept;
    const std::string& loser = fwd_winner == i ? j : i;
    ++wins[{fwd_winner, loser}];
  }

  std::vector<ComparisonRecord> out;
  out.reserve(wins.size());
  for (const auto& [pair, count] : wins)
    out.emplace_back(pair.first, pair.second, count);
  if (report) *report = rep;
  return out;
}

namespace {

struct PairCounts {
  // indexed storage for the MM sweep
  std::vector<std::string> ids;
  std::vector<std::vector<std::pair<int, double>>> comparisons;  // n_ij per opponent
  std::vector<std::vector<std::pair<int, double>>> wins_against; // w_ij per opponent
  std::vector<double> total_wins;                                // W_i
};

PairCounts build_counts(const std::vector<ComparisonRecord>& records,
                        double smoothing) {
  std::unordered_map<std::string, int> index;
  std::vector<std::string> ids;
  auto id_of = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, static_cast<int>(ids.size()));
    if (inserted) ids.push_back(s);
    return it->second;
  };

  std::map<std::pair<int, int>, double> w;  // directed win counts
  for (const auto& rec : records) {
    const int a = id_of(rec.winner);
    const int b = id_of(rec.loser);
    w[{a, b}] += rec.count;
  }
  if (smoothing > 0) {
    // virtual wins in both directions for every pair compared at least once
    std::map<std::pair<int, int>, double> smoothed = w;
    for (const auto& [pair, _] : w) {
      smoothed[pair] += 0;  // ensure key
      smoothed[{pair.second, pair.first}] += 0;
    }
    for (auto& [pair, count] : smoothed) count += smoothing;
    w = std::move(smoothed);
  }

  const int n = static_cast<int>(ids.size());
  PairCounts pc;
  pc.ids = std::move(ids);
  pc.comparisons.resize(n);
  pc.wins_against.resize(n);
  pc.total_wins.assign(n, 0.0);

  std::map<std::pair<int, int>, double> n_ij;
  for (const auto& [pair, count] : w) {
    pc.total_wins[pair.first] += count;
    pc.wins_against[pair.first].emplace_back(pair.second, count);
    n_ij[{std::min(pair.first, pair.second), std::max(pair.first, pair.second)}] +=
        count;
  }
  for (const auto& [pair, count] : n_ij) {
    pc.comparisons[pair.first].emplace_back(pair.second, count);
    pc.comparisons[pair.second].emplace_back(pair.first, count);
  }
  return pc;
}

bool graph_connected(const PairCounts& pc) {
  const int n = static_cast<int>(pc.ids.size());
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [v, _] : pc.comparisons[u])
      if (!seen[v]) {
        seen[v] = true;
        ++visited;
        stack.push_back(v);
      }
  }
  return visited == n;
}

double log_likelihood(const PairCounts& pc, const std::vector<double>& v) {
  double ll = 0.0;
  const int n = static_cast<int>(pc.ids.size());
  for (int i = 0; i < n; ++i)
    for (const auto& [j, w_ij] : pc.wins_against[i])
      ll += w_ij * (std::log(v[i]) - std::log(v[i] + v[j]));
  return ll;
}

}  // namespace

double BTFit::win_probability(std::size_t i, std::size_t j) const {
  const double vi = std::exp(beta[i]);
  const double vj = std::exp(beta[j]);
  return vi / (vi + vj);
}

BTFit fit_bradley_terry(const std::vector<ComparisonRecord>& records,
                        const BTOptions& opts) {
  if (opts.smoothing < 0) throw ConfigError("smoothing must be >= 0");
  PairCounts pc = build_counts(records, opts.smoothing);
  const int n = static_cast<int>(pc.ids.size());
  if (n < 2) throw ConfigError("Bradley-Terry fit needs at least 2 items");
  if (opts.smoothing == 0 && !graph_connected(pc)) throw Disconnected();

  std::vector<double> v(n, 1.0);
  std::vector<double> beta(n, 0.0);

  BTFit fit;
  fit.ids = pc.ids;
  double prev_ll = opts.check_ascent
                       ? log_likelihood(pc, v)
                       : 0.0;

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    std::vector<double> v_new(n);
    for (int i = 0; i < n; ++i) {
      double denom = 0.0;
      for (const auto& [j, n_ij] : pc.comparisons[i])
        denom += n_ij / (v[i] + v[j]);
      v_new[i] = denom > 0 ? pc.total_wins[i] / denom : v[i];
    }
    // renormalize in log space to mean-zero beta
    std::vector<double> beta_new(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      beta_new[i] = std::log(v_new[i]);
      mean += beta_new[i];
    }
    mean /= n;
    double max_delta = 0.0;
    for (int i = 0; i < n; ++i) {
      beta_new[i] -= mean;
      max_delta = std::max(max_delta, std::abs(beta_new[i] - beta[i]));
      v_new[i] = std::exp(beta_new[i]);
    }

    if (opts.check_ascent) {
      const double ll = log_likelihood(pc, v_new);
      assert(ll >= prev_ll - 1e-9 && "MM sweep decreased the log-likelihood");
      prev_ll = ll;
    }

    v = std::move(v_new);
    beta = std::move(beta_new);
    if (max_delta < opts.tol) {
      fit.converged = true;
      ++iter;
      break;
    }
  }

  fit.iterations = iter;
  fit.beta = std::move(beta);

  const auto [lo_it, hi_it] =
      std::minmax_element(fit.beta.begin(), fit.beta.end());
  const double lo = *lo_it, hi = *hi_it;
  fit.scores.resize(n);
  for (int i = 0; i < n; ++i)
    fit.scores[i] =
        hi - lo > 1e-12 ? (fit.beta[i] - lo) / (hi - lo) : 0.5;
  return fit;
}

GroundTruthVector ground_truth_from_fit(const BTFit& fit) {
  if (fit.ids.empty()) throw ConfigError("empty Bradley-Terry fit");
  return GroundTruthVector(fit.ids, fit.scores);
}

}  // namespace rulesel
