#ifndef RULESEL_RATER_HPP
#define RULESEL_RATER_HPP

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rulesel/prompts.hpp"
#include "rulesel/score_matrix.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

struct RaterEndpoint {
  std::string base_url;
  std::string model_name;
  double temperature = 0.0;  // reproducibility default
  int max_retries = 3;
  double timeout_seconds = 60.0;
  int max_in_flight = 4;

  void validate() const {
    if (base_url.empty()) throw ConfigError("endpoint base_url is empty");
    if (model_name.empty()) throw ConfigError("endpoint model_name is empty");
    if (temperature < 0) throw ConfigError("temperature must be >= 0");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  }
};

// Semantic rating interface; the HTTP client renders prompts and parses
// responses, the mock computes values directly.
class Rater {
 public:
  virtual ~Rater() = default;

  // Quality of one sample under one rule (nullptr = rule-free).
  virtual double rate(const TaskSpec& spec, const Rule* rule,
                      const DataSample& sample) = 0;

  // Preference between two presented samples (a shown first).
  virtual Choice compare(const TaskSpec& spec, const std::optional<Rule>& rule,
                         const DataSample& a, const DataSample& b) = 0;

  virtual std::vector<Rule> generate_rules(const TaskSpec& spec, int count) = 0;
};

// Chat-completion wire client: POST <base_url>/chat/completions with
// {model, messages, temperature}; reads the first choice's message content.
// Bearer auth from the RULESEL_API_KEY environment variable.
class HttpRater : public Rater {
 public:
  explicit HttpRater(RaterEndpoint endpoint);
  ~HttpRater() override;

  double rate(const TaskSpec& spec, const Rule* rule,
              const DataSample& sample) override;
  Choice compare(const TaskSpec& spec, const std::optional<Rule>& rule,
                 const DataSample& a, const DataSample& b) override;
  std::vector<Rule> generate_rules(const TaskSpec& spec, int count) override;

  // Raw completion round-trip with retry/backoff; exposed for testing.
  std::string complete(const std::string& prompt);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Deterministic offline rater. Rules in the same redundancy group return
// near-identical scores (correlated columns); ungrouped rules behave as
// independent noise.
class MockRater : public Rater {
 public:
  explicit MockRater(std::uint64_t seed,
                     std::map<int, int> redundancy_groups = {},
                     double jitter = 0.02);

  double rate(const TaskSpec& spec, const Rule* rule,
              const DataSample& sample) override;
  Choice compare(const TaskSpec& spec, const std::optional<Rule>& rule,
                 const DataSample& a, const DataSample& b) override;
  std::vector<Rule> generate_rules(const TaskSpec& spec, int count) override;

  // hidden per-sample quality (rule-free); useful as synthetic ground truth
  double hidden_quality(const std::string& sample_id) const;

  // instrumentation
  int calls() const { return calls_.load(); }
  int max_observed_in_flight() const { return max_in_flight_.load(); }
  void reset_counters();

 private:
  double cell_score(int rule_index, const std::string& sample_id) const;
  int group_of(int rule_index) const;

  std::uint64_t seed_;
  std::map<int, int> groups_;
  double jitter_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

// Adapter for test doubles built from lambdas.
class FunctionRater : public Rater {
 public:
  using RateFn = std::function<double(const Rule*, const DataSample&)>;
  using CompareFn = std::function<Choice(const std::optional<Rule>&,
                                         const DataSample&, const DataSample&)>;

  FunctionRater(RateFn rate, CompareFn compare = nullptr)
      : rate_(std::move(rate)), compare_(std::move(compare)) {}

  double rate(const TaskSpec&, const Rule* rule,
              const DataSample& sample) override {
    return rate_(rule, sample);
  }
  Choice compare(const TaskSpec&, const std::optional<Rule>& rule,
                 const DataSample& a, const DataSample& b) override {
    if (!compare_) throw ServiceError("comparison not supported by this rater");
    return compare_(rule, a, b);
  }
  std::vector<Rule> generate_rules(const TaskSpec&, int) override {
    throw ServiceError("rule generation not supported by this rater");
  }

 private:
  RateFn rate_;
  CompareFn compare_;
};

struct RateOptions {
  int max_in_flight = 4;
  bool allow_missing = false;  // substitute column means for failed cells
};

// One rating query per (sample, rule) cell. Failed cells abort the
// operation with the full missing list unless allow_missing is set.
ScoreMatrix rate_matrix(Rater& rater, const TaskSpec& spec,
                        const std::vector<Rule>& rules,
                        const std::vector<DataSample>& batch,
                        const RateOptions& opts = {});

}  // namespace rulesel

#endif  // RULESEL_RATER_HPP
