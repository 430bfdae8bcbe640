#include "rulesel/rater.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "rulesel/rng.hpp"

namespace rulesel {

// ---------------------------------------------------------------------------
// HttpRater

struct HttpRater::Impl {
  RaterEndpoint endpoint;
  std::string host;  // scheme://host[:port]
  std::string path_prefix;
  std::string api_key;

  explicit Impl(RaterEndpoint ep) : endpoint(std::move(ep)) {
    endpoint.validate();
    // split base_url into host part and path prefix
    const std::string& url = endpoint.base_url;
    const std::size_t scheme = url.find("://");
    const std::size_t path_start =
        url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
      host = url;
    } else {
      host = url.substr(0, path_start);
      path_prefix = url.substr(path_start);
      while (!path_prefix.empty() && path_prefix.back() == '/')
        path_prefix.pop_back();
    }
    if (const char* key = std::getenv("RULESEL_API_KEY")) api_key = key;
  }

  std::string post_once(const std::string& prompt) {
    httplib::Client client(host);
    client.set_read_timeout(std::chrono::duration<double>(
        endpoint.timeout_seconds));
    client.set_connection_timeout(std::chrono::duration<double>(
        endpoint.timeout_seconds));

    nlohmann::json body = {
        {"model", endpoint.model_name},
        {"messages",
         nlohmann::json::array(
             {{{"role", "user"}, {"content", prompt}}})},
        {"temperature", endpoint.temperature},
    };
    httplib::Headers headers;
    if (!api_key.empty())
      headers.emplace("Authorization", "Bearer " + api_key);

    auto res = client.Post(path_prefix + "/chat/completions", headers,
                           body.dump(), "application/json");
    if (!res)
      throw ServiceError("endpoint unreachable: " + host + " (" +
                         httplib::to_string(res.error()) + ")");
    if (res->status != 200)
      throw ServiceError("endpoint returned HTTP " +
                         std::to_string(res->status) + ": " + res->body);
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("malformed completion response: ") +
                         e.what());
    }
  }
};

HttpRater::HttpRater(RaterEndpoint endpoint)
    : impl_(std::make_unique<Impl>(std::move(endpoint))) {}

HttpRater::~HttpRater() = default;

std::string HttpRater::complete(const std::string& prompt) {
  const int attempts = impl_->endpoint.max_retries + 1;
  std::chrono::milliseconds backoff(250);
  for (int attempt = 0;; ++attempt) {
    try {
      return impl_->post_once(prompt);
    } catch (const ServiceError&) {
      if (attempt + 1 >= attempts) throw;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

namespace {

// Re-prompt on parse failure, repeating the format instruction.
template <typename Parse>
auto complete_and_parse(HttpRater& rater, std::string prompt,
                        const std::string& format_reminder, int max_retries,
                        Parse parse) {
  for (int attempt = 0;; ++attempt) {
    const std::string response = rater.complete(prompt);
    try {
      return parse(response);
    } catch (const ParseError&) {
      if (attempt >= max_retries) throw;
      prompt += "\n" + format_reminder;
    }
  }
}

}  // namespace

double HttpRater::rate(const TaskSpec& spec, const Rule* rule,
                       const DataSample& sample) {
  return complete_and_parse(
      *this, build_individual_rating_prompt(spec, rule, sample),
      "Respond only with a single float number.",
      impl_->endpoint.max_retries,
      [](const std::string& text) { return parse_float_score(text); });
}

Choice HttpRater::compare(const TaskSpec& spec,
                          const std::optional<Rule>& rule,
                          const DataSample& a, const DataSample& b) {
  return complete_and_parse(
      *this, build_pairwise_prompt(spec, rule, a, b),
      "You must respond only with a single letter 'A' or 'B'.",
      impl_->endpoint.max_retries,
      [](const std::string& text) { return parse_ab_choice(text); });
}

std::vector<Rule> HttpRater::generate_rules(const TaskSpec& spec, int count) {
  return complete_and_parse(
      *this, build_rule_generation_prompt(spec, count),
      "Respond with exactly " + std::to_string(count) +
          " numbered rules, one per line.",
      impl_->endpoint.max_retries,
      [count](const std::string& text) { return parse_rules(text, count); });
}

// ---------------------------------------------------------------------------
// MockRater

MockRater::MockRater(std::uint64_t seed, std::map<int, int> redundancy_groups,
                     double jitter)
    : seed_(seed), groups_(std::move(redundancy_groups)), jitter_(jitter) {}

int MockRater::group_of(int rule_index) const {
  auto it = groups_.find(rule_index);
  // ungrouped rules are their own group: independent columns
  return it == groups_.end() ? rule_index : it->second;
}

namespace {

double hash_uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t h = Rng::mix(Rng::mix(Rng::mix(a) ^ b) ^ c);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

double MockRater::hidden_quality(const std::string& sample_id) const {
  return hash_uniform(seed_, Rng::hash_name("hidden"),
                      Rng::hash_name(sample_id));
}

double MockRater::cell_score(int rule_index, const std::string& sample_id) const {
  const std::uint64_t id_hash = Rng::hash_name(sample_id);
  const double base =
      hash_uniform(seed_, Rng::hash_name("group") ^
                              static_cast<std::uint64_t>(group_of(rule_index)),
                   id_hash);
  const double eps =
      (hash_uniform(seed_, Rng::hash_name("rule") ^
                               static_cast<std::uint64_t>(rule_index),
                    id_hash) -
       0.5) *
      jitter_;
  return std::clamp(base + eps, 0.0, 1.0);
}

double MockRater::rate(const TaskSpec&, const Rule* rule,
                       const DataSample& sample) {
  const int current = in_flight_.fetch_add(1) + 1;
  int seen = max_in_flight_.load();
  while (current > seen &&
         !max_in_flight_.compare_exchange_weak(seen, current)) {
  }
  calls_.fetch_add(1);
  const double v = cell_score(rule ? rule->index : -1, sample.id);
  in_flight_.fetch_sub(1);
  return v;
}

Choice MockRater::compare(const TaskSpec&, const std::optional<Rule>& rule,
                          const DataSample& a, const DataSample& b) {
  calls_.fetch_add(1);
  const int rule_index = rule ? rule->index : -1;
  const double qa = cell_score(rule_index, a.id);
  const double qb = cell_score(rule_index, b.id);
  if (qa == qb) return a.id < b.id ? Choice::First : Choice::Second;
  return qa > qb ? Choice::First : Choice::Second;
}

std::vector<Rule> MockRater::generate_rules(const TaskSpec& spec, int count) {
  calls_.fetch_add(1);
  std::vector<Rule> rules;
  rules.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    rules.emplace_back(i, "Mock rule " + std::to_string(i),
                       "Prefer samples relevant to " + spec.domain_name +
                           " (criterion " + std::to_string(i) + ").");
  return rules;
}

void MockRater::reset_counters() {
  calls_ = 0;
  in_flight_ = 0;
  max_in_flight_ = 0;
}

// ---------------------------------------------------------------------------
// rate_matrix

ScoreMatrix rate_matrix(Rater& rater, const TaskSpec& spec,
                        const std::vector<Rule>& rules,
                        const std::vector<DataSample>& batch,
                        const RateOptions& opts) {
  if (rules.empty() || batch.empty())
    throw ConfigError("rate_matrix needs non-empty rules and batch");
  if (opts.max_in_flight < 1)
    throw ConfigError("max_in_flight must be >= 1");

  const std::size_t n = batch.size();
  const std::size_t r = rules.size();
  Eigen::MatrixXd entries(n, r);
  std::vector<std::pair<std::size_t, std::size_t>> missing;
  std::mutex missing_mutex;

  const std::size_t cells = n * r;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= cells) return;
      const std::size_t i = cell / r;
      const std::size_t j = cell % r;
      try {
        entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rater.rate(spec, &rules[j], batch[i]);
      } catch (const std::exception&) {
        std::lock_guard lock(missing_mutex);
        missing.emplace_back(i, j);
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(opts.max_in_flight),
                            cells);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    if (!opts.allow_missing) {
      std::ostringstream msg;
      msg << missing.size() << " cell(s) failed after retries:";
      for (const auto& [i, j] : missing)
        msg << " (" << batch[i].id << ", rule_" << rules[j].index << ")";
      throw ServiceError(msg.str());
    }
    // substitute column mean of completed cells
    for (std::size_t j = 0; j < r; ++j) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::binary_search(missing.begin(), missing.end(),
                               std::make_pair(i, j)))
          continue;
        sum += entries(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j));
        ++count;
      }
      const double fill = count > 0 ? sum / count : 0.5;
      for (const auto& [i, jj] : missing)
        if (jj == j)
          entries(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(j)) = fill;
    }
  }

  std::vector<std::string> row_ids;
  row_ids.reserve(n);
  for (const auto& s : batch) row_ids.push_back(s.id);
  std::vector<int> col_ids;
  col_ids.reserve(r);
  for (const auto& rule : rules) col_ids.push_back(rule.index);
  return ScoreMatrix(std::move(row_ids), std::move(col_ids),
                     std::move(entries));
}

}  // namespace rulesel
