#ifndef RULESEL_PROMPTS_HPP
#define RULESEL_PROMPTS_HPP

#include <optional>
#include <string>

#include "rulesel/btmodel.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

// Inputs for prompt rendering: the goal, the source-data description, and
// the downstream-task description.
struct TaskSpec {
  std::string task_description;
  std::string data_description;
  std::string domain_name;

  TaskSpec(std::string task, std::string data, std::string domain)
      : task_description(std::move(task)),
        data_description(std::move(data)),
        domain_name(std::move(domain)) {
    if (task_description.empty() || data_description.empty() ||
        domain_name.empty())
      throw ConfigError("TaskSpec fields must all be non-empty");
  }
};

// Prompt asking for R rating rules.
std::string build_rule_generation_prompt(const TaskSpec& spec, int num_rules);

// Prompt rating one sample against one rule on [0,1]. A null rule renders
// the rule-free variant used by the NoRule baseline.
std::string build_individual_rating_prompt(const TaskSpec& spec,
                                           const Rule* rule,
                                           const DataSample& sample);

// Prompt comparing two samples; rule == nullopt renders the NoRule variant
// (the rule sentence is omitted, the rest is identical).
std::string build_pairwise_prompt(const TaskSpec& spec,
                                  const std::optional<Rule>& rule,
                                  const DataSample& a, const DataSample& b);

// Extract the first decimal literal; must lie in [0,1].
double parse_float_score(const std::string& text);

// Case-insensitive scan for a standalone token A or B.
Choice parse_ab_choice(const std::string& text);

// Parse a numbered or bulleted rule list into `expected` rules.
std::vector<Rule> parse_rules(const std::string& text, int expected);

}  // namespace rulesel

#endif  // RULESEL_PROMPTS_HPP
