#include "rulesel/prompts.hpp"

#include <cctype>
#include <regex>
#include <sstream>

namespace rulesel {

namespace {

// Sample text goes inside a fence so delimiter phrases like "Example:"
// inside the data cannot be mistaken for template structure.
std::string fenced(const std::string& text) {
  return "```\n" + text + "\n```";
}

}  // namespace

std::string build_rule_generation_prompt(const TaskSpec& spec, int num_rules) {
  if (num_rules < 1) throw ConfigError("rule count must be >= 1");
  const std::string n = std::to_string(num_rules);
  const std::string rules_word = num_rules == 1 ? "rule" : "rules";
  std::ostringstream out;
  out << "Generate " << n << " specific " << rules_word
      << " for rating data from the training dataset, in order to select a "
         "high-quality subset to train large language models that will "
         "improve their performance on "
      << spec.domain_name
      << " tasks. The descriptions of the training data and the downstream "
         "task are provided below. The rules should focus on various aspects "
         "such as data quality, relevance, diversity, and other "
         "characteristics that would be beneficial for "
      << spec.domain_name << " tasks.\n\n"
      << "Description of training data:\n"
      << spec.data_description << "\n\n"
      << "Description of downstream task:\n"
      << spec.task_description << "\n\n"
      << "Requirements for the Rules:\n"
      << "Each rule should be concise and specific.\n"
      << "The rules could be basic text quality rules or task-related "
         "quality rules.\n"
      << "The rules should be written in clear, natural language and be easy "
         "to understand.\n\n"
      << "Now, please generate the " << n << " " << rules_word << ".";
  return out.str();
}

std::string build_individual_rating_prompt(const TaskSpec& spec,
                                           const Rule* rule,
                                           const DataSample& sample) {
  std::ostringstream out;
  out << "We are training a language model to improve performance on "
      << spec.domain_name
      << " tasks. Evaluate the following example and assign a quality score "
         "between 0 and 1 (0 indicates the worst quality, and 1 indicates "
         "perfect quality)";
  if (rule) {
    out << " according to the provided rule:\n" << rule->description << "\n";
  } else {
    out << ".\n";
  }
  out << "\nExample:\n"
      << fenced(sample.text) << "\n"
      << "Respond only with a single float number.";
  return out.str();
}

std::string build_pairwise_prompt(const TaskSpec& spec,
                                  const std::optional<Rule>& rule,
                                  const DataSample& a, const DataSample& b) {
  if (a.id == b.id)
    throw ConfigError("pairwise prompt needs two distinct samples");
  std::ostringstream out;
  out << "Compare two data examples from " << spec.domain_name
      << " and choose the example which has better quality";
  if (rule) {
    out << " according to the following rule:\n" << rule->description << "\n";
  } else {
    out << ".\n";
  }
  out << "\nThe texts might have similar quality, but you should still make "
         "a relative judgement and choose the label of the preferred text."
      << "\n\n"
      << "Example A:\n"
      << fenced(a.text) << "\n\n"
      << "Example B:\n"
      << fenced(b.text) << "\n\n"
      << "Now you have to choose between either A or B. You must respond "
         "only with a single letter 'A' or 'B'.";
  return out.str();
}

double parse_float_score(const std::string& text) {
  static const std::regex number(R"(-?\d+(\.\d+)?([eE][-+]?\d+)?|-?\.\d+)");
  std::smatch m;
  if (!std::regex_search(text, m, number))
    throw ParseError("no numeric score found in response: \"" + text + "\"");
  const double v = std::stod(m.str());
  if (v < 0.0 || v > 1.0)
    throw ParseError("score " + m.str() + " outside [0,1]");
  return v;
}

Choice parse_ab_choice(const std::string& text) {
  bool saw_a = false, saw_b = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = static_cast<char>(std::toupper(
        static_cast<unsigned char>(text[i])));
    if (c != 'A' && c != 'B') continue;
    const bool left_ok =
        i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    const bool right_ok =
        i + 1 == text.size() ||
        !std::isalnum(static_cast<unsigned char>(text[i + 1]));
    if (!left_ok || !right_ok) continue;
    (c == 'A' ? saw_a : saw_b) = true;
  }
  if (saw_a == saw_b)
    throw ParseError(saw_a ? "ambiguous choice: both A and B present"
                           : "no standalone A or B token in response");
  return saw_a ? Choice::First : Choice::Second;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strip "12." / "12)" / "-" / "*" list markers; returns false when the line
// carries no marker and no content.
bool strip_marker(std::string& line) {
  std::size_t i = 0;
  if (i < line.size() && (line[i] == '-' || line[i] == '*')) {
    line = trim(line.substr(i + 1));
    return true;
  }
  std::size_t digits = 0;
  while (i + digits < line.size() &&
         std::isdigit(static_cast<unsigned char>(line[i + digits])))
    ++digits;
  if (digits > 0 && i + digits < line.size() &&
      (line[i + digits] == '.' || line[i + digits] == ')')) {
    line = trim(line.substr(i + digits + 1));
    return true;
  }
  return false;
}

}  // namespace

std::vector<Rule> parse_rules(const std::string& text, int expected) {
  std::vector<Rule> rules;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    strip_marker(line);
    if (line.empty()) continue;

    std::string title, description = line;
    // "Title: description" with a short, colon-free title
    const std::size_t colon = line.find(':');
    if (colon != std::string::npos && colon > 0 && colon < 80) {
      title = trim(line.substr(0, colon));
      description = trim(line.substr(colon + 1));
      if (description.empty()) {
        description = title;
        title.clear();
      }
    }
    rules.emplace_back(static_cast<int>(rules.size()), title, description);
  }
  if (static_cast<int>(rules.size()) != expected)
    throw CountMismatch(static_cast<int>(rules.size()), expected);
  return rules;
}

}  // namespace rulesel
