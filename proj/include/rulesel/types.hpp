#ifndef RULESEL_TYPES_HPP
#define RULESEL_TYPES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rulesel/errors.hpp"

namespace rulesel {

// One text record. Immutable after construction.
struct DataSample {
  std::string id;
  std::string text;
  std::map<std::string, std::string> meta;  // carried opaquely

  DataSample(std::string id_, std::string text_,
             std::map<std::string, std::string> meta_ = {})
      : id(std::move(id_)), text(std::move(text_)), meta(std::move(meta_)) {
    if (id.empty()) throw ConfigError("DataSample id must be non-empty");
    if (text.empty())
      throw ConfigError("DataSample text must be non-empty (id=" + id + ")");
  }
};

// A natural-language rating criterion.
struct Rule {
  int index;
  std::string title;  // optional short name
  std::string description;

  Rule(int index_, std::string title_, std::string description_)
      : index(index_),
        title(std::move(title_)),
        description(std::move(description_)) {
    if (index < 0) throw ConfigError("Rule index must be >= 0");
    if (description.empty())
      throw ConfigError("Rule description must be non-empty");
  }
};

struct SelectionConfig {
  int total_rules = 50;        // R: rules to generate
  int selected_rules = 10;     // r: rules to keep
  int batch_size = 10000;      // n: batch for rule selection
  int data_budget = 20000;     // k: samples to keep
  std::uint64_t seed = 0;
  double temperature = 1.0;

  void validate() const {
    if (total_rules < 1) throw ConfigError("R must be >= 1");
    if (selected_rules < 1 || selected_rules > total_rules)
      throw ConfigError("need 1 <= r <= R");
    if (batch_size < 0) throw ConfigError("n must be >= 0");
    if (data_budget < 0) throw ConfigError("k must be >= 0");
    if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
  }
};

struct GroundTruthVector {
  std::vector<std::string> ids;
  std::vector<double> values;  // in [0,1]

  GroundTruthVector() = default;
  GroundTruthVector(std::vector<std::string> ids_, std::vector<double> values_)
      : ids(std::move(ids_)), values(std::move(values_)) {
    if (ids.size() != values.size())
      throw ConfigError("ground truth ids/values length mismatch");
    for (double v : values)
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError("ground truth value outside [0,1]");
  }

  std::size_t size() const { return ids.size(); }
};

}  // namespace rulesel

#endif  // RULESEL_TYPES_HPP
