#include "rulesel/dataset.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>

namespace rulesel {

std::vector<DataSample> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open dataset file: " + path.string());

  const std::string fname = path.filename().string();
  std::vector<DataSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": malformed JSON line: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": line is not an object with a string \"text\" field");

    std::string id = obj.value("id", std::string());
    if (id.empty()) id = fname + ":" + std::to_string(lineno);

    std::map<std::string, std::string> meta;
    if (obj.contains("meta")) {
      for (auto& [k, v] : obj["meta"].items())
        meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    out.emplace_back(std::move(id), obj["text"].get<std::string>(),
                     std::move(meta));
  }
  return out;
}

std::vector<DataSample> sample_batch(const std::vector<DataSample>& dataset,
                                     int n, Rng& rng) {
  if (n < 0 || static_cast<std::size_t>(n) > dataset.size())
    throw ConfigError("batch size " + std::to_string(n) +
                      " exceeds dataset size " +
                      std::to_string(dataset.size()));

  // partial Fisher-Yates over an index vector
  std::vector<std::size_t> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<DataSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t j = i + rng.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(dataset[idx[i]]);
  }
  return out;
}

}  // namespace rulesel
