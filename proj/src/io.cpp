#include "rulesel/io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rulesel/btmodel.hpp"

namespace rulesel {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void save_score_matrix(const ScoreMatrix& S,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "id";
  for (int c : S.col_ids()) out << ",rule_" << c;
  out << "\n";
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    out << S.row_ids()[i];
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      out << ',' << format_score(S.entries()(i, j));
    out << "\n";
  }
}

namespace {

ScoreMatrix parse_score_matrix(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError(name + ": empty score matrix file");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "id")
    throw ConfigError(name + ": score matrix header must start with \"id\"");
  std::vector<int> col_ids;
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j].rfind("rule_", 0) != 0)
      throw ConfigError(name + ": bad header cell: " + header[j]);
    col_ids.push_back(std::stoi(header[j].substr(5)));
  }

  std::vector<std::string> row_ids;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ConfigError(name + ": row with " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(header.size()));
    row_ids.push_back(fields[0]);
    std::vector<double> row(col_ids.size());
    for (std::size_t j = 0; j < col_ids.size(); ++j)
      row[j] = std::stod(fields[j + 1]);
    rows.push_back(std::move(row));
  }

  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(col_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < col_ids.size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return ScoreMatrix(std::move(row_ids), std::move(col_ids), std::move(M));
}

}  // namespace

ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_score_matrix(in, path.string());
}

std::optional<ScoreMatrix> load_score_matrix_if_exists(
    const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  return load_score_matrix(path);
}

void save_ground_truth(const GroundTruthVector& gt,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "id,score\n";
  for (std::size_t i = 0; i < gt.size(); ++i)
    out << gt.ids[i] << ',' << format_score(gt.values[i]) << "\n";
}

GroundTruthVector load_ground_truth(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"id", "score"})
    throw ConfigError(path.string() + ": expected header \"id,score\"");
  std::vector<std::string> ids;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw ConfigError(path.string() + ": bad ground-truth row: " + line);
    ids.push_back(fields[0]);
    values.push_back(std::stod(fields[1]));
  }
  return GroundTruthVector(std::move(ids), std::move(values));
}

void save_kernel_csv(const Eigen::MatrixXd& K,
                     const std::filesystem::path& path) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      if (j) out << ',';
      out << format_score(K(i, j));
    }
    out << "\n";
  }
}

void save_rules(const std::vector<Rule>& rules,
                const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rules)
    arr.push_back({{"index", r.index},
                   {"title", r.title},
                   {"description", r.description}});
  open_out(path) << arr.dump(2) << "\n";
}

std::vector<Rule> load_rules(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": bad rules JSON: " + e.what());
  }
  std::vector<Rule> rules;
  for (const auto& obj : arr)
    rules.emplace_back(obj.at("index").get<int>(),
                       obj.value("title", std::string()),
                       obj.at("description").get<std::string>());
  return rules;
}

void save_indices_json(const std::vector<int>& indices,
                       const std::filesystem::path& path) {
  open_out(path) << nlohmann::json(indices).dump() << "\n";
}

std::vector<int> load_indices_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json arr;
  in >> arr;
  return arr.get<std::vector<int>>();
}

void save_comparisons(const std::vector<ComparisonRecord>& records,
                      const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "winner_id,loser_id,count\n";
  for (const auto& r : records)
    out << r.winner << ',' << r.loser << ',' << r.count << "\n";
}

std::vector<ComparisonRecord> load_comparisons(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) !=
          std::vector<std::string>{"winner_id", "loser_id", "count"})
    throw ConfigError(path.string() +
                      ": expected header \"winner_id,loser_id,count\"");
  std::vector<ComparisonRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw ConfigError(path.string() + ": bad comparison row: " + line);
    records.emplace_back(fields[0], fields[1], std::stoi(fields[2]));
  }
  return records;
}

std::string content_hash(const std::string& content) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot hash missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return content_hash(ss.str());
}

}  // namespace rulesel
