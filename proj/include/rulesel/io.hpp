#ifndef RULESEL_IO_HPP
#define RULESEL_IO_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rulesel/score_matrix.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

struct ComparisonRecord;  // btmodel.hpp

// Values are printed with 9 significant digits throughout.
std::string format_score(double v);

// ScoreMatrix CSV: header "id,rule_0,rule_3,...", one row per sample.
void save_score_matrix(const ScoreMatrix& S, const std::filesystem::path& path);
ScoreMatrix load_score_matrix(const std::filesystem::path& path);

// Load a possibly partial matrix (fewer rows than the target batch); used by
// resumable rating. Returns nullopt when the file does not exist.
std::optional<ScoreMatrix> load_score_matrix_if_exists(
    const std::filesystem::path& path);

// GroundTruthVector CSV: header "id,score".
void save_ground_truth(const GroundTruthVector& gt,
                       const std::filesystem::path& path);
GroundTruthVector load_ground_truth(const std::filesystem::path& path);

// Kernel CSV: R x R values, no header.
void save_kernel_csv(const Eigen::MatrixXd& K,
                     const std::filesystem::path& path);

// Rules JSON: array of {index, title, description}.
void save_rules(const std::vector<Rule>& rules,
                const std::filesystem::path& path);
std::vector<Rule> load_rules(const std::filesystem::path& path);

// Selected rule indices as a JSON array.
void save_indices_json(const std::vector<int>& indices,
                       const std::filesystem::path& path);
std::vector<int> load_indices_json(const std::filesystem::path& path);

// Comparison records CSV: header "winner_id,loser_id,count".
void save_comparisons(const std::vector<ComparisonRecord>& records,
                      const std::filesystem::path& path);
std::vector<ComparisonRecord> load_comparisons(
    const std::filesystem::path& path);

// FNV-1a 64 content hash, hex; used by the run manifest.
std::string file_hash(const std::filesystem::path& path);
std::string content_hash(const std::string& content);

}  // namespace rulesel

#endif  // RULESEL_IO_HPP
