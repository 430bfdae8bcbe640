#ifndef RULESEL_PIPELINE_HPP
#define RULESEL_PIPELINE_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rulesel/evalharness.hpp"
#include "rulesel/rater.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

inline constexpr const char* kToolVersion = "rulesel 0.1.0";

struct RunConfig {
  SelectionConfig selection;

  std::filesystem::path dataset_path;
  std::optional<std::filesystem::path> rules_path;  // skip generation
  std::filesystem::path out_dir = "out";

  std::string rater_kind = "mock";  // "mock" or "http"
  RaterEndpoint endpoint;           // used when rater_kind == "http"

  std::string task_description = "General language understanding tasks.";
  std::string data_description = "Web-crawled text documents.";
  std::string domain_name = "General";

  bool drop_constant_rules = false;
  bool allow_missing = false;
  bool deterministic = false;  // exact top-k ablation
  bool center_kernel = false;  // experimental
  int chunk_size = 1000;       // pool-rating flush granularity
  int max_in_flight = 4;

  // mock-rater redundancy groups, "size,size,..." over rule indices in order
  std::vector<int> mock_groups;

  // eval-mode parameters
  SyntheticModelConfig synthetic;
  int eval_trials = 100;
  int eval_subset_cap = 10000;

  TaskSpec task_spec() const {
    return TaskSpec(task_description, data_description, domain_name);
  }
};

RunConfig load_run_config(const std::filesystem::path& path);

// Run manifest: config snapshot, seeds, selected rule indices, tool version,
// and a content hash for every file a stage reads or writes. Wall-clock
// timings go to a sidecar (timings.json) so the manifest itself is
// deterministic for a deterministic run.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path out_dir);

  void record_config(const RunConfig& cfg);
  void record_input(const std::string& stage,
                    const std::filesystem::path& file);
  void record_output(const std::string& stage,
                     const std::filesystem::path& file);
  // Throws when `file` was produced by an earlier stage and has changed.
  void verify_input(const std::string& stage,
                    const std::filesystem::path& file);
  void record_selected_rules(const std::vector<int>& indices);
  void record_timing(const std::string& stage, double seconds);
  void save() const;

  std::filesystem::path path() const { return out_dir_ / "manifest.json"; }

 private:
  std::filesystem::path out_dir_;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

std::unique_ptr<Rater> make_rater(const RunConfig& cfg);

// Pipeline stages plus the evaluation harness. Each stage
// reads/writes files under cfg.out_dir and updates the manifest.
void cmd_generate_rules(const RunConfig& cfg);
void cmd_rate(const RunConfig& cfg);
void cmd_select_rules(const RunConfig& cfg);
void cmd_select_data(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);

// Standard artifact locations under out_dir.
std::filesystem::path rules_file(const RunConfig& cfg);
std::filesystem::path matrix_file(const RunConfig& cfg);
std::filesystem::path selected_rules_file(const RunConfig& cfg);
std::filesystem::path pool_matrix_file(const RunConfig& cfg);
std::filesystem::path selected_ids_file(const RunConfig& cfg);

}  // namespace rulesel

#endif  // RULESEL_PIPELINE_HPP
