// Command-line front end for the rule-based data selection pipeline.

#include <CLI11.hpp>
#include <iostream>

#include "rulesel/pipeline.hpp"

namespace {

int dispatch(const std::string& command, const rulesel::RunConfig& cfg) {
  using namespace rulesel;
  try {
    if (command == "generate-rules")
      cmd_generate_rules(cfg);
    else if (command == "rate")
      cmd_rate(cfg);
    else if (command == "select-rules")
      cmd_select_rules(cfg);
    else if (command == "select-data")
      cmd_select_data(cfg);
    else if (command == "eval")
      cmd_eval(cfg);
    else if (command == "report")
      cmd_report(cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ServiceError& e) {
    std::cerr << "service error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-based data selection pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "output directory override");
  app.add_option("--seed", seed, "master seed override")
      ->each([&](const std::string&) { seed_set = true; });

  std::string dataset;
  int R = 0, r = 0, n = -1, k = -1;
  bool drop_constant = false, allow_missing = false, deterministic = false,
       center_kernel = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dataset", dataset, "JSONL dataset path");
    sub->add_option("-R,--rules-total", R, "rules to generate (R)");
    sub->add_option("-r,--rules-keep", r, "rules to keep (r)");
    sub->add_option("-n,--batch-size", n, "rating batch size");
    sub->add_option("-k,--budget", k, "data selection budget");
    sub->add_flag("--drop-constant-rules", drop_constant,
                  "drop zero-variance rule columns with a warning");
    sub->add_flag("--allow-missing", allow_missing,
                  "substitute column means for failed rating cells");
    sub->add_flag("--deterministic", deterministic,
                  "exact top-k instead of Gumbel sampling (ablation)");
    sub->add_flag("--center-kernel", center_kernel,
                  "mean-center score columns before the Gram kernel");
  };

  for (const char* name :
       {"generate-rules", "rate", "select-rules", "select-data", "eval",
        "report"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  rulesel::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = rulesel::load_run_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) cfg.selection.seed = seed;
    if (!dataset.empty()) cfg.dataset_path = dataset;
    if (R > 0) cfg.selection.total_rules = R;
    if (r > 0) cfg.selection.selected_rules = r;
    if (n >= 0) cfg.selection.batch_size = n;
    if (k >= 0) cfg.selection.data_budget = k;
    cfg.drop_constant_rules |= drop_constant;
    cfg.allow_missing |= allow_missing;
    cfg.deterministic |= deterministic;
    cfg.center_kernel |= center_kernel;
    cfg.selection.validate();
  } catch (const rulesel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  return dispatch(app.get_subcommands().front()->get_name(), cfg);
}
