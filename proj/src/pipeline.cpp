#include "rulesel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <unordered_map>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <unordered_set>

#include "rulesel/dataset.hpp"
#include "rulesel/dpp.hpp"
#include "rulesel/io.hpp"
#include "rulesel/select.hpp"
#include "rulesel/stats.hpp"

namespace rulesel {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": bad config JSON: " + e.what());
  }

  RunConfig cfg;
  cfg.selection.total_rules = j.value("R", cfg.selection.total_rules);
  cfg.selection.selected_rules = j.value("r", cfg.selection.selected_rules);
  cfg.selection.batch_size = j.value("n", cfg.selection.batch_size);
  cfg.selection.data_budget = j.value("k", cfg.selection.data_budget);
  cfg.selection.seed = j.value("seed", cfg.selection.seed);
  cfg.selection.temperature = j.value("temperature", cfg.selection.temperature);

  if (j.contains("dataset")) cfg.dataset_path = j["dataset"].get<std::string>();
  if (j.contains("rules")) cfg.rules_path = j["rules"].get<std::string>();
  cfg.out_dir = j.value("out_dir", cfg.out_dir.string());

  cfg.rater_kind = j.value("rater", cfg.rater_kind);
  if (j.contains("endpoint")) {
    const auto& e = j["endpoint"];
    cfg.endpoint.base_url = e.value("base_url", "");
    cfg.endpoint.model_name = e.value("model", "");
    cfg.endpoint.temperature = e.value("temperature", 0.0);
    cfg.endpoint.max_retries = e.value("max_retries", 3);
    cfg.endpoint.timeout_seconds = e.value("timeout", 60.0);
    cfg.endpoint.max_in_flight = e.value("max_in_flight", 4);
  }

  cfg.task_description = j.value("task_description", cfg.task_description);
  cfg.data_description = j.value("data_description", cfg.data_description);
  cfg.domain_name = j.value("domain", cfg.domain_name);

  cfg.drop_constant_rules = j.value("drop_constant_rules", false);
  cfg.allow_missing = j.value("allow_missing", false);
  cfg.deterministic = j.value("deterministic", false);
  cfg.center_kernel = j.value("center_kernel", false);
  cfg.chunk_size = j.value("chunk_size", cfg.chunk_size);
  cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
  cfg.mock_groups = j.value("mock_groups", cfg.mock_groups);

  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    cfg.synthetic.n = s.value("n", cfg.synthetic.n);
    cfg.synthetic.total_rules = s.value("R", cfg.synthetic.total_rules);
    cfg.synthetic.groups =
        s.value("groups", std::vector<int>{});
    cfg.synthetic.group_noise = s.value("group_noise", cfg.synthetic.group_noise);
    cfg.synthetic.rule_noise = s.value("rule_noise", cfg.synthetic.rule_noise);
    cfg.synthetic.seed = s.value("seed", cfg.selection.seed);
  }
  cfg.eval_trials = j.value("eval_trials", cfg.eval_trials);
  cfg.eval_subset_cap = j.value("eval_subset_cap", cfg.eval_subset_cap);

  cfg.selection.validate();
  return cfg;
}

namespace {

json config_snapshot(const RunConfig& cfg) {
  return json{
      {"R", cfg.selection.total_rules},
      {"r", cfg.selection.selected_rules},
      {"n", cfg.selection.batch_size},
      {"k", cfg.selection.data_budget},
      {"seed", cfg.selection.seed},
      {"temperature", cfg.selection.temperature},
      {"dataset", cfg.dataset_path.string()},
      {"rater", cfg.rater_kind},
      {"domain", cfg.domain_name},
      {"drop_constant_rules", cfg.drop_constant_rules},
      {"allow_missing", cfg.allow_missing},
      {"deterministic", cfg.deterministic},
      {"center_kernel", cfg.center_kernel},
      {"chunk_size", cfg.chunk_size},
  };
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

struct Manifest::Impl {
  json data;
};

Manifest::Manifest(fs::path out_dir)
    : out_dir_(std::move(out_dir)), impl_(std::make_shared<Impl>()) {
  fs::create_directories(out_dir_);
  const fs::path p = out_dir_ / "manifest.json";
  if (fs::exists(p)) {
    std::ifstream in(p);
    in >> impl_->data;
  } else {
    impl_->data = json{{"tool_version", kToolVersion},
                       {"files", json::object()},
                       {"stages", json::object()}};
  }
}

void Manifest::record_config(const RunConfig& cfg) {
  impl_->data["config"] = config_snapshot(cfg);
  impl_->data["seed"] = cfg.selection.seed;
}

void Manifest::record_input(const std::string& stage, const fs::path& file) {
  verify_input(stage, file);
  impl_->data["stages"][stage]["inputs"][file.filename().string()] =
      file_hash(file);
}

void Manifest::record_output(const std::string& stage, const fs::path& file) {
  const std::string hash = file_hash(file);
  impl_->data["files"][file.filename().string()] = hash;
  impl_->data["stages"][stage]["outputs"][file.filename().string()] = hash;
}

void Manifest::verify_input(const std::string& stage, const fs::path& file) {
  const auto& files = impl_->data["files"];
  const std::string name = file.filename().string();
  if (!files.contains(name)) return;  // not produced by an earlier stage
  const std::string current = file_hash(file);
  if (files[name].get<std::string>() != current)
    throw ConfigError("stage " + stage + ": input " + name +
                      " changed since it was produced (expected hash " +
                      files[name].get<std::string>() + ", found " + current +
                      ")");
}

void Manifest::record_selected_rules(const std::vector<int>& indices) {
  impl_->data["selected_rule_indices"] = indices;
}

void Manifest::record_timing(const std::string& stage, double seconds) {
  // deliberately outside manifest.json; see header
  const fs::path p = out_dir_ / "timings.json";
  json t = json::object();
  if (fs::exists(p)) {
    std::ifstream in(p);
    in >> t;
  }
  t[stage] = seconds;
  std::ofstream out(p);
  out << t.dump(2) << "\n";
}

void Manifest::save() const {
  std::ofstream out(out_dir_ / "manifest.json");
  out << impl_->data.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Stage helpers

fs::path rules_file(const RunConfig& cfg) {
  return cfg.rules_path ? *cfg.rules_path : cfg.out_dir / "rules.json";
}
fs::path matrix_file(const RunConfig& cfg) { return cfg.out_dir / "scores.csv"; }
fs::path selected_rules_file(const RunConfig& cfg) {
  return cfg.out_dir / "selected_rules.json";
}
fs::path pool_matrix_file(const RunConfig& cfg) {
  return cfg.out_dir / "pool_scores.csv";
}
fs::path selected_ids_file(const RunConfig& cfg) {
  return cfg.out_dir / "selected.jsonl";
}

std::unique_ptr<Rater> make_rater(const RunConfig& cfg) {
  if (cfg.rater_kind == "mock") {
    std::map<int, int> groups;
    int rule = 0, group = 0;
    for (int size : cfg.mock_groups) {
      for (int m = 0; m < size; ++m) groups[rule++] = group;
      ++group;
    }
    return std::make_unique<MockRater>(cfg.selection.seed, std::move(groups));
  }
  if (cfg.rater_kind == "http") return std::make_unique<HttpRater>(cfg.endpoint);
  throw ConfigError("unknown rater kind: " + cfg.rater_kind);
}

namespace {

class StageTimer {
 public:
  StageTimer(Manifest& manifest, std::string stage)
      : manifest_(manifest),
        stage_(std::move(stage)),
        start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start_);
    manifest_.record_timing(stage_, elapsed.count());
  }

 private:
  Manifest& manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

ScoreMatrix maybe_drop_constant(const ScoreMatrix& S, bool drop) {
  if (!drop) return S;
  std::vector<int> keep;
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    const auto col = S.entries().col(j);
    const double var =
        (col.array() - col.mean()).square().sum() / col.size();
    if (var > 0) {
      keep.push_back(S.col_ids()[static_cast<std::size_t>(j)]);
    } else {
      std::cerr << "warning: dropping constant rule column rule_"
                << S.col_ids()[static_cast<std::size_t>(j)] << "\n";
    }
  }
  if (keep.size() == static_cast<std::size_t>(S.cols())) return S;
  if (keep.empty()) throw ZeroVarianceColumn(S.col_ids().front());
  return S.submatrix(keep);
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

void cmd_generate_rules(const RunConfig& cfg) {
  Manifest manifest(cfg.out_dir);
  StageTimer timer(manifest, "generate-rules");
  manifest.record_config(cfg);

  auto rater = make_rater(cfg);
  const TaskSpec spec = cfg.task_spec();
  const auto rules = rater->generate_rules(spec, cfg.selection.total_rules);

  const fs::path out = cfg.out_dir / "rules.json";
  save_rules(rules, out);
  manifest.record_output("generate-rules", out);
  manifest.save();
}

void cmd_rate(const RunConfig& cfg) {
  Manifest manifest(cfg.out_dir);
  StageTimer timer(manifest, "rate");
  manifest.record_config(cfg);

  const fs::path rules_path = rules_file(cfg);
  manifest.record_input("rate", rules_path);
  const auto rules = load_rules(rules_path);
  const auto dataset = load_jsonl(cfg.dataset_path);
  if (static_cast<std::size_t>(cfg.selection.batch_size) > dataset.size())
    throw ConfigError("batch size n exceeds dataset size");

  Rng batch_rng = Rng::derive(cfg.selection.seed, "batch");
  const auto batch = sample_batch(dataset, cfg.selection.batch_size, batch_rng);

  // resume: rows already present in a partial CSV are not re-queried
  std::vector<DataSample> todo;
  std::optional<ScoreMatrix> partial =
      load_score_matrix_if_exists(matrix_file(cfg));
  std::unordered_set<std::string> done;
  if (partial) {
    for (const auto& id : partial->row_ids()) done.insert(id);
  }
  for (const auto& s : batch)
    if (!done.count(s.id)) todo.push_back(s);

  auto rater = make_rater(cfg);
  const TaskSpec spec = cfg.task_spec();
  RateOptions opts;
  opts.max_in_flight = cfg.max_in_flight;
  opts.allow_missing = cfg.allow_missing;

  std::optional<ScoreMatrix> fresh;
  if (!todo.empty()) fresh = rate_matrix(*rater, spec, rules, todo, opts);

  // assemble rows in batch order
  std::vector<std::string> row_ids;
  std::vector<int> col_ids;
  for (const auto& r : rules) col_ids.push_back(r.index);
  Eigen::MatrixXd entries(batch.size(), col_ids.size());
  std::unordered_map<std::string, Eigen::Index> partial_rows, fresh_rows;
  if (partial)
    for (Eigen::Index i = 0; i < partial->rows(); ++i)
      partial_rows[partial->row_ids()[static_cast<std::size_t>(i)]] = i;
  if (fresh)
    for (Eigen::Index i = 0; i < fresh->rows(); ++i)
      fresh_rows[fresh->row_ids()[static_cast<std::size_t>(i)]] = i;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    row_ids.push_back(batch[i].id);
    if (auto it = partial_rows.find(batch[i].id); it != partial_rows.end())
      entries.row(static_cast<Eigen::Index>(i)) =
          partial->entries().row(it->second);
    else
      entries.row(static_cast<Eigen::Index>(i)) =
          fresh->entries().row(fresh_rows.at(batch[i].id));
  }

  const ScoreMatrix S(std::move(row_ids), std::move(col_ids),
                      std::move(entries));
  save_score_matrix(S, matrix_file(cfg));
  manifest.record_output("rate", matrix_file(cfg));
  manifest.save();
}

void cmd_select_rules(const RunConfig& cfg) {
  Manifest manifest(cfg.out_dir);
  StageTimer timer(manifest, "select-rules");
  manifest.record_config(cfg);

  manifest.record_input("select-rules", matrix_file(cfg));
  const ScoreMatrix S_raw = load_score_matrix(matrix_file(cfg));
  const ScoreMatrix S = maybe_drop_constant(S_raw, cfg.drop_constant_rules);

  const Kernel K = build_kernel(S, cfg.center_kernel);
  save_kernel_csv(K.entries(), cfg.out_dir / "kernel.csv");

  Rng dpp_rng = Rng::derive(cfg.selection.seed, "dpp");
  const std::vector<int> picked =
      sample_kdpp(K, cfg.selection.selected_rules, dpp_rng);

  std::vector<int> rule_indices;
  rule_indices.reserve(picked.size());
  for (int j : picked)
    rule_indices.push_back(S.col_ids()[static_cast<std::size_t>(j)]);

  const double rho = rule_correlation(S.submatrix(rule_indices));

  json out = {{"indices", rule_indices}, {"rule_correlation", rho}};
  {
    std::ofstream f(selected_rules_file(cfg));
    f << out.dump(2) << "\n";
  }
  save_indices_json(rule_indices, cfg.out_dir / "selected_indices.json");

  manifest.record_output("select-rules", cfg.out_dir / "kernel.csv");
  manifest.record_output("select-rules", selected_rules_file(cfg));
  manifest.record_output("select-rules", cfg.out_dir / "selected_indices.json");
  manifest.record_selected_rules(rule_indices);
  manifest.save();
}

void cmd_select_data(const RunConfig& cfg) {
  Manifest manifest(cfg.out_dir);
  StageTimer timer(manifest, "select-data");
  manifest.record_config(cfg);

  const fs::path rules_path = rules_file(cfg);
  manifest.record_input("select-data", rules_path);
  manifest.record_input("select-data", selected_rules_file(cfg));

  const auto all_rules = load_rules(rules_path);
  std::ifstream sel_in(selected_rules_file(cfg));
  if (!sel_in)
    throw ConfigError("selected rules file missing; run select-rules first");
  json sel;
  sel_in >> sel;
  const auto indices = sel.at("indices").get<std::vector<int>>();

  std::vector<Rule> rules;
  for (int idx : indices) {
    auto it = std::find_if(all_rules.begin(), all_rules.end(),
                           [&](const Rule& r) { return r.index == idx; });
    if (it == all_rules.end())
      throw ConfigError("selected rule index not found in rules file: " +
                        std::to_string(idx));
    rules.push_back(*it);
  }

  const auto pool = load_jsonl(cfg.dataset_path);
  if (static_cast<std::size_t>(cfg.selection.data_budget) > pool.size())
    throw ConfigError("data budget k exceeds pool size");

  auto rater = make_rater(cfg);
  const TaskSpec spec = cfg.task_spec();
  RateOptions opts;
  opts.max_in_flight = cfg.max_in_flight;
  opts.allow_missing = cfg.allow_missing;

  // chunked pool rating with per-chunk flush; resumable across runs
  std::optional<ScoreMatrix> partial =
      load_score_matrix_if_exists(pool_matrix_file(cfg));
  std::unordered_set<std::string> done;
  if (partial)
    for (const auto& id : partial->row_ids()) done.insert(id);

  std::vector<std::string> row_ids;
  std::vector<std::vector<double>> rows;
  auto append_matrix = [&](const ScoreMatrix& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      row_ids.push_back(M.row_ids()[static_cast<std::size_t>(i)]);
      std::vector<double> row(static_cast<std::size_t>(M.cols()));
      for (Eigen::Index j = 0; j < M.cols(); ++j)
        row[static_cast<std::size_t>(j)] = M.entries()(i, j);
      rows.push_back(std::move(row));
    }
  };
  if (partial) append_matrix(*partial);

  std::vector<DataSample> chunk;
  auto flush = [&] {
    if (chunk.empty()) return;
    append_matrix(rate_matrix(*rater, spec, rules, chunk, opts));
    chunk.clear();
    // persist progress
    Eigen::MatrixXd entries(rows.size(), rules.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rules.size(); ++j)
        entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rows[i][j];
    save_score_matrix(ScoreMatrix(row_ids, indices, std::move(entries)),
                      pool_matrix_file(cfg));
  };
  for (const auto& s : pool) {
    if (done.count(s.id)) continue;
    chunk.push_back(s);
    if (static_cast<int>(chunk.size()) >= cfg.chunk_size) flush();
  }
  flush();

  const ScoreMatrix pool_scores = load_score_matrix(pool_matrix_file(cfg));
  const QualityVector quality = aggregate_scores(pool_scores);

  std::vector<std::string> winners;
  if (cfg.deterministic) {
    winners = deterministic_topk(quality, cfg.selection.data_budget);
  } else {
    Rng gumbel_rng = Rng::derive(cfg.selection.seed, "gumbel");
    winners = gumbel_topk(quality, cfg.selection.data_budget,
                          cfg.selection.temperature, gumbel_rng);
  }

  {
    std::ofstream out(selected_ids_file(cfg));
    for (const auto& id : winners)
      out << json{{"id", id}}.dump() << "\n";
  }
  // full records re-materialized alongside
  {
    std::unordered_map<std::string, const DataSample*> by_id;
    for (const auto& s : pool) by_id.emplace(s.id, &s);
    std::ofstream out(cfg.out_dir / "selected_full.jsonl");
    for (const auto& id : winners) {
      const DataSample* s = by_id.at(id);
      json rec = {{"id", s->id}, {"text", s->text}};
      if (!s->meta.empty()) rec["meta"] = s->meta;
      out << rec.dump() << "\n";
    }
  }

  manifest.record_output("select-data", pool_matrix_file(cfg));
  manifest.record_output("select-data", selected_ids_file(cfg));
  manifest.record_output("select-data", cfg.out_dir / "selected_full.jsonl");
  manifest.save();
}

void cmd_eval(const RunConfig& cfg) {
  Manifest manifest(cfg.out_dir);
  StageTimer timer(manifest, "eval");
  manifest.record_config(cfg);

  SyntheticModelConfig syn = cfg.synthetic;
  if (syn.groups.empty())
    syn.groups.assign(static_cast<std::size_t>(syn.total_rules), 1);
  const auto [S, gt] = synthetic_scores(syn);

  // rule-free baseline column from the same noise family
  Rng norule_rng = Rng::derive(syn.seed, "synthetic/norule");
  Eigen::MatrixXd norule_col(S.rows(), 1);
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    norule_col(i, 0) = std::clamp(
        gt.values[static_cast<std::size_t>(i)] +
            syn.group_noise * norule_rng.normal(),
        0.0, 1.0);
  const double norule_mse =
      mse(ScoreMatrix(S.row_ids(), {0}, std::move(norule_col)), gt);

  EvaluationOptions opts;
  opts.subset_cap = cfg.eval_subset_cap;
  opts.dpp_trials = cfg.eval_trials;
  const SubsetExperimentReport report =
      run_evaluation(S, gt, norule_mse, opts, cfg.selection.seed);

  json jreport = {{"norule_mse", norule_mse},
                  {"per_r", json::array()}};
  std::ofstream csv(cfg.out_dir / "report.csv");
  csv << "r,num_subsets,pearson_rho_vs_mse,mean_mse_random,mean_mse_dpp,"
         "mean_rc_random,mean_rc_dpp,win_rate_vs_norule,win_rate_vs_baseline\n";
  for (const auto& rec : report.per_r) {
    jreport["per_r"].push_back({{"r", rec.r},
                                {"num_subsets", rec.num_subsets},
                                {"pearson_rho_vs_mse", rec.pearson_rho_vs_mse},
                                {"mean_mse_random", rec.mean_mse_random},
                                {"mean_mse_dpp", rec.mean_mse_dpp},
                                {"mean_rc_random", rec.mean_rc_random},
                                {"mean_rc_dpp", rec.mean_rc_dpp},
                                {"win_rate_vs_norule", rec.win_rate_vs_norule},
                                {"win_rate_vs_baseline",
                                 rec.win_rate_vs_baseline}});
    csv << rec.r << ',' << rec.num_subsets << ','
        << format_score(rec.pearson_rho_vs_mse) << ','
        << format_score(rec.mean_mse_random) << ','
        << format_score(rec.mean_mse_dpp) << ','
        << format_score(rec.mean_rc_random) << ','
        << format_score(rec.mean_rc_dpp) << ','
        << format_score(rec.win_rate_vs_norule) << ','
        << format_score(rec.win_rate_vs_baseline) << "\n";
  }
  csv.close();
  {
    std::ofstream out(cfg.out_dir / "report.json");
    out << jreport.dump(2) << "\n";
  }

  // MSE histograms per r, bins as lo,hi,count
  fs::create_directories(cfg.out_dir / "hist");
  for (const auto& rec : report.per_r) {
    Rng trial_rng = Rng::derive(cfg.selection.seed, "eval/trials", rec.r);
    const auto cmp = dpp_vs_random(S, &gt, rec.r, cfg.eval_trials, trial_rng);
    std::ofstream hist(cfg.out_dir / "hist" /
                       ("mse_r" + std::to_string(rec.r) + ".csv"));
    hist << "bin_lo,bin_hi,count\n";
    for (const auto& [lo, hi, count] : mse_histogram(cmp.mse_dpp, 20))
      hist << format_score(lo) << ',' << format_score(hi) << ',' << count
           << "\n";
  }

  manifest.record_output("eval", cfg.out_dir / "report.json");
  manifest.record_output("eval", cfg.out_dir / "report.csv");
  manifest.save();
}

void cmd_report(const RunConfig& cfg) {
  const fs::path p = cfg.out_dir / "manifest.json";
  std::ifstream in(p);
  if (!in) throw ConfigError("no manifest at " + p.string());
  json m;
  in >> m;

  bool ok = true;
  for (const auto& [name, hash] : m["files"].items()) {
    const fs::path file = cfg.out_dir / name;
    if (!fs::exists(file)) {
      std::cout << "MISSING  " << name << "\n";
      ok = false;
      continue;
    }
    const std::string current = file_hash(file);
    const bool match = current == hash.get<std::string>();
    std::cout << (match ? "OK       " : "MODIFIED ") << name << "\n";
    ok = ok && match;
  }
  std::cout << "tool: " << m.value("tool_version", "?")
            << "  seed: " << m.value("seed", 0ULL) << "\n";
  if (!ok) throw ConfigError("manifest verification failed");
}

}  // namespace rulesel
