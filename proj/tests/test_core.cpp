#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "rulesel/dataset.hpp"
#include "rulesel/io.hpp"
#include "rulesel/score_matrix.hpp"

using namespace rulesel;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

ScoreMatrix make_matrix(int n, int r, std::uint64_t seed = 7) {
  Rng rng(seed);
  Eigen::MatrixXd M(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) M(i, j) = rng.uniform();
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
  std::vector<int> cols;
  for (int j = 0; j < r; ++j) cols.push_back(j);
  return ScoreMatrix(ids, cols, M);
}

}  // namespace

TEST_CASE("load_jsonl basic construction") {
  const auto p = write_temp("ds.jsonl", R"({"text":"a"}
{"text":"b"}
)");
  const auto samples = load_jsonl(p);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].id == "ds.jsonl:1");
  CHECK(samples[1].id == "ds.jsonl:2");
  CHECK(samples[0].text == "a");
}

TEST_CASE("load_jsonl empty file") {
  const auto p = write_temp("empty.jsonl", "");
  CHECK(load_jsonl(p).empty());
}

TEST_CASE("load_jsonl reports bad line number") {
  const auto p = write_temp("bad.jsonl", R"({"text":"a"}
{"text":"b"}
not json
)");
  CHECK_THROWS_WITH_AS(load_jsonl(p), doctest::Contains(":3"), ConfigError);
}

TEST_CASE("load_jsonl keeps explicit ids and meta") {
  const auto p = write_temp("meta.jsonl",
                            R"({"id":"x1","text":"a","meta":{"src":"cc"}}
)");
  const auto samples = load_jsonl(p);
  CHECK(samples[0].id == "x1");
  CHECK(samples[0].meta.at("src") == "cc");
}

TEST_CASE("load_jsonl missing file") {
  CHECK_THROWS_AS(load_jsonl("/nonexistent/nope.jsonl"), ConfigError);
}

TEST_CASE("sample_batch exhaustive draw is a permutation") {
  std::vector<DataSample> ds;
  for (int i = 0; i < 6; ++i)
    ds.emplace_back("id" + std::to_string(i), "t" + std::to_string(i));
  Rng rng(1);
  const auto batch = sample_batch(ds, 6, rng);
  std::set<std::string> ids;
  for (const auto& s : batch) ids.insert(s.id);
  CHECK(ids.size() == 6);
}

TEST_CASE("sample_batch n=0 and oversize") {
  std::vector<DataSample> ds{{"a", "x"}, {"b", "y"}};
  Rng rng(1);
  CHECK(sample_batch(ds, 0, rng).empty());
  CHECK_THROWS_AS(sample_batch(ds, 3, rng), ConfigError);
}

TEST_CASE("sample_batch determinism and no duplicates") {
  std::vector<DataSample> ds;
  for (int i = 0; i < 40; ++i)
    ds.emplace_back("id" + std::to_string(i), "t");
  Rng a(42), b(42), c(43);
  const auto batch_a = sample_batch(ds, 10, a);
  const auto batch_b = sample_batch(ds, 10, b);
  const auto batch_c = sample_batch(ds, 10, c);
  for (std::size_t i = 0; i < 10; ++i) CHECK(batch_a[i].id == batch_b[i].id);
  bool differs = false;
  for (std::size_t i = 0; i < 10; ++i)
    differs = differs || batch_a[i].id != batch_c[i].id;
  CHECK(differs);
  std::set<std::string> ids;
  for (const auto& s : batch_a) ids.insert(s.id);
  CHECK(ids.size() == 10);
}

TEST_CASE("submatrix identity, reorder, and errors") {
  const auto S = make_matrix(4, 3);

  const auto same = S.submatrix({0, 1, 2});
  CHECK(same.entries() == S.entries());

  const auto swapped = S.submatrix({2, 0});
  CHECK(swapped.cols() == 2);
  CHECK(swapped.entries().col(0) == S.entries().col(2));
  CHECK(swapped.entries().col(1) == S.entries().col(0));

  CHECK_THROWS_AS(S.submatrix({7}), ConfigError);
  CHECK_THROWS_AS(S.submatrix({0, 0}), ConfigError);
}

TEST_CASE("submatrix composition property") {
  const auto S = make_matrix(5, 4);
  const auto AB = S.submatrix({3, 1, 0}).submatrix({1, 0});
  const auto direct = S.submatrix({1, 0});
  CHECK(AB.entries() == direct.entries());
  CHECK(AB.col_ids() == direct.col_ids());
}

TEST_CASE("score matrix rejects out-of-range and duplicates") {
  Eigen::MatrixXd M(2, 1);
  M << 0.5, 1.5;
  CHECK_THROWS_AS(ScoreMatrix({"a", "b"}, {0}, M), ConfigError);
  M << 0.5, 0.5;
  CHECK_THROWS_AS(ScoreMatrix({"a", "a"}, {0}, M), ConfigError);
}

TEST_CASE("score matrix CSV round-trip is bit-exact at 9 digits") {
  const auto S = make_matrix(8, 3, 11);
  // freeze to 9 significant digits first
  Eigen::MatrixXd M = S.entries();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      M(i, j) = std::stod(format_score(M(i, j)));
  const ScoreMatrix S9(S.row_ids(), S.col_ids(), M);

  const fs::path p = fs::temp_directory_path() / "scores_rt.csv";
  save_score_matrix(S9, p);
  const auto back = load_score_matrix(p);
  CHECK(back.row_ids() == S9.row_ids());
  CHECK(back.col_ids() == S9.col_ids());
  CHECK(back.entries() == S9.entries());
}

TEST_CASE("ground truth CSV round-trip") {
  GroundTruthVector gt({"a", "b"}, {0.25, 1.0});
  const fs::path p = fs::temp_directory_path() / "gt_rt.csv";
  save_ground_truth(gt, p);
  const auto back = load_ground_truth(p);
  CHECK(back.ids == gt.ids);
  CHECK(back.values == gt.values);
}

TEST_CASE("domain type invariants") {
  CHECK_THROWS_AS(DataSample("", "text"), ConfigError);
  CHECK_THROWS_AS(DataSample("id", ""), ConfigError);
  CHECK_THROWS_AS(Rule(0, "", ""), ConfigError);
  CHECK_THROWS_AS(GroundTruthVector({"a"}, {1.5}), ConfigError);
  SelectionConfig cfg;
  cfg.selected_rules = cfg.total_rules + 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
