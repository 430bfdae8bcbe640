#ifndef RULESEL_DATASET_HPP
#define RULESEL_DATASET_HPP

#include <filesystem>
#include <vector>

#include "rulesel/rng.hpp"
#include "rulesel/types.hpp"

namespace rulesel {

// JSON Lines ingestion. Each line is an object with required "text",
// optional "id" and "meta". Missing ids are synthesized as
// "<filename>:<line>" so reruns over the same file are stable.
std::vector<DataSample> load_jsonl(const std::filesystem::path& path);

// n distinct samples drawn uniformly without replacement.
std::vector<DataSample> sample_batch(const std::vector<DataSample>& dataset,
                                     int n, Rng& rng);

}  // namespace rulesel

#endif  // RULESEL_DATASET_HPP
