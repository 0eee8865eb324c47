// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tartarus/harness/dataset.hpp"
#include "tartarus/objectives/tasks.hpp"
#include "tartarus/optimizers/oracle.hpp"
#include "tartarus/providers/provider.hpp"

namespace tartarus::harness {

class UnknownOptimizer : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[nodiscard]] const std::vector<std::string>& optimizer_names();

struct BenchmarkConfig {
  std::string optimizer = "ga";
  std::size_t budget = 5000;
  bool unique_budget = false;
  double max_wall_seconds = 86400.0;
  // Task defaults when unset.
  std::optional<std::size_t> population;
  std::optional<int> iterations;
  int reps = 5;
  std::uint64_t seed = 0;
  // Provider results persisted across invocations as <dir>/<task>.cache.jsonl.
  std::optional<std::filesystem::path> cache_dir;
  obj::TaskContext context;
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  double best_fitness = 0.0;
  std::string best_smiles;
  std::vector<double> best_so_far;
  std::size_t proposals = 0;
  std::size_t feasible = 0;
  double success_rate = 0.0;
  // Over every non-empty proposal of the repetition; 0 below two.
  double diversity = 0.0;
  bool budget_exhausted = false;
  bool degenerate = false;
  std::size_t provider_requests = 0;
  double wall_seconds = 0.0;
  opt::RunTrace trace;
};

struct RunReport {
  std::string task;
  std::string optimizer;
  std::vector<RepetitionResult> reps;
  double mean_best = 0.0;
  // Population standard deviation of the per-repetition bests.
  double sd_best = 0.0;
  // Feasible fraction over the proposals of all repetitions.
  double success_rate = 0.0;
  double mean_diversity = 0.0;
  double wall_seconds = 0.0;
};

/// Repetitions r = 0..reps-1 run sequentially with seed + r, each with its
/// own budget; later repetitions reuse provider results cached by earlier
/// ones. GA seeds are the best population_size reference molecules and
/// Markov-HC seeds the best top_k, both trained on the dataset's 80% split.
[[nodiscard]] RunReport run_benchmark(const obj::TaskDefinition& task, const Dataset& dataset,
                                      providers::Provider& provider, const BenchmarkConfig& cfg);

/// Population mean and standard deviation.
struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};
[[nodiscard]] MeanSd mean_sd(const std::vector<double>& v);

/// Machine-readable report: one line per repetition and a summary line.
/// Wall-clock values are left out so reruns compare byte for byte.
[[nodiscard]] std::string report_to_jsonl(const RunReport& r);
/// Wall-clock values only.
[[nodiscard]] std::string report_wall_json(const RunReport& r);
/// Aligned table, one row per report.
[[nodiscard]] std::string reports_table(const std::vector<RunReport>& reports);
[[nodiscard]] std::string reports_csv(const std::vector<RunReport>& reports);

struct TimingConfig {
  std::vector<std::string> optimizers{"ga", "markov-hc"};
  std::size_t unique_target = 10000;
  int reps = 5;
  std::uint64_t seed = 0;
  // Proposal cap per sampling run.
  std::size_t max_proposals = 1000000;
};

struct TimingRow {
  std::string optimizer;
  MeanSd precondition_seconds;
  MeanSd sample_seconds;
  std::vector<std::size_t> unique_counts;
};

/// Pre-conditioning on the training split, then sampling unique_target
/// unique molecules under a constant fitness; the GA samples one
/// generation of unique_target children.
[[nodiscard]] std::vector<TimingRow> run_timing(const Dataset& dataset, const TimingConfig& cfg);
[[nodiscard]] std::string timing_table(const std::vector<TimingRow>& rows);

}  // namespace tartarus::harness
