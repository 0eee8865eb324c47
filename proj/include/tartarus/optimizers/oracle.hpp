// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/objectives/tasks.hpp"
#include "tartarus/providers/evaluator.hpp"
#include "tartarus/selfies/selfies.hpp"

namespace tartarus::opt {

struct Scored {
  std::string key;
  std::string smiles;
  double fitness = 0.0;
  bool feasible = false;
  // Cumulative budget once this proposal was admitted.
  std::size_t budget = 0;
};

struct OracleResult {
  // One entry per admitted proposal, a prefix of the batch.
  std::vector<Scored> scored;
  bool exhausted = false;
};

/// Budgeted batch fitness; maximized.
class FitnessOracle {
 public:
  virtual ~FitnessOracle() = default;
  [[nodiscard]] virtual OracleResult evaluate(std::span<const mol::Molecule> batch) = 0;
};

/// A benchmark task through the provider evaluator. Molecules failing the
/// structural part of the task's bank are never sent to the provider.
class TaskOracle final : public FitnessOracle {
 public:
  TaskOracle(const obj::TaskEvaluator& task, providers::Evaluator& evaluator);
  [[nodiscard]] OracleResult evaluate(std::span<const mol::Molecule> batch) override;

  /// Violated structural rules (patterns and local descriptors only).
  [[nodiscard]] std::vector<std::string> structural_violations(const mol::Molecule& m) const;

 private:
  const obj::TaskEvaluator& task_;
  providers::Evaluator& evaluator_;
};

/// In-process fitness with a proposal budget; every molecule is feasible.
class FunctionOracle final : public FitnessOracle {
 public:
  FunctionOracle(std::function<double(const mol::Molecule&)> fn, std::size_t max_proposals);
  [[nodiscard]] OracleResult evaluate(std::span<const mol::Molecule> batch) override;
  [[nodiscard]] std::size_t consumed() const noexcept { return consumed_; }

 private:
  std::function<double(const mol::Molecule&)> fn_;
  std::size_t max_proposals_;
  std::size_t consumed_ = 0;
};

struct TraceEntry {
  int iteration = 0;
  std::size_t index = 0;
  std::string key;
  std::string smiles;
  double fitness = 0.0;
  bool feasible = false;
  std::size_t budget = 0;
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct RunTrace {
  std::string optimizer;
  std::vector<TraceEntry> proposals;
  // Index 0 holds the evaluated seed population.
  std::vector<double> best_so_far;
  std::string best_smiles;
  double best_fitness = -1e300;
  bool budget_exhausted = false;
  // Set when the configuration cannot produce new structures.
  bool degenerate = false;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// One structured line per proposal.
[[nodiscard]] std::string trace_to_jsonl(const RunTrace& t);

/// Population member carried between iterations.
struct Member {
  selfies::SelfiesSequence seq;
  Scored score;
};

/// Records a scored batch into the trace; returns the number admitted.
std::size_t record_batch(RunTrace& trace, int iteration, const OracleResult& result);
/// Appends the best fitness so far (or the previous value) for one iteration.
void close_iteration(RunTrace& trace);

/// Higher fitness first; ties by canonical key.
[[nodiscard]] bool better(const Scored& a, const Scored& b);

}  // namespace tartarus::opt
