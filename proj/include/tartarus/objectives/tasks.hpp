// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/objectives/envelope.hpp"
#include "tartarus/objectives/scharber.hpp"
#include "tartarus/providers/catalogue.hpp"
#include "tartarus/substructure/filter_bank.hpp"

namespace tartarus::obj {

class MissingProperty : public std::runtime_error {
 public:
  explicit MissingProperty(const std::string& name)
      : std::runtime_error("missing property '" + name + "'"), name_(name) {}
  [[nodiscard]] const std::string& property() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnitMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownTask : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr double kPenaltyFitness = -1e4;
constexpr double kEmitterTargetExcitation = 3.2;

enum class TaskFamily { Opv, Emitter, Docking, Reactivity, Toy };

[[nodiscard]] std::string_view family_name(TaskFamily f);

struct TaskDefinition {
  std::string name;
  TaskFamily family = TaskFamily::Toy;
  std::string description;
  // Shipped filter bank gating the fitness; empty for none.
  std::string bank;
  // Provider properties entering the fitness formula.
  std::vector<std::string> objective_properties;
  double penalty_fitness = kPenaltyFitness;
  int population = 500;
  int iterations = 10;
};

/// The twelve benchmark tasks followed by a provider-free toy task
/// (fitness = heavy atom count) for smoke runs.
[[nodiscard]] const std::vector<TaskDefinition>& task_registry();
[[nodiscard]] const TaskDefinition& find_task(std::string_view name);

struct TaskContext {
  ScharberConfig scharber = default_scharber_config();
  // Reactivity tasks penalize envelope outliers when set.
  std::optional<OutlierEnvelope> envelope;
  substructure::BankOptions bank_options;
};

struct TaskResult {
  double fitness = 0.0;
  bool feasible = true;
  std::vector<std::string> violations;
};

/// Fitness formula on plain values (no gating); `values` must hold every
/// objective property. Maximized: minimized quantities enter negated.
[[nodiscard]] double task_score(const TaskDefinition& task, const std::map<std::string, double, std::less<>>& values,
                                const ScharberConfig& cfg, int heavy_atoms = 0);

/// A task with its filter bank resolved; immutable and shareable.
class TaskEvaluator {
 public:
  explicit TaskEvaluator(const TaskDefinition& task, TaskContext context = {});

  [[nodiscard]] const TaskDefinition& task() const noexcept { return task_; }
  [[nodiscard]] const TaskContext& context() const noexcept { return context_; }
  [[nodiscard]] const std::optional<substructure::FilterBank>& bank() const noexcept { return bank_; }

  /// Objective properties plus bank descriptors not computed locally.
  [[nodiscard]] const std::vector<std::string>& required_properties() const noexcept { return required_; }

  /// Throws MissingProperty or UnitMismatch; constraint failures return the
  /// penalty fitness with feasible = false. The empty molecule is infeasible.
  [[nodiscard]] TaskResult operator()(const mol::Molecule& m, const providers::PropertyMap& properties) const;

 private:
  TaskDefinition task_;
  TaskContext context_;
  std::optional<substructure::FilterBank> bank_;
  std::vector<std::string> required_;
};

}  // namespace tartarus::obj
