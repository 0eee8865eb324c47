// SPDX-License-Identifier: Apache-2.0
#include "tartarus/objectives/tasks.hpp"

#include <algorithm>
#include <cmath>

#include "tartarus/descriptors/descriptors.hpp"

namespace tartarus::obj {
namespace {

using Values = std::map<std::string, double, std::less<>>;

double get(const Values& v, std::string_view name) {
  const auto it = v.find(name);
  if (it == v.end()) throw MissingProperty(std::string(name));
  return it->second;
}

TaskDefinition make(std::string name, TaskFamily family, std::string description, std::string bank,
                    std::vector<std::string> props) {
  TaskDefinition t;
  t.name = std::move(name);
  t.family = family;
  t.description = std::move(description);
  t.bank = std::move(bank);
  t.objective_properties = std::move(props);
  if (family == TaskFamily::Reactivity) {
    t.population = 100;
    t.iterations = 50;
  }
  return t;
}

}  // namespace

std::string_view family_name(TaskFamily f) {
  switch (f) {
    case TaskFamily::Opv: return "opv";
    case TaskFamily::Emitter: return "emitter";
    case TaskFamily::Docking: return "docking";
    case TaskFamily::Reactivity: return "reactivity";
    case TaskFamily::Toy: return "toy";
  }
  return "?";
}

const std::vector<TaskDefinition>& task_registry() {
  static const std::vector<TaskDefinition> kTasks = {
      make("pce_pcbm_sas", TaskFamily::Opv, "maximize PCE(donor with PCBM) - SAscore", "",
           {"homo_ev", "lumo_ev", "sascore"}),
      make("pce_pcdtbt_sas", TaskFamily::Opv, "maximize PCE(acceptor with PCDTBT) - SAscore", "",
           {"homo_ev", "lumo_ev", "sascore"}),
      make("singlet_triplet", TaskFamily::Emitter, "minimize dE(S1-T1)", "emitter_sa", {"st_gap_ev"}),
      make("oscillator_strength", TaskFamily::Emitter, "maximize f12", "emitter_sa", {"osc_strength"}),
      make("emitter_composite", TaskFamily::Emitter, "maximize f12 - dE(S1-T1) - |dE(S0-S1) - 3.2 eV|",
           "emitter_sa", {"st_gap_ev", "osc_strength", "vee_ev"}),
      make("docking_1syh", TaskFamily::Docking, "minimize the 1SYH docking score", "docking", {"docking_1syh"}),
      make("docking_6y2f", TaskFamily::Docking, "minimize the 6Y2F docking score", "docking", {"docking_6y2f"}),
      make("docking_4lde", TaskFamily::Docking, "minimize the 4LDE docking score", "docking", {"docking_4lde"}),
      make("activation_energy", TaskFamily::Reactivity, "minimize dE_act", "reactivity", {"dE_act_kcal", "dE_rxn_kcal"}),
      make("reaction_energy", TaskFamily::Reactivity, "minimize dE_rxn", "reactivity", {"dE_act_kcal", "dE_rxn_kcal"}),
      make("activation_plus_reaction", TaskFamily::Reactivity, "minimize dE_act + dE_rxn", "reactivity_sa",
           {"dE_act_kcal", "dE_rxn_kcal"}),
      make("reaction_minus_activation", TaskFamily::Reactivity, "minimize -dE_act + dE_rxn", "reactivity_sa",
           {"dE_act_kcal", "dE_rxn_kcal"}),
      make("toy_heavy_atoms", TaskFamily::Toy, "maximize the heavy atom count", "", {}),
  };
  return kTasks;
}

const TaskDefinition& find_task(std::string_view name) {
  for (const auto& t : task_registry()) {
    if (t.name == name) return t;
  }
  throw UnknownTask("unknown task '" + std::string(name) + "'");
}

double task_score(const TaskDefinition& task, const Values& v, const ScharberConfig& cfg, int heavy_atoms) {
  const auto& n = task.name;
  if (task.family == TaskFamily::Opv) {
    const auto e = calibrate(make_frontier(get(v, "homo_ev"), get(v, "lumo_ev")), cfg);
    const auto mode = n == "pce_pcbm_sas" ? PceMode::DonorPcbm : PceMode::AcceptorPcdtbt;
    return scharber_pce(e, mode, cfg) - get(v, "sascore");
  }
  if (n == "singlet_triplet") return -get(v, "st_gap_ev");
  if (n == "oscillator_strength") return get(v, "osc_strength");
  if (n == "emitter_composite") {
    return get(v, "osc_strength") - get(v, "st_gap_ev") - std::abs(get(v, "vee_ev") - kEmitterTargetExcitation);
  }
  if (task.family == TaskFamily::Docking) return -get(v, task.objective_properties.front());
  if (n == "activation_energy") return -get(v, "dE_act_kcal");
  if (n == "reaction_energy") return -get(v, "dE_rxn_kcal");
  if (n == "activation_plus_reaction") return -(get(v, "dE_act_kcal") + get(v, "dE_rxn_kcal"));
  if (n == "reaction_minus_activation") return -(-get(v, "dE_act_kcal") + get(v, "dE_rxn_kcal"));
  if (n == "toy_heavy_atoms") return heavy_atoms;
  throw UnknownTask("no fitness formula for task '" + n + "'");
}

TaskEvaluator::TaskEvaluator(const TaskDefinition& task, TaskContext context)
    : task_(task), context_(std::move(context)) {
  required_ = task_.objective_properties;
  if (!task_.bank.empty()) {
    bank_ = substructure::shipped_bank(task_.bank, context_.bank_options);
    for (const auto& d : bank_->descriptors()) {
      if (desc::is_local_descriptor(d)) continue;
      if (std::find(required_.begin(), required_.end(), d) == required_.end()) required_.push_back(d);
    }
  }
}

TaskResult TaskEvaluator::operator()(const mol::Molecule& m, const providers::PropertyMap& properties) const {
  Values values;
  for (const auto& name : required_) {
    const auto it = properties.find(name);
    if (it == properties.end()) throw MissingProperty(name);
    const auto& unit = providers::property_unit(name);
    if (it->second.unit != unit) {
      throw UnitMismatch("property '" + name + "' has unit '" + it->second.unit + "', expected '" + unit + "'");
    }
    values[name] = it->second.value;
  }

  TaskResult r;
  auto fail = [&](std::vector<std::string> violations) {
    r.fitness = task_.penalty_fitness;
    r.feasible = false;
    r.violations = std::move(violations);
    return r;
  };
  if (m.empty()) return fail({"empty_molecule"});
  if (bank_) {
    auto descriptors = desc::local_descriptors(m);
    for (const auto& [k, v] : values) descriptors[k] = v;
    auto verdict = substructure::apply_filter_bank(m, *bank_, descriptors);
    if (!verdict.pass) return fail(std::move(verdict.violations));
  }
  if (task_.family == TaskFamily::Reactivity && context_.envelope) {
    if (context_.envelope->is_outlier({values.at("dE_rxn_kcal"), values.at("dE_act_kcal")})) {
      return fail({"energy_outlier"});
    }
  }
  r.fitness = task_score(task_, values, context_.scharber, m.heavy_atom_count());
  return r;
}

}  // namespace tartarus::obj
