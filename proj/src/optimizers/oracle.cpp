// SPDX-License-Identifier: Apache-2.0
#include "tartarus/optimizers/oracle.hpp"

#include <json.hpp>

#include "tartarus/descriptors/descriptors.hpp"
#include "tartarus/molgraph/canonical.hpp"

namespace tartarus::opt {

TaskOracle::TaskOracle(const obj::TaskEvaluator& task, providers::Evaluator& evaluator)
    : task_(task), evaluator_(evaluator) {}

std::vector<std::string> TaskOracle::structural_violations(const mol::Molecule& m) const {
  if (!task_.bank()) return {};
  return substructure::apply_filter_bank(m, *task_.bank(), desc::local_descriptors(m), true).violations;
}

OracleResult TaskOracle::evaluate(std::span<const mol::Molecule> batch) {
  const auto res = evaluator_.evaluate(batch, task_.required_properties(),
                                       [this](const mol::Molecule& m) { return structural_violations(m); });
  OracleResult out;
  out.exhausted = res.budget_exhausted || evaluator_.exhausted();
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto& r = res.records[i];
    Scored s;
    s.key = r.key;
    s.smiles = r.smiles;
    s.budget = r.budget_after;
    s.fitness = task_.task().penalty_fitness;
    s.feasible = false;
    if (r.status == providers::Status::Ok) {
      const auto t = task_(batch[i], r.values);
      s.fitness = t.fitness;
      s.feasible = t.feasible;
    }
    out.scored.push_back(std::move(s));
  }
  return out;
}

FunctionOracle::FunctionOracle(std::function<double(const mol::Molecule&)> fn, std::size_t max_proposals)
    : fn_(std::move(fn)), max_proposals_(max_proposals) {}

OracleResult FunctionOracle::evaluate(std::span<const mol::Molecule> batch) {
  OracleResult out;
  for (const auto& m : batch) {
    if (consumed_ >= max_proposals_) {
      out.exhausted = true;
      break;
    }
    ++consumed_;
    Scored s;
    s.key = mol::canonical_key(m);
    s.smiles = mol::canonical_smiles(m);
    s.fitness = fn_(m);
    s.feasible = true;
    s.budget = consumed_;
    out.scored.push_back(std::move(s));
  }
  if (consumed_ >= max_proposals_) out.exhausted = true;
  return out;
}

std::string trace_to_jsonl(const RunTrace& t) {
  std::string out;
  for (const auto& e : t.proposals) {
    nlohmann::json j;
    j["iteration"] = e.iteration;
    j["index"] = e.index;
    j["key"] = e.key;
    j["smiles"] = e.smiles;
    j["fitness"] = e.fitness;
    j["budget"] = e.budget;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::size_t record_batch(RunTrace& trace, int iteration, const OracleResult& result) {
  for (const auto& s : result.scored) {
    TraceEntry e;
    e.iteration = iteration;
    e.index = trace.proposals.size();
    e.key = s.key;
    e.smiles = s.smiles;
    e.fitness = s.fitness;
    e.feasible = s.feasible;
    e.budget = s.budget;
    trace.proposals.push_back(std::move(e));
    if (s.fitness > trace.best_fitness) {
      trace.best_fitness = s.fitness;
      trace.best_smiles = s.smiles;
    }
  }
  if (result.exhausted) trace.budget_exhausted = true;
  return result.scored.size();
}

void close_iteration(RunTrace& trace) { trace.best_so_far.push_back(trace.best_fitness); }

bool better(const Scored& a, const Scored& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.key < b.key;
}

}  // namespace tartarus::opt
