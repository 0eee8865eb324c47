// SPDX-License-Identifier: Apache-2.0
#include "tartarus/optimizers/timing.hpp"

#include <set>
#include <stdexcept>

#include "tartarus/molgraph/canonical.hpp"

namespace tartarus::opt {
namespace {

// Returns true once n unique molecules have been seen.
bool absorb(SampleOutcome& out, std::set<std::string>& seen, const mol::Molecule& m, std::size_t n) {
  ++out.proposals;
  if (!m.empty()) {
    auto key = mol::canonical_key(m);
    if (seen.insert(key).second) out.unique_keys.push_back(std::move(key));
  }
  return out.unique_keys.size() >= n;
}

}  // namespace

GaPrepared precondition_ga(const std::vector<mol::Molecule>& dataset) {
  GaPrepared p;
  p.sequences = encode_all(dataset);
  if (p.sequences.empty()) throw std::invalid_argument("no encodable molecule in the dataset");
  p.alphabet = selfies::alphabet_from(p.sequences);
  return p;
}

SampleOutcome sample_ga(const GaPrepared& prepared, std::size_t n, const GaConfig& cfg, std::size_t max_proposals) {
  cfg.validate();
  util::Rng rng(cfg.rng_seed);
  SampleOutcome out;
  std::set<std::string> seen;
  if (n == 0) return out;
  std::vector<Member> population;
  for (const auto& s : prepared.sequences) population.push_back({s, Scored{"", "", 1.0, true, 0}});
  while (out.proposals < max_proposals) {
    auto children = ga_offspring(population, cfg.population_size, cfg, prepared.alphabet, rng);
    std::vector<Member> next;
    next.reserve(children.size());
    for (auto& c : children) {
      if (out.proposals >= max_proposals) break;
      if (absorb(out, seen, selfies::decode(c), n)) return out;
      next.push_back({std::move(c), Scored{"", "", 1.0, true, 0}});
    }
    population = std::move(next);
  }
  return out;
}

MarkovModel precondition_markov(const std::vector<mol::Molecule>& dataset, const MarkovHcConfig& cfg) {
  MarkovModel model(cfg.order, cfg.smoothing);
  model.fit(encode_all(dataset));
  return model;
}

SampleOutcome sample_markov(const MarkovModel& model, std::size_t n, const MarkovHcConfig& cfg,
                            std::size_t max_proposals) {
  util::Rng rng(cfg.rng_seed);
  SampleOutcome out;
  std::set<std::string> seen;
  if (n == 0) return out;
  while (out.proposals < max_proposals) {
    if (absorb(out, seen, selfies::decode(model.complete({}, cfg.max_length, rng)), n)) break;
  }
  return out;
}

}  // namespace tartarus::opt
