// SPDX-License-Identifier: Apache-2.0
#include "tartarus/optimizers/ga.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/util/rng.hpp"

namespace tartarus::opt {
namespace {

const Member& tournament(const std::vector<Member>& pop, std::size_t size, util::Rng& rng) {
  const Member* best = nullptr;
  for (std::size_t k = 0; k < size; ++k) {
    const auto& c = pop[util::uniform_index(rng, pop.size())];
    if (best == nullptr || better(c.score, best->score)) best = &c;
  }
  return *best;
}

}  // namespace

void GaConfig::validate() const {
  if (population_size == 0) throw std::invalid_argument("population size must be positive");
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (tournament_size == 0) throw std::invalid_argument("tournament size must be positive");
  if (elite_count > population_size) throw std::invalid_argument("elite count exceeds the population");
  if (crossover_rate < 0.0 || mutation_rate < 0.0 || crossover_rate + mutation_rate <= 0.0) {
    throw std::invalid_argument("operator rates must be non-negative with a positive sum");
  }
}

std::vector<selfies::SelfiesSequence> ga_offspring(const std::vector<Member>& population, std::size_t count,
                                                   const GaConfig& cfg, const std::vector<std::string>& alphabet,
                                                   util::Rng& rng) {
  const double p_cross = cfg.crossover_rate / (cfg.crossover_rate + cfg.mutation_rate);
  selfies::MutationOptions mo;
  mo.alphabet = alphabet;
  std::vector<selfies::SelfiesSequence> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    if (util::uniform_real(rng) < p_cross) {
      const auto& a = tournament(population, cfg.tournament_size, rng);
      const auto& b = tournament(population, cfg.tournament_size, rng);
      out.push_back(selfies::crossover(a.seq, b.seq, rng()));
    } else {
      const auto& a = tournament(population, cfg.tournament_size, rng);
      out.push_back(selfies::mutate(a.seq, rng(), mo));
    }
  }
  return out;
}

RunTrace run_ga(FitnessOracle& oracle, const std::vector<mol::Molecule>& seeds, const GaConfig& cfg) {
  cfg.validate();
  util::Rng rng(cfg.rng_seed);
  RunTrace trace;
  trace.optimizer = "ga";

  std::vector<selfies::SelfiesSequence> seqs;
  std::vector<mol::Molecule> mols;
  std::set<std::string> keys;
  for (const auto& m : seeds) {
    if (seqs.size() >= cfg.population_size) break;
    if (!keys.insert(mol::canonical_key(m)).second) continue;
    try {
      seqs.push_back(selfies::encode(m));
      mols.push_back(m);
    } catch (const std::exception&) {
      keys.erase(mol::canonical_key(m));
    }
  }
  if (seqs.empty()) throw std::invalid_argument("GA needs at least one encodable seed");
  const auto alphabet = cfg.alphabet.empty() ? selfies::alphabet_from({seqs.begin(), seqs.end()}) : cfg.alphabet;

  auto res = oracle.evaluate(mols);
  const auto admitted = record_batch(trace, 0, res);
  close_iteration(trace);
  std::vector<Member> population;
  for (std::size_t i = 0; i < admitted; ++i) population.push_back({seqs[i], res.scored[i]});
  if (population.empty()) return trace;
  std::sort(population.begin(), population.end(), [](const Member& a, const Member& b) { return better(a.score, b.score); });

  for (int it = 1; it <= cfg.iterations && !trace.budget_exhausted; ++it) {
    auto children = ga_offspring(population, cfg.population_size, cfg, alphabet, rng);
    std::vector<mol::Molecule> batch;
    batch.reserve(children.size());
    for (const auto& c : children) batch.push_back(selfies::decode(c));
    res = oracle.evaluate(batch);
    const auto n = record_batch(trace, it, res);
    close_iteration(trace);

    std::vector<Member> scored;
    for (std::size_t i = 0; i < n; ++i) scored.push_back({children[i], res.scored[i]});
    std::sort(scored.begin(), scored.end(), [](const Member& a, const Member& b) { return better(a.score, b.score); });
    std::vector<Member> next(population.begin(),
                             population.begin() + static_cast<std::ptrdiff_t>(std::min(cfg.elite_count, population.size())));
    for (auto& m : scored) {
      if (next.size() >= cfg.population_size) break;
      next.push_back(std::move(m));
    }
    std::sort(next.begin(), next.end(), [](const Member& a, const Member& b) { return better(a.score, b.score); });
    population = std::move(next);
  }
  return trace;
}

}  // namespace tartarus::opt
