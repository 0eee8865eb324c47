// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/optimizers/oracle.hpp"
#include "tartarus/util/rng.hpp"

namespace tartarus::opt {

struct GaConfig {
  std::size_t population_size = 500;
  int iterations = 10;
  std::size_t tournament_size = 3;
  std::size_t elite_count = 1;
  double mutation_rate = 0.7;
  double crossover_rate = 0.3;
  std::uint64_t rng_seed = 0;
  // Empty means the default alphabet extended by the seeds' tokens.
  std::vector<std::string> alphabet;

  void validate() const;
};

/// Tournament selection, one crossover or mutation per child, elitism.
/// Seeds (deduplicated, at most population_size, unencodable ones skipped)
/// form the evaluated initial population.
[[nodiscard]] RunTrace run_ga(FitnessOracle& oracle, const std::vector<mol::Molecule>& seeds, const GaConfig& cfg);

/// One child per draw: crossover of two tournament winners with probability
/// crossover_rate, otherwise a mutation of one winner.
[[nodiscard]] std::vector<selfies::SelfiesSequence> ga_offspring(const std::vector<Member>& population,
                                                                 std::size_t count, const GaConfig& cfg,
                                                                 const std::vector<std::string>& alphabet,
                                                                 util::Rng& rng);

}  // namespace tartarus::opt
