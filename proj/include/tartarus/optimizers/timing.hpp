// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/optimizers/ga.hpp"
#include "tartarus/optimizers/markov.hpp"

namespace tartarus::opt {

struct SampleOutcome {
  // Canonical keys in order of first appearance.
  std::vector<std::string> unique_keys;
  std::size_t proposals = 0;
};

/// Encodes the dataset and builds the mutation alphabet.
struct GaPrepared {
  std::vector<selfies::SelfiesSequence> sequences;
  std::vector<std::string> alphabet;
};
[[nodiscard]] GaPrepared precondition_ga(const std::vector<mol::Molecule>& dataset);

/// Breeds generations of population_size children under a constant fitness
/// until n unique molecules appear or max_proposals is reached.
[[nodiscard]] SampleOutcome sample_ga(const GaPrepared& prepared, std::size_t n, const GaConfig& cfg,
                                      std::size_t max_proposals);

[[nodiscard]] MarkovModel precondition_markov(const std::vector<mol::Molecule>& dataset, const MarkovHcConfig& cfg);

/// Samples whole sequences from the model until n unique molecules appear
/// or max_proposals is reached.
[[nodiscard]] SampleOutcome sample_markov(const MarkovModel& model, std::size_t n, const MarkovHcConfig& cfg,
                                          std::size_t max_proposals);

}  // namespace tartarus::opt
