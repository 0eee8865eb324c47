// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/optimizers/oracle.hpp"
#include "tartarus/selfies/selfies.hpp"
#include "tartarus/util/rng.hpp"

namespace tartarus::opt {

/// Order-k token model with additive smoothing over the vocabulary plus an
/// end-of-sequence symbol. Contexts shorter than k are padded with a start
/// symbol.
class MarkovModel {
 public:
  explicit MarkovModel(int order = 3, double smoothing = 0.1);

  void fit(const std::vector<selfies::SelfiesSequence>& sequences);
  void update(const selfies::SelfiesSequence& s);

  [[nodiscard]] int order() const noexcept { return order_; }
  /// Sorted tokens seen so far.
  [[nodiscard]] const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }
  /// Probabilities over vocabulary() followed by end-of-sequence.
  [[nodiscard]] std::vector<double> distribution(const std::vector<std::string>& prefix) const;
  /// Extends `prefix` until end-of-sequence or max_length tokens.
  [[nodiscard]] selfies::SelfiesSequence complete(const selfies::SelfiesSequence& prefix, std::size_t max_length,
                                                  util::Rng& rng) const;

 private:
  [[nodiscard]] std::string context_key(const std::vector<std::string>& prefix) const;
  void add_token(const std::string& t);

  int order_;
  double smoothing_;
  std::vector<std::string> vocab_;
  std::set<std::string> vocab_index_;
  // context -> token (or end marker) -> count
  std::map<std::string, std::map<std::string, double>> counts_;
  std::map<std::string, double> totals_;
};

struct MarkovHcConfig {
  int iterations = 10;
  std::size_t batch_size = 500;
  std::size_t top_k = 2;
  int reorderings = 5;
  double truncate_lo = 0.25;
  double truncate_hi = 0.75;
  int order = 3;
  double smoothing = 0.1;
  std::size_t max_length = 100;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Pre-conditions a model on `training`, evaluates `seeds`, then per
/// iteration completes truncated reorderings of the top molecules with the
/// model (batch split evenly between them) and updates the model on the
/// proposals.
[[nodiscard]] RunTrace run_markov_hc(FitnessOracle& oracle, const std::vector<mol::Molecule>& training,
                                     const std::vector<mol::Molecule>& seeds, const MarkovHcConfig& cfg);

/// Proposal sequences for one iteration from the given top molecules.
[[nodiscard]] std::vector<selfies::SelfiesSequence> markov_proposals(const MarkovModel& model,
                                                                     const std::vector<mol::Molecule>& top,
                                                                     const MarkovHcConfig& cfg, util::Rng& rng);

/// Encodes every encodable molecule, skipping the rest.
[[nodiscard]] std::vector<selfies::SelfiesSequence> encode_all(const std::vector<mol::Molecule>& mols);

}  // namespace tartarus::opt
