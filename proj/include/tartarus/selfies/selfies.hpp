// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"

namespace tartarus::selfies {

class SelfiesSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PredicateNeverSatisfied : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Token list; each token is a bracketed symbol such as "[C]", "[=Branch1]"
/// or the fragment separator ".".
struct SelfiesSequence {
  std::vector<std::string> tokens;

  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
  [[nodiscard]] bool empty() const noexcept { return tokens.empty(); }
  friend bool operator==(const SelfiesSequence&, const SelfiesSequence&) = default;
};

/// Splits concatenated token text; rejects tokens outside the alphabet.
[[nodiscard]] SelfiesSequence parse_selfies(std::string_view text);

/// Parsed atom token: `[` bond? element (H n)? (+|- n)? `]`.
struct AtomToken {
  int bond_order = 1;
  int atomic_number = 6;
  int charge = 0;
  // Hydrogen count; meaningful only when fixed_h is set.
  int h = 0;
  // Plain neutral tokens leave hydrogens to the valence table.
  bool fixed_h = false;

  /// Bonds the atom can still form.
  [[nodiscard]] int capacity() const;
};

[[nodiscard]] std::optional<AtomToken> parse_atom_token(std::string_view token);
[[nodiscard]] std::string atom_token_text(const AtomToken& t);
[[nodiscard]] bool is_valid_token(std::string_view token);

/// Symbols whose position encodes a digit of a branch or ring length.
[[nodiscard]] const std::vector<std::string>& index_alphabet();
/// Tokens used by default for random sequences and mutations.
[[nodiscard]] const std::vector<std::string>& default_alphabet();
/// Default alphabet extended by every token seen in `sequences`.
[[nodiscard]] std::vector<std::string> alphabet_from(const std::vector<SelfiesSequence>& sequences);

/// Encodes in input atom order. Throws UnsupportedElement for atoms outside
/// B, C, N, O, S, P, F, Cl, Br, I.
[[nodiscard]] SelfiesSequence encode(const mol::Molecule& m);

/// Total on alphabet strings: always returns a valence-consistent molecule.
/// The empty sequence decodes to the empty molecule.
[[nodiscard]] mol::Molecule decode(const SelfiesSequence& s);

struct MutationOptions {
  bool replace_only = false;
  // Empty means default_alphabet().
  std::vector<std::string> alphabet;
  // Optional sampling weights aligned with alphabet.
  std::vector<double> weights;
};

/// One insertion, deletion or replacement at a uniformly chosen position.
[[nodiscard]] SelfiesSequence mutate(const SelfiesSequence& s, std::uint64_t rng_seed,
                                     const MutationOptions& options = {});

/// Prefix of a up to a uniform cut point followed by the suffix of b.
[[nodiscard]] SelfiesSequence crossover(const SelfiesSequence& a, const SelfiesSequence& b, std::uint64_t rng_seed);
[[nodiscard]] SelfiesSequence crossover_at(const SelfiesSequence& a, const SelfiesSequence& b, std::size_t cut);

/// Uniform random token sequence over an alphabet.
[[nodiscard]] SelfiesSequence random_sequence(std::size_t length, std::uint64_t rng_seed,
                                              const std::vector<std::string>& alphabet = default_alphabet());

using KeepPredicate = std::function<bool(const mol::Molecule&)>;

/// Breadth-first mutation cycles from `seed`: each frontier molecule is
/// written as `reorderings` randomized SMILES, each encoded and mutated
/// `mutations_per` times. Returns unique molecules (seed first) satisfying
/// keep, stopping at target_size or when a cycle adds nothing.
/// Throws PredicateNeverSatisfied when the first cycle yields no survivor.
[[nodiscard]] std::vector<mol::Molecule> expand_dataset(const mol::Molecule& seed, const KeepPredicate& keep,
                                                        int reorderings, int mutations_per, std::size_t target_size,
                                                        std::uint64_t rng_seed);

}  // namespace tartarus::selfies
