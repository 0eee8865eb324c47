// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/substructure/filter_bank.hpp"

namespace tartarus::desc {

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PopulationTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr int kFingerprintBits = 2048;
constexpr int kFingerprintRadius = 3;

class Fingerprint {
 public:
  explicit Fingerprint(int nbits = kFingerprintBits);

  [[nodiscard]] int size() const noexcept { return nbits_; }
  [[nodiscard]] bool test(int bit) const;
  void set(int bit);
  [[nodiscard]] int count() const noexcept;
  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Lowercase hex, most significant word first.
  [[nodiscard]] std::string to_hex() const;
  [[nodiscard]] static Fingerprint from_hex(std::string_view hex, int nbits = kFingerprintBits);

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  int nbits_;
  std::vector<std::uint64_t> words_;
};

/// Circular neighbourhood hashing over radii 0..radius, folded by modulo.
/// Initial invariant: element, heavy degree, charge, hydrogens, ring flag,
/// aromatic flag.
[[nodiscard]] Fingerprint morgan_fingerprint(const mol::Molecule& m, int radius = kFingerprintRadius,
                                             int nbits = kFingerprintBits);

/// |a & b| / |a | b|; 1.0 when both are empty. Throws LengthMismatch.
[[nodiscard]] double tanimoto(const Fingerprint& a, const Fingerprint& b);

/// Per-row similarity sums: row i holds sum over j > i of tanimoto(i, j).
[[nodiscard]] std::vector<double> similarity_row_sums(std::span<const Fingerprint> fps);

/// 1 - mean pairwise Tanimoto similarity, summed row by row in index order.
/// Throws PopulationTooSmall for fewer than two members.
[[nodiscard]] double diversity(std::span<const Fingerprint> fps);
[[nodiscard]] double diversity(std::span<const mol::Molecule> population);

struct ScalarDescriptors {
  double molecular_weight = 0.0;
  int h_bond_donors = 0;
  int h_bond_acceptors = 0;
  int heavy_atom_count = 0;
};

/// Weight from standard atomic weights including all hydrogens; donors are
/// N/O atoms carrying hydrogen, acceptors are all N/O atoms.
[[nodiscard]] ScalarDescriptors scalar_descriptors(const mol::Molecule& m);

/// Descriptor names computed in-process (everything else comes from a provider).
[[nodiscard]] const std::vector<std::string>& local_descriptor_names();
[[nodiscard]] bool is_local_descriptor(std::string_view name);

/// All local descriptors by name. Ring sizes are 0 for acyclic molecules.
[[nodiscard]] substructure::DescriptorMap local_descriptors(const mol::Molecule& m);

}  // namespace tartarus::desc
