// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tartarus::mol {

class SyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedElement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Chirality : std::uint8_t { None, CounterClockwise, Clockwise };

struct Atom {
  int atomic_number = 6;
  int formal_charge = 0;
  // Hydrogens fixed by the input (bracket atoms, folded [H] atoms).
  int explicit_h = 0;
  // Hydrogens filled in from the valence table; always 0 when no_implicit.
  int implicit_h = 0;
  bool no_implicit = false;
  bool aromatic = false;
  bool in_ring = false;
  // Parsed annotation only, never used by matching, keys or descriptors.
  Chirality chirality = Chirality::None;

  [[nodiscard]] int total_h() const noexcept { return explicit_h + implicit_h; }
};

enum class BondType : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Bond {
  int begin = 0;
  int end = 0;
  // Kekule order (1, 2 or 3). Aromatic bonds keep one valid Kekule assignment.
  int order = 1;
  bool aromatic = false;
  bool in_ring = false;
  // '/' or '\' from the input; annotation only.
  char stereo = 0;

  [[nodiscard]] BondType type() const noexcept {
    return aromatic ? BondType::Aromatic : static_cast<BondType>(order);
  }
  [[nodiscard]] int other(int atom) const noexcept { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

struct PerceptionReport {
  int n_rings = 0;
  int max_ring_size = 0;
  int min_ring_size = 0;
  int n_bridgehead = 0;
  int n_spiro = 0;
  double aromatic_fraction = 0.0;
  double conjugated_bond_fraction = 0.0;
};

class MoleculeBuilder;

/// Immutable attributed molecular graph. Construct through MoleculeBuilder or
/// the SMILES parser; ring information and aromaticity are perceived once at
/// construction.
class Molecule {
 public:
  Molecule() = default;

  [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
  [[nodiscard]] std::span<const Bond> bonds() const noexcept { return bonds_; }
  [[nodiscard]] const Atom& atom(int i) const { return atoms_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const Bond& bond(int i) const { return bonds_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] std::span<const Neighbor> neighbors(int i) const {
    return adjacency_.at(static_cast<std::size_t>(i));
  }
  [[nodiscard]] int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  [[nodiscard]] int bond_count() const noexcept { return static_cast<int>(bonds_.size()); }
  [[nodiscard]] bool empty() const noexcept { return atoms_.empty(); }

  /// Bond index between a and b, or -1.
  [[nodiscard]] int bond_between(int a, int b) const;
  [[nodiscard]] int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  /// Sum of Kekule bond orders around atom i.
  [[nodiscard]] int bond_order_sum(int i) const;
  /// Bond orders plus all hydrogens.
  [[nodiscard]] int occupied_valence(int i) const;
  [[nodiscard]] int radical_electrons(int i) const;
  [[nodiscard]] int heavy_atom_count() const;
  [[nodiscard]] int net_charge() const;

  /// Smallest set of smallest rings, each as an ordered atom cycle.
  [[nodiscard]] const std::vector<std::vector<int>>& rings() const noexcept { return rings_; }
  /// Number of SSSR rings containing atom i.
  [[nodiscard]] int ring_count(int i) const { return atom_ring_count_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] bool atom_in_ring_of_size(int i, int size) const;

  /// Copy with every hydrogen materialized as an explicit H atom.
  [[nodiscard]] Molecule with_explicit_hydrogens() const;

 private:
  friend class MoleculeBuilder;

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<std::vector<int>> rings_;
  std::vector<int> atom_ring_count_;
};

class MoleculeBuilder {
 public:
  int add_atom(const Atom& atom);
  /// Adds a bond; throws SyntaxError on self loops or duplicate pairs.
  int add_bond(int a, int b, int order, bool aromatic = false, char stereo = 0);
  [[nodiscard]] int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  [[nodiscard]] int bond_count() const noexcept { return static_cast<int>(bonds_.size()); }
  [[nodiscard]] bool has_bond(int a, int b) const;
  Atom& atom(int i) { return atoms_.at(static_cast<std::size_t>(i)); }
  Bond& bond(int i) { return bonds_.at(static_cast<std::size_t>(i)); }
  int bond_index(int a, int b) const;

  /// Kekulizes bonds flagged aromatic, folds terminal [H] atoms into their
  /// neighbour, fills implicit hydrogens, validates valences and perceives
  /// rings and aromaticity.
  [[nodiscard]] Molecule build() &&;

 private:
  void kekulize();
  void fold_hydrogens();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
};

[[nodiscard]] PerceptionReport perceive(const Molecule& m);

/// Bond classification used by the perception report.
[[nodiscard]] bool is_conjugated(const Molecule& m, int bond);

}  // namespace tartarus::mol
