// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"

namespace tartarus::substructure {

class UnsupportedPatternFeature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PatternSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Atom primitives. Counts refer to the matched molecule:
///   Element   atomic number plus aromaticity (C aliphatic, c aromatic)
///   AtomicNum #n, either aromaticity
///   Aromatic  a          Aliphatic A
///   RingCount R (>= 1 ring), Rn (exactly n SSSR rings)
///   RingSize  rn (member of an SSSR ring of size n)
///   Connect   Xn (neighbours plus all hydrogens)
///   Degree    Dn (explicit neighbours in the graph)
///   HCount    Hn (total hydrogens)
///   Charge    +n / -n
///   Any       *
enum class AtomPrimitive { Any, Element, AtomicNum, Aromatic, Aliphatic, InRing, RingCount, RingSize, Connect, Degree, HCount, Charge };

/// Bond primitives: Single and Double/Triple match non-aromatic Kekule
/// orders, Aromatic matches perceived aromatic bonds, Ring matches ring bonds.
/// A bond written without a symbol matches single or aromatic.
enum class BondPrimitive { Any, Single, Double, Triple, Aromatic, Ring, Default };

template <class Primitive>
struct Expr {
  enum class Op { Leaf, Not, And, Or } op = Op::Leaf;
  Primitive primitive{};
  int value = 0;
  bool aromatic = false;  // Element only
  std::vector<Expr> children;
};

using AtomExpr = Expr<AtomPrimitive>;
using BondExpr = Expr<BondPrimitive>;

struct QueryBond {
  int begin;
  int end;
  BondExpr expr;
};

struct CompileOptions {
  // Drop chirality (@, @@) and directional bond marks instead of rejecting them.
  bool strip_stereo = false;
};

/// Connected query graph compiled from the supported SMARTS subset.
class Pattern {
 public:
  [[nodiscard]] const std::string& text() const noexcept { return text_; }
  [[nodiscard]] int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  [[nodiscard]] const std::vector<AtomExpr>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] const std::vector<QueryBond>& bonds() const noexcept { return bonds_; }
  /// True when the query names hydrogen atoms and must see them explicitly.
  [[nodiscard]] bool needs_explicit_h() const noexcept { return explicit_h_; }

 private:
  friend Pattern compile_pattern(std::string_view, const CompileOptions&);
  std::string text_;
  std::vector<AtomExpr> atoms_;
  std::vector<QueryBond> bonds_;
  bool explicit_h_ = false;
};

/// Throws UnsupportedPatternFeature for recursive SMARTS, component
/// grouping, stereo marks (unless stripped) and unknown primitives, and
/// PatternSyntaxError for malformed text.
[[nodiscard]] Pattern compile_pattern(std::string_view text, const CompileOptions& options = {});

[[nodiscard]] bool atom_matches(const AtomExpr& e, const mol::Molecule& m, int atom);
[[nodiscard]] bool bond_matches(const BondExpr& e, const mol::Molecule& m, int bond);

/// Subgraph monomorphism with predicate checks.
[[nodiscard]] bool has_match(const mol::Molecule& m, const Pattern& p);

/// Number of distinct atom mappings (capped at `limit`).
[[nodiscard]] std::size_t count_matches(const mol::Molecule& m, const Pattern& p, std::size_t limit = 1000000);

}  // namespace tartarus::substructure
