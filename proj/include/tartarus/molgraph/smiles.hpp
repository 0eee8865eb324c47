// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"

namespace tartarus::mol {

/// Parses the supported SMILES subset: organic-subset and bracket atoms,
/// bonds, branches, ring closures (digits and %nn), aromatic lowercase and
/// dot-separated fragments. Stereo marks are kept as annotations.
/// Throws SyntaxError, ValenceError or UnsupportedElement.
[[nodiscard]] Molecule parse_smiles(std::string_view text);

struct WriterOptions {
  // Uppercase Kekule output with implicit single bonds. When false, aromatic
  // atoms are lowercase and every bond symbol is written.
  bool kekule = true;
  // Bracket every atom with its hydrogen count and charge.
  bool always_bracket = false;
};

/// Depth-first SMILES in which lower `priority` values are visited first,
/// both when choosing a start atom and when ordering branches.
[[nodiscard]] std::string write_smiles_ordered(const Molecule& m, const std::vector<int>& priority,
                                               const WriterOptions& options = {});

/// SMILES in input atom order.
[[nodiscard]] std::string write_smiles(const Molecule& m);

/// n SMILES strings from random atom orders; a pure function of the seed.
[[nodiscard]] std::vector<std::string> randomized_smiles(const Molecule& m, int n, std::uint64_t rng_seed);

}  // namespace tartarus::mol
