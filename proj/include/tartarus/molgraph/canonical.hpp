// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"

namespace tartarus::mol {

/// Canonical atom ranks (0..n-1, all distinct) from iterative refinement of
/// element, aromaticity, charge, hydrogen count, degree and ring membership,
/// with deterministic tie breaking.
[[nodiscard]] std::vector<int> canonical_ranks(const Molecule& m);

/// Deduplication key: equal for isomorphic graphs. Internal format, written
/// with aromatic lowercase atoms, explicit bond symbols and bracketed atoms.
[[nodiscard]] std::string canonical_key(const Molecule& m);

/// Canonical-order SMILES in Kekule form, parseable by parse_smiles.
[[nodiscard]] std::string canonical_smiles(const Molecule& m);

}  // namespace tartarus::mol
