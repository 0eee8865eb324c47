// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>

#include "tartarus/molgraph/elements.hpp"
#include "tartarus/molgraph/molecule.hpp"

namespace tartarus::testing {

// Every atom's bonds plus hydrogens fit the valence table: exactly an allowed
// valence for implicit-H atoms, at most the largest for fixed-H atoms.
inline bool valences_ok(const mol::Molecule& m) {
  for (int i = 0; i < m.atom_count(); ++i) {
    const auto& a = m.atom(i);
    int bonds = 0;
    for (const auto& nb : m.neighbors(i)) bonds += m.bond(nb.bond).order;
    const int occupied = bonds + a.total_h();
    const auto allowed = mol::allowed_valences(a.atomic_number, a.formal_charge);
    if (allowed.empty()) return false;
    if (a.no_implicit) {
      if (occupied > allowed.back()) return false;
    } else if (std::find(allowed.begin(), allowed.end(), occupied) == allowed.end()) {
      return false;
    }
  }
  return true;
}

}  // namespace tartarus::testing
