// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/substructure/pattern.hpp"

namespace tartarus::testing {

// Enumerates injective maps in pattern atom order, checking atom predicates
// per slot and every query bond once the map is complete.
inline std::size_t brute_force_matches(const mol::Molecule& input, const substructure::Pattern& p) {
  const mol::Molecule m = p.needs_explicit_h() ? input.with_explicit_hydrogens() : input;
  const int n = p.atom_count();
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(m.atom_count()), false);
  std::size_t count = 0;
  auto complete = [&] {
    for (const auto& qb : p.bonds()) {
      const int b = m.bond_between(map[static_cast<std::size_t>(qb.begin)], map[static_cast<std::size_t>(qb.end)]);
      if (b < 0 || !substructure::bond_matches(qb.expr, m, b)) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, int slot) -> void {
    if (slot == n) {
      if (complete()) ++count;
      return;
    }
    for (int a = 0; a < m.atom_count(); ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      if (!substructure::atom_matches(p.atoms()[static_cast<std::size_t>(slot)], m, a)) continue;
      used[static_cast<std::size_t>(a)] = true;
      map[static_cast<std::size_t>(slot)] = a;
      self(self, slot + 1);
      used[static_cast<std::size_t>(a)] = false;
    }
  };
  if (n > 0) rec(rec, 0);
  return count;
}

// Exhaustive search over injective maps in pattern atom order that drops a
// partial map as soon as a query bond between mapped atoms fails. Tractable
// for large patterns where the complete-map enumeration above is not.
inline bool brute_force_exists(const mol::Molecule& input, const substructure::Pattern& p) {
  const mol::Molecule m = p.needs_explicit_h() ? input.with_explicit_hydrogens() : input;
  const int n = p.atom_count();
  if (n == 0) return false;
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(m.atom_count()), false);
  auto consistent = [&](int slot) {
    for (const auto& qb : p.bonds()) {
      const int other = qb.begin == slot ? qb.end : qb.end == slot ? qb.begin : -1;
      if (other < 0 || other > slot) continue;
      const int b = m.bond_between(map[static_cast<std::size_t>(slot)], map[static_cast<std::size_t>(other)]);
      if (b < 0 || !substructure::bond_matches(qb.expr, m, b)) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, int slot) -> bool {
    if (slot == n) return true;
    for (int a = 0; a < m.atom_count(); ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      if (!substructure::atom_matches(p.atoms()[static_cast<std::size_t>(slot)], m, a)) continue;
      map[static_cast<std::size_t>(slot)] = a;
      if (!consistent(slot)) continue;
      used[static_cast<std::size_t>(a)] = true;
      const bool found = self(self, slot + 1);
      used[static_cast<std::size_t>(a)] = false;
      if (found) return true;
    }
    return false;
  };
  return rec(rec, 0);
}

}  // namespace tartarus::testing
