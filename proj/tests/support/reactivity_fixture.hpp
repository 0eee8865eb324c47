// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "tartarus/descriptors/descriptors.hpp"
#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/providers/provider.hpp"
#include "tartarus/selfies/selfies.hpp"
#include "tartarus/substructure/filter_bank.hpp"

namespace tartarus::testing {

inline constexpr const char* kReactivityCore = "[H]C1(C)C(C)2C34C5(C)C(C)=C(C)C(C)(C5)C3(C4)C(C)(C2)C1(C)[H]";

struct FixtureEntry {
  std::string smiles;
  double act = 0.0;
  double rxn = 0.0;
  // Known by construction.
  bool feasible = false;
};

/// 90 core-bearing molecules passing the reactivity bank followed by 10
/// small molecules without the core. The core-free ones carry the lowest
/// energies so a harness that skipped the penalty would prefer them.
inline std::vector<FixtureEntry> reactivity_fixture() {
  const auto bank = substructure::shipped_bank("reactivity");
  const auto keep = [&](const mol::Molecule& m) {
    return substructure::apply_filter_bank(m, bank, desc::local_descriptors(m)).pass;
  };
  const auto grown = selfies::expand_dataset(mol::parse_smiles(kReactivityCore), keep, 5, 10, 90, 2024);
  std::vector<FixtureEntry> out;
  for (std::size_t i = 0; i < grown.size(); ++i) {
    const double k = static_cast<double>((i * 37) % 90);
    out.push_back({mol::canonical_smiles(grown[i]), 20.0 + 0.25 * k, -5.0 + 0.1 * static_cast<double>((i * 11) % 90), true});
  }
  const char* plain[] = {"CCO", "c1ccccc1", "CC(=O)O", "CCN", "C1CCCCC1", "CCCC", "OCCO", "CC(C)C", "C=CC", "NCCN"};
  for (int i = 0; i < 10; ++i) out.push_back({plain[i], 1.0 + i, -20.0 - i, false});
  return out;
}

inline std::map<std::string, providers::PropertyMap> fixture_properties(const std::vector<FixtureEntry>& f) {
  std::map<std::string, providers::PropertyMap> out;
  for (const auto& e : f) {
    out[e.smiles] = {{"dE_act_kcal", {e.act, "kcal/mol"}}, {"dE_rxn_kcal", {e.rxn, "kcal/mol"}}};
  }
  return out;
}

}  // namespace tartarus::testing
