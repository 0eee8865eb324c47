// SPDX-License-Identifier: Apache-2.0
#include "tartarus/providers/catalogue.hpp"

namespace tartarus::providers {

const std::vector<PropertySpec>& property_catalogue() {
  static const std::vector<PropertySpec> kCatalogue = {
      {"homo_ev", "eV", 600.0},
      {"lumo_ev", "eV", 600.0},
      {"gap_ev", "eV", 600.0},
      {"dipole_debye", "D", 600.0},
      {"st_gap_ev", "eV", 600.0},
      {"osc_strength", "dimensionless", 600.0},
      {"vee_ev", "eV", 600.0},
      {"docking_1syh", "kcal/mol", 600.0},
      {"docking_6y2f", "kcal/mol", 600.0},
      {"docking_4lde", "kcal/mol", 600.0},
      {"sascore", "dimensionless", 60.0},
      {"qed", "dimensionless", 60.0},
      {"logp", "dimensionless", 60.0},
      {"tpsa", "A^2", 60.0},
      {"alerts_pass", "dimensionless", 60.0},
      {"dE_act_kcal", "kcal/mol", 600.0},
      {"dE_rxn_kcal", "kcal/mol", 600.0},
  };
  return kCatalogue;
}

std::optional<PropertySpec> find_property(std::string_view name) {
  for (const auto& p : property_catalogue()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

const std::string& property_unit(std::string_view name) {
  for (const auto& p : property_catalogue()) {
    if (p.name == name) return p.unit;
  }
  throw UnknownProperty("unknown property '" + std::string(name) + "'");
}

}  // namespace tartarus::providers
