// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tartarus::mol {

/// Supported element set: H, B, C, N, O, F, Si, P, S, Cl, Br, I, Sn.
[[nodiscard]] bool is_supported_element(int atomic_number) noexcept;
[[nodiscard]] std::optional<int> atomic_number_of(std::string_view symbol) noexcept;
[[nodiscard]] std::string_view element_symbol(int atomic_number);
/// Standard atomic weight in Da.
[[nodiscard]] double atomic_weight(int atomic_number);
/// Elements that may be written without brackets in SMILES.
[[nodiscard]] bool is_organic_subset(int atomic_number) noexcept;
[[nodiscard]] bool can_be_aromatic(int atomic_number) noexcept;

constexpr int kMinCharge = -4;
constexpr int kMaxCharge = 4;

/// Allowed total valences (bond orders plus hydrogens) for an element in a
/// given charge state, ascending. Empty when the state cannot bond at all.
/// This single table backs implicit hydrogen assignment, radical counting and
/// the SELFIES bonding capacities.
[[nodiscard]] std::vector<int> allowed_valences(int atomic_number, int charge);
[[nodiscard]] int max_valence(int atomic_number, int charge);
/// Smallest allowed valence >= occupied, if any.
[[nodiscard]] std::optional<int> fitting_valence(int atomic_number, int charge, int occupied);

}  // namespace tartarus::mol
