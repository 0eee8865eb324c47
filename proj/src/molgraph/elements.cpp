// SPDX-License-Identifier: Apache-2.0
#include "tartarus/molgraph/elements.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tartarus::mol {
namespace {

struct ElementInfo {
  int z;
  std::string_view symbol;
  double weight;
  bool organic;
  bool aromatic;
};

constexpr std::array<ElementInfo, 13> kElements{{
    {1, "H", 1.008, false, false},
    {5, "B", 10.81, true, true},
    {6, "C", 12.011, true, true},
    {7, "N", 14.007, true, true},
    {8, "O", 15.999, true, true},
    {9, "F", 18.998, true, false},
    {14, "Si", 28.085, false, false},
    {15, "P", 30.974, true, true},
    {16, "S", 32.06, true, true},
    {17, "Cl", 35.45, true, false},
    {35, "Br", 79.904, true, false},
    {53, "I", 126.904, true, false},
    {50, "Sn", 118.71, false, false},
}};

const ElementInfo* find(int z) noexcept {
  for (const auto& e : kElements) {
    if (e.z == z) return &e;
  }
  return nullptr;
}

}  // namespace

bool is_supported_element(int atomic_number) noexcept { return find(atomic_number) != nullptr; }

std::optional<int> atomic_number_of(std::string_view symbol) noexcept {
  for (const auto& e : kElements) {
    if (e.symbol == symbol) return e.z;
  }
  return std::nullopt;
}

std::string_view element_symbol(int atomic_number) {
  const auto* e = find(atomic_number);
  if (!e) throw std::out_of_range("unsupported atomic number " + std::to_string(atomic_number));
  return e->symbol;
}

double atomic_weight(int atomic_number) {
  const auto* e = find(atomic_number);
  if (!e) throw std::out_of_range("unsupported atomic number " + std::to_string(atomic_number));
  return e->weight;
}

bool is_organic_subset(int atomic_number) noexcept {
  const auto* e = find(atomic_number);
  return e && e->organic;
}

bool can_be_aromatic(int atomic_number) noexcept {
  const auto* e = find(atomic_number);
  return e && e->aromatic;
}

std::vector<int> allowed_valences(int atomic_number, int charge) {
  std::vector<int> base;
  int shift = 0;
  switch (atomic_number) {
    case 1:
      base = {1};
      shift = -std::abs(charge);
      break;
    case 5:
      base = {3};
      shift = -charge;
      break;
    case 6:
    case 14:
    case 50:
      base = {4};
      shift = -std::abs(charge);
      break;
    case 7:
      base = {3};
      shift = charge;
      break;
    case 15:
      base = charge == 0 ? std::vector<int>{3, 5} : std::vector<int>{3};
      shift = charge;
      break;
    case 8:
      base = {2};
      shift = charge;
      break;
    case 16:
      if (charge == 0) {
        base = {2, 4, 6};
      } else {
        base = {2, 4};
        shift = charge;
      }
      break;
    case 9:
    case 17:
    case 35:
    case 53:
      base = {1};
      shift = charge;
      break;
    default:
      return {};
  }
  std::vector<int> out;
  for (int v : base) {
    if (v + shift >= 0) out.push_back(v + shift);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int max_valence(int atomic_number, int charge) {
  const auto v = allowed_valences(atomic_number, charge);
  return v.empty() ? 0 : v.back();
}

std::optional<int> fitting_valence(int atomic_number, int charge, int occupied) {
  for (int v : allowed_valences(atomic_number, charge)) {
    if (v >= occupied) return v;
  }
  return std::nullopt;
}

}  // namespace tartarus::mol
