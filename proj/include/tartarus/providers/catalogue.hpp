// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tartarus::providers {

class UnknownProperty : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Quantity {
  double value = 0.0;
  std::string unit;
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

using PropertyMap = std::map<std::string, Quantity, std::less<>>;

struct PropertySpec {
  std::string name;
  std::string unit;
  // Default per-request timeout for this property class.
  double timeout_seconds;
};

/// Every property a provider may be asked for, in a fixed order.
[[nodiscard]] const std::vector<PropertySpec>& property_catalogue();
[[nodiscard]] std::optional<PropertySpec> find_property(std::string_view name);
/// Unit tag for a catalogue property; throws UnknownProperty.
[[nodiscard]] const std::string& property_unit(std::string_view name);

}  // namespace tartarus::providers
