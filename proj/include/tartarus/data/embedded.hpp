// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace tartarus::data {

/// Shipped data files compiled into the library, addressed by their path
/// below data/, e.g. "banks/docking.bank" or "am15g.txt".
[[nodiscard]] std::optional<std::string_view> embedded_file(std::string_view name);
[[nodiscard]] std::vector<std::string_view> embedded_files();

}  // namespace tartarus::data
