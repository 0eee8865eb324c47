// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tartarus/objectives/envelope.hpp"
#include "tartarus/objectives/scharber.hpp"

namespace tartarus::obj {

class ParametersFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kParametersVersion = 1;

/// Fitted parameters persisted so runs reproduce without refitting.
struct Parameters {
  ScharberConfig scharber;
  std::optional<OutlierEnvelope> envelope;
};

[[nodiscard]] std::string parameters_to_json(const Parameters& p);
/// Throws ParametersFormatError for malformed text or another version.
[[nodiscard]] Parameters parameters_from_json(std::string_view text);

void save_parameters(const std::string& path, const Parameters& p);
[[nodiscard]] Parameters load_parameters(const std::string& path);

}  // namespace tartarus::obj
