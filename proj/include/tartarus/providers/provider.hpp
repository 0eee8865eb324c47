// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/providers/catalogue.hpp"

namespace tartarus::providers {

enum class Status { Ok, ConstraintFail, ProviderError, Timeout };

[[nodiscard]] std::string_view status_text(Status s);
[[nodiscard]] Status status_from_text(std::string_view s);

struct PropertyRequest {
  std::string id;
  std::string smiles;
  std::vector<std::string> props;
};

struct ProviderResponse {
  std::string id;
  Status status = Status::Ok;
  PropertyMap values;
  std::string error;
  double wall_seconds = 0.0;
};

/// Checks an ok response against the request: every property present with
/// the catalogue unit. Returns an error message or empty.
[[nodiscard]] std::string validate_response(const PropertyRequest& request, const ProviderResponse& response);

class Provider {
 public:
  virtual ~Provider() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual std::vector<std::string> supported() const = 0;
  /// One response per request, in request order. Per-request failures are
  /// reported in the response, never thrown. Safe to call concurrently.
  [[nodiscard]] virtual std::vector<ProviderResponse> evaluate(const std::vector<PropertyRequest>& batch) = 0;
};

/// Fixture values keyed by any SMILES of the molecule (matched by canonical
/// key), falling back to defaults. Properties with neither are errors.
class NullProvider final : public Provider {
 public:
  NullProvider(const std::map<std::string, PropertyMap>& fixtures, PropertyMap defaults);

  [[nodiscard]] std::string name() const override { return "null"; }
  [[nodiscard]] std::vector<std::string> supported() const override;
  [[nodiscard]] std::vector<ProviderResponse> evaluate(const std::vector<PropertyRequest>& batch) override;

 private:
  std::map<std::string, PropertyMap, std::less<>> fixtures_;
  PropertyMap defaults_;
};

/// Values computed in-process from the parsed molecule; for toy objectives.
class CallbackProvider final : public Provider {
 public:
  using Function = std::function<PropertyMap(const mol::Molecule&, const std::vector<std::string>&)>;
  CallbackProvider(std::vector<std::string> supported, Function fn);

  [[nodiscard]] std::string name() const override { return "callback"; }
  [[nodiscard]] std::vector<std::string> supported() const override { return supported_; }
  [[nodiscard]] std::vector<ProviderResponse> evaluate(const std::vector<PropertyRequest>& batch) override;

 private:
  std::vector<std::string> supported_;
  Function fn_;
};

/// A provider value with the catalogue unit attached.
[[nodiscard]] Quantity quantity(std::string_view property, double value);

}  // namespace tartarus::providers
