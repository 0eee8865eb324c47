// SPDX-License-Identifier: Apache-2.0
#include "tartarus/providers/provider.hpp"

#include <chrono>
#include <set>
#include <stdexcept>

#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/smiles.hpp"

namespace tartarus::providers {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return std::max(s, 1e-9);
}

}  // namespace

std::string_view status_text(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::ConstraintFail: return "constraint_fail";
    case Status::ProviderError: return "provider_error";
    case Status::Timeout: return "timeout";
  }
  return "?";
}

Status status_from_text(std::string_view s) {
  for (auto st : {Status::Ok, Status::ConstraintFail, Status::ProviderError, Status::Timeout}) {
    if (status_text(st) == s) return st;
  }
  throw std::invalid_argument("unknown status '" + std::string(s) + "'");
}

std::string validate_response(const PropertyRequest& request, const ProviderResponse& response) {
  for (const auto& p : request.props) {
    const auto it = response.values.find(p);
    if (it == response.values.end()) return "response lacks '" + p + "'";
    const auto spec = find_property(p);
    if (!spec) return "unknown property '" + p + "'";
    if (it->second.unit != spec->unit) {
      return "unit mismatch for '" + p + "': got '" + it->second.unit + "', expected '" + spec->unit + "'";
    }
  }
  return {};
}

Quantity quantity(std::string_view property, double value) { return {value, property_unit(property)}; }

NullProvider::NullProvider(const std::map<std::string, PropertyMap>& fixtures, PropertyMap defaults)
    : defaults_(std::move(defaults)) {
  for (const auto& [smiles, values] : fixtures) fixtures_[mol::canonical_key(mol::parse_smiles(smiles))] = values;
}

std::vector<std::string> NullProvider::supported() const {
  std::set<std::string> names;
  for (const auto& [k, v] : defaults_) names.insert(k);
  for (const auto& [key, values] : fixtures_) {
    for (const auto& [k, v] : values) names.insert(k);
  }
  return {names.begin(), names.end()};
}

std::vector<ProviderResponse> NullProvider::evaluate(const std::vector<PropertyRequest>& batch) {
  std::vector<ProviderResponse> out;
  out.reserve(batch.size());
  for (const auto& req : batch) {
    const auto start = std::chrono::steady_clock::now();
    ProviderResponse r;
    r.id = req.id;
    try {
      const auto key = mol::canonical_key(mol::parse_smiles(req.smiles));
      const auto fixture = fixtures_.find(key);
      for (const auto& p : req.props) {
        if (fixture != fixtures_.end()) {
          if (auto it = fixture->second.find(p); it != fixture->second.end()) {
            r.values[p] = it->second;
            continue;
          }
        }
        if (auto it = defaults_.find(p); it != defaults_.end()) {
          r.values[p] = it->second;
          continue;
        }
        r.status = Status::ProviderError;
        r.error = "no value for '" + p + "'";
        r.values.clear();
        break;
      }
    } catch (const std::exception& e) {
      r.status = Status::ProviderError;
      r.error = e.what();
    }
    r.wall_seconds = seconds_since(start);
    out.push_back(std::move(r));
  }
  return out;
}

CallbackProvider::CallbackProvider(std::vector<std::string> supported, Function fn)
    : supported_(std::move(supported)), fn_(std::move(fn)) {}

std::vector<ProviderResponse> CallbackProvider::evaluate(const std::vector<PropertyRequest>& batch) {
  std::vector<ProviderResponse> out;
  out.reserve(batch.size());
  for (const auto& req : batch) {
    const auto start = std::chrono::steady_clock::now();
    ProviderResponse r;
    r.id = req.id;
    try {
      r.values = fn_(mol::parse_smiles(req.smiles), req.props);
      if (auto err = validate_response(req, r); !err.empty()) {
        r.status = Status::ProviderError;
        r.error = err;
        r.values.clear();
      }
    } catch (const std::exception& e) {
      r.status = Status::ProviderError;
      r.error = e.what();
    }
    r.wall_seconds = seconds_since(start);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tartarus::providers
