// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tartarus/providers/provider.hpp"

namespace tartarus::providers {

class HandshakeFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kProtocolVersion = 1;
constexpr const char* kProviderCommandEnv = "TARTARUS_PROVIDER_CMD";
constexpr const char* kCacheDirEnv = "TARTARUS_CACHE_DIR";

struct SubprocessOptions {
  // Overrides the catalogue timeouts when set.
  std::optional<double> timeout_seconds;
  double handshake_timeout_seconds = 30.0;
  // Child processes serving requests in parallel.
  int workers = 1;
  // Requests written ahead of their responses per child.
  int pipeline_depth = 1;
  // Restarts across the provider's lifetime before requests fail outright.
  int max_restarts = 5;
  // Attempts per request across crashes.
  int max_attempts = 2;
};

/// Encodes a request line (without the trailing newline).
[[nodiscard]] std::string encode_request(const PropertyRequest& r);
/// Parses a response line; throws std::invalid_argument on a malformed line.
[[nodiscard]] ProviderResponse decode_response(std::string_view line);

/// Runs `/bin/sh -c command` children speaking the line protocol on their
/// standard streams. Each child must first print the handshake line.
class SubprocessProvider final : public Provider {
 public:
  /// Starts the children and reads their handshakes; throws HandshakeFailed.
  explicit SubprocessProvider(std::string command, SubprocessOptions options = {});
  ~SubprocessProvider() override;
  SubprocessProvider(const SubprocessProvider&) = delete;
  SubprocessProvider& operator=(const SubprocessProvider&) = delete;

  [[nodiscard]] std::string name() const override { return "subprocess"; }
  [[nodiscard]] std::vector<std::string> supported() const override { return supported_; }
  [[nodiscard]] std::vector<ProviderResponse> evaluate(const std::vector<PropertyRequest>& batch) override;

  [[nodiscard]] int restarts() const noexcept;
  /// Lines from the children that were not valid protocol responses.
  [[nodiscard]] int protocol_violations() const noexcept;

 private:
  class Child;
  void serve(Child& child, const std::vector<PropertyRequest>& batch, std::vector<ProviderResponse>& out,
             std::vector<int>& attempts, std::size_t& next, std::mutex& queue_mutex);
  bool restart(Child& child);
  [[nodiscard]] double timeout_for(const PropertyRequest& r) const;

  std::string command_;
  SubprocessOptions options_;
  std::vector<std::string> supported_;
  std::vector<std::unique_ptr<Child>> children_;
  std::mutex evaluate_mutex_;
  mutable std::mutex stats_mutex_;
  int restarts_ = 0;
  int violations_ = 0;
};

/// Subprocess provider for $TARTARUS_PROVIDER_CMD, or nullptr when unset.
[[nodiscard]] std::unique_ptr<Provider> provider_from_environment(const SubprocessOptions& options = {});

}  // namespace tartarus::providers
