// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/providers/provider.hpp"

namespace tartarus::providers {

struct Budget {
  std::size_t max_proposals = 5000;
  double max_wall_seconds = 86400.0;
  // Count each distinct molecule once instead of every proposal.
  bool unique_only = false;
};

struct EvaluationRecord {
  std::uint64_t seq = 0;
  std::string key;     // canonical key
  std::string smiles;  // canonical SMILES sent to the provider
  std::string request_fingerprint;
  PropertyMap values;
  Status status = Status::Ok;
  double wall_seconds = 0.0;
  std::string error;
  std::vector<std::string> violations;
  bool cache_hit = false;
  // Budget consumed once this proposal was admitted.
  std::size_t budget_after = 0;
};

/// Stable digest of a property list with units, independent of order.
[[nodiscard]] std::string request_fingerprint(std::vector<std::string> props);

[[nodiscard]] std::string record_to_json(const EvaluationRecord& r);
/// Throws std::invalid_argument on a malformed line.
[[nodiscard]] EvaluationRecord record_from_json(std::string_view line);

/// Structural check run before dispatch; non-empty result marks the record
/// constraint_fail without calling the provider.
using Gate = std::function<std::vector<std::string>(const mol::Molecule&)>;

struct BatchResult {
  std::vector<EvaluationRecord> records;
  // Set when proposals were dropped because the budget ran out.
  bool budget_exhausted = false;
};

/// Cache-first evaluation with budget accounting and an append-only store.
/// Safe to call from concurrent workers.
class Evaluator {
 public:
  /// Replays `store_path` when it exists, truncating a torn final line.
  Evaluator(Provider& provider, Budget budget, std::optional<std::string> store_path = std::nullopt);

  /// Each proposal consumes budget once, cache hit or not; proposals past
  /// the budget are dropped and flagged. The empty molecule is a constraint
  /// failure.
  BatchResult evaluate(std::span<const mol::Molecule> batch, const std::vector<std::string>& props,
                       const Gate& gate = {});

  [[nodiscard]] std::size_t consumed() const;
  [[nodiscard]] std::size_t remaining() const;
  [[nodiscard]] bool exhausted() const;
  [[nodiscard]] const Budget& budget() const noexcept { return budget_; }
  [[nodiscard]] std::size_t provider_requests() const;
  [[nodiscard]] std::size_t cache_hits() const;
  [[nodiscard]] std::size_t cache_size() const;
  [[nodiscard]] std::uint64_t next_sequence() const;

  /// Ok records currently cached, ordered by key.
  [[nodiscard]] std::vector<EvaluationRecord> cached_records() const;
  /// Adds ok records to the cache without consuming budget.
  void warm_cache(const std::vector<EvaluationRecord>& records);

 private:
  struct CacheKey {
    std::string key;
    std::string fingerprint;
    auto operator<=>(const CacheKey&) const = default;
  };
  void replay(const std::string& path);
  void append(const EvaluationRecord& r);
  bool wall_exceeded() const;

  Provider& provider_;
  Budget budget_;
  std::optional<std::string> store_path_;
  std::ofstream store_;
  std::chrono::steady_clock::time_point started_ = std::chrono::steady_clock::now();

  mutable std::mutex mutex_;
  std::size_t consumed_ = 0;
  std::map<std::string, bool, std::less<>> seen_keys_;
  std::map<CacheKey, EvaluationRecord> cache_;
  std::map<CacheKey, std::shared_future<EvaluationRecord>> inflight_;
  std::uint64_t seq_ = 0;
  std::size_t provider_requests_ = 0;
  std::size_t cache_hits_ = 0;
};

}  // namespace tartarus::providers
