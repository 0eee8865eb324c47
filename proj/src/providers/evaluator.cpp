// SPDX-License-Identifier: Apache-2.0
#include "tartarus/providers/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "tartarus/molgraph/canonical.hpp"

namespace tartarus::providers {

using nlohmann::json;

std::string request_fingerprint(std::vector<std::string> props) {
  std::sort(props.begin(), props.end());
  props.erase(std::unique(props.begin(), props.end()), props.end());
  // FNV-1a over "name:unit;" pairs.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& p : props) {
    feed(p);
    feed(":");
    const auto spec = find_property(p);
    feed(spec ? spec->unit : "?");
    feed(";");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string record_to_json(const EvaluationRecord& r) {
  json j;
  j["seq"] = r.seq;
  j["key"] = r.key;
  j["smiles"] = r.smiles;
  j["fp"] = r.request_fingerprint;
  j["status"] = status_text(r.status);
  json values = json::object();
  for (const auto& [name, q] : r.values) values[name] = {{"v", q.value}, {"u", q.unit}};
  j["values"] = values;
  j["wall"] = r.wall_seconds;
  if (!r.error.empty()) j["error"] = r.error;
  if (!r.violations.empty()) j["violations"] = r.violations;
  j["hit"] = r.cache_hit;
  j["budget"] = r.budget_after;
  return j.dump();
}

EvaluationRecord record_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    EvaluationRecord r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.key = j.at("key").get<std::string>();
    r.smiles = j.at("smiles").get<std::string>();
    r.request_fingerprint = j.at("fp").get<std::string>();
    r.status = status_from_text(j.at("status").get<std::string>());
    for (const auto& [name, v] : j.at("values").items()) r.values[name] = {v.at("v").get<double>(), v.at("u").get<std::string>()};
    r.wall_seconds = j.at("wall").get<double>();
    r.error = j.value("error", std::string());
    r.violations = j.value("violations", std::vector<std::string>{});
    r.cache_hit = j.at("hit").get<bool>();
    r.budget_after = j.at("budget").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed record: ") + e.what());
  }
}

Evaluator::Evaluator(Provider& provider, Budget budget, std::optional<std::string> store_path)
    : provider_(provider), budget_(budget), store_path_(std::move(store_path)) {
  if (store_path_) {
    if (std::filesystem::exists(*store_path_)) replay(*store_path_);
    store_.open(*store_path_, std::ios::app);
    if (!store_) throw std::runtime_error("cannot open store " + *store_path_);
  }
}

void Evaluator::replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::uintmax_t valid_end = 0;
  std::uintmax_t offset = 0;
  while (std::getline(in, line)) {
    const bool complete = !in.eof();
    offset += line.size() + (complete ? 1 : 0);
    if (!complete) break;
    EvaluationRecord r;
    try {
      r = record_from_json(line);
    } catch (const std::exception&) {
      break;
    }
    valid_end = offset;
    const bool first = seen_keys_.emplace(r.key, true).second;
    consumed_ += (budget_.unique_only && !first) ? 0 : 1;
    if (r.status == Status::Ok && !r.cache_hit) cache_.emplace(CacheKey{r.key, r.request_fingerprint}, r);
    seq_ = r.seq + 1;
  }
  in.close();
  if (std::filesystem::file_size(path) != valid_end) std::filesystem::resize_file(path, valid_end);
}

std::vector<EvaluationRecord> Evaluator::cached_records() const {
  std::lock_guard lock(mutex_);
  std::vector<EvaluationRecord> out;
  out.reserve(cache_.size());
  for (const auto& [k, r] : cache_) out.push_back(r);
  return out;
}

void Evaluator::warm_cache(const std::vector<EvaluationRecord>& records) {
  std::lock_guard lock(mutex_);
  for (const auto& r : records) {
    if (r.status == Status::Ok) cache_.emplace(CacheKey{r.key, r.request_fingerprint}, r);
  }
}

void Evaluator::append(const EvaluationRecord& r) {
  if (!store_path_) return;
  store_ << record_to_json(r) << '\n';
}

bool Evaluator::wall_exceeded() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count() >= budget_.max_wall_seconds;
}

BatchResult Evaluator::evaluate(std::span<const mol::Molecule> batch, const std::vector<std::string>& props,
                                const Gate& gate) {
  BatchResult result;
  if (batch.empty()) return result;
  const auto fp = request_fingerprint(props);

  enum class Kind { Empty, Gated, Hit, Own, Wait };
  struct Slot {
    Kind kind = Kind::Own;
    std::string key;
    std::string smiles;
    std::vector<std::string> violations;
    std::size_t budget_after = 0;
    std::shared_future<EvaluationRecord> future;
    EvaluationRecord record;
  };
  std::vector<Slot> slots(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].empty()) {
      slots[i].kind = Kind::Empty;
      continue;
    }
    slots[i].key = mol::canonical_key(batch[i]);
    slots[i].smiles = mol::canonical_smiles(batch[i]);
    if (gate) slots[i].violations = gate(batch[i]);
  }

  std::vector<std::pair<std::size_t, std::promise<EvaluationRecord>>> owned;
  std::size_t accepted = 0;
  {
    std::lock_guard lock(mutex_);
    if (wall_exceeded()) {
      result.budget_exhausted = true;
      return result;
    }
    for (; accepted < batch.size(); ++accepted) {
      auto& s = slots[accepted];
      const bool first = !seen_keys_.contains(s.key);
      const std::size_t cost = (budget_.unique_only && !first) ? 0 : 1;
      if (consumed_ + cost > budget_.max_proposals) {
        result.budget_exhausted = true;
        break;
      }
      consumed_ += cost;
      s.budget_after = consumed_;
      seen_keys_.emplace(s.key, true);
      if (s.kind == Kind::Empty) continue;
      if (!s.violations.empty()) {
        s.kind = Kind::Gated;
        continue;
      }
      const CacheKey ck{s.key, fp};
      if (auto it = cache_.find(ck); it != cache_.end()) {
        s.kind = Kind::Hit;
        s.record = it->second;
      } else if (auto f = inflight_.find(ck); f != inflight_.end()) {
        s.kind = Kind::Wait;
        s.future = f->second;
      } else {
        s.kind = Kind::Own;
        std::promise<EvaluationRecord> p;
        inflight_.emplace(ck, p.get_future().share());
        owned.emplace_back(accepted, std::move(p));
      }
    }
  }

  if (!owned.empty()) {
    std::vector<PropertyRequest> requests;
    requests.reserve(owned.size());
    for (const auto& [i, p] : owned) requests.push_back({"r" + std::to_string(i), slots[i].smiles, props});
    std::vector<ProviderResponse> responses;
    try {
      responses = provider_.evaluate(requests);
      if (responses.size() != requests.size()) throw std::runtime_error("provider returned the wrong batch size");
    } catch (...) {
      std::lock_guard lock(mutex_);
      for (auto& [i, p] : owned) {
        inflight_.erase(CacheKey{slots[i].key, fp});
        p.set_exception(std::current_exception());
      }
      throw;
    }
    std::lock_guard lock(mutex_);
    provider_requests_ += requests.size();
    for (std::size_t k = 0; k < owned.size(); ++k) {
      auto& [i, promise] = owned[k];
      auto& resp = responses[k];
      EvaluationRecord r;
      r.key = slots[i].key;
      r.smiles = slots[i].smiles;
      r.request_fingerprint = fp;
      r.status = resp.status;
      r.values = std::move(resp.values);
      r.error = std::move(resp.error);
      r.wall_seconds = resp.wall_seconds;
      if (r.status == Status::Ok) {
        if (auto err = validate_response(requests[k], {resp.id, r.status, r.values, {}, 0.0}); !err.empty()) {
          r.status = Status::ProviderError;
          r.error = err;
          r.values.clear();
        }
      }
      const CacheKey ck{r.key, fp};
      if (r.status == Status::Ok) cache_.emplace(ck, r);
      inflight_.erase(ck);
      promise.set_value(r);
      slots[i].record = std::move(r);
    }
  }

  for (std::size_t i = 0; i < accepted; ++i) {
    auto& s = slots[i];
    if (s.kind == Kind::Wait) {
      s.record = s.future.get();
      s.record.cache_hit = true;
    } else if (s.kind == Kind::Hit) {
      s.record.cache_hit = true;
    } else if (s.kind == Kind::Empty || s.kind == Kind::Gated) {
      s.record = {};
      s.record.key = s.key;
      s.record.smiles = s.smiles;
      s.record.request_fingerprint = fp;
      s.record.status = Status::ConstraintFail;
      s.record.violations = s.kind == Kind::Empty ? std::vector<std::string>{"empty_molecule"} : s.violations;
    }
  }

  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < accepted; ++i) {
    auto& r = slots[i].record;
    r.budget_after = slots[i].budget_after;
    if (slots[i].kind == Kind::Hit || slots[i].kind == Kind::Wait) ++cache_hits_;
    r.seq = seq_++;
    append(r);
    result.records.push_back(std::move(r));
  }
  if (store_path_) store_.flush();
  return result;
}

std::size_t Evaluator::consumed() const {
  std::lock_guard lock(mutex_);
  return consumed_;
}

std::size_t Evaluator::remaining() const {
  std::lock_guard lock(mutex_);
  return budget_.max_proposals - consumed_;
}

bool Evaluator::exhausted() const {
  std::lock_guard lock(mutex_);
  return consumed_ >= budget_.max_proposals || wall_exceeded();
}

std::size_t Evaluator::provider_requests() const {
  std::lock_guard lock(mutex_);
  return provider_requests_;
}

std::size_t Evaluator::cache_hits() const {
  std::lock_guard lock(mutex_);
  return cache_hits_;
}

std::size_t Evaluator::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::uint64_t Evaluator::next_sequence() const {
  std::lock_guard lock(mutex_);
  return seq_;
}

}  // namespace tartarus::providers
