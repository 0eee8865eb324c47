// SPDX-License-Identifier: Apache-2.0
#include "tartarus/optimizers/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/smiles.hpp"

namespace tartarus::opt {
namespace {

constexpr const char* kEnd = "$";
constexpr const char* kStart = "^";

}  // namespace

MarkovModel::MarkovModel(int order, double smoothing) : order_(order), smoothing_(smoothing) {
  if (order < 0) throw std::invalid_argument("model order must be non-negative");
  if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be positive");
}

std::string MarkovModel::context_key(const std::vector<std::string>& prefix) const {
  std::string key;
  const auto n = static_cast<std::ptrdiff_t>(prefix.size());
  for (std::ptrdiff_t i = n - order_; i < n; ++i) {
    key += i < 0 ? kStart : prefix[static_cast<std::size_t>(i)];
    key += '\x1f';
  }
  return key;
}

void MarkovModel::add_token(const std::string& t) {
  if (vocab_index_.contains(t)) return;
  vocab_.insert(std::upper_bound(vocab_.begin(), vocab_.end(), t), t);
  vocab_index_.insert(t);
}

void MarkovModel::update(const selfies::SelfiesSequence& s) {
  for (const auto& t : s.tokens) add_token(t);
  std::vector<std::string> prefix;
  for (std::size_t i = 0; i <= s.tokens.size(); ++i) {
    const auto ctx = context_key(prefix);
    counts_[ctx][i < s.tokens.size() ? s.tokens[i] : kEnd] += 1.0;
    totals_[ctx] += 1.0;
    if (i < s.tokens.size()) prefix.push_back(s.tokens[i]);
  }
}

void MarkovModel::fit(const std::vector<selfies::SelfiesSequence>& sequences) {
  for (const auto& s : sequences) update(s);
}

std::vector<double> MarkovModel::distribution(const std::vector<std::string>& prefix) const {
  const std::size_t v = vocab_.size() + 1;
  std::vector<double> p(v, 0.0);
  const auto ctx = context_key(prefix);
  const auto c = counts_.find(ctx);
  const double total = c == counts_.end() ? 0.0 : totals_.at(ctx);
  const double denom = total + smoothing_ * static_cast<double>(v);
  for (std::size_t i = 0; i < v; ++i) {
    double n = 0.0;
    if (c != counts_.end()) {
      const std::string& id = i < vocab_.size() ? vocab_[i] : std::string(kEnd);
      if (auto it = c->second.find(id); it != c->second.end()) n = it->second;
    }
    p[i] = (n + smoothing_) / denom;
  }
  return p;
}

selfies::SelfiesSequence MarkovModel::complete(const selfies::SelfiesSequence& prefix, std::size_t max_length,
                                               util::Rng& rng) const {
  selfies::SelfiesSequence out = prefix;
  if (vocab_.empty()) return out;
  while (out.tokens.size() < max_length) {
    const auto p = distribution(out.tokens);
    double u = util::uniform_real(rng);
    std::size_t pick = p.size() - 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (u < p[i]) {
        pick = i;
        break;
      }
      u -= p[i];
    }
    if (pick == vocab_.size()) break;
    out.tokens.push_back(vocab_[pick]);
  }
  return out;
}

void MarkovHcConfig::validate() const {
  if (batch_size == 0 || top_k == 0 || reorderings < 1) throw std::invalid_argument("Markov-HC sizes must be positive");
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (!(truncate_lo >= 0.0 && truncate_lo <= truncate_hi && truncate_hi <= 1.0)) {
    throw std::invalid_argument("truncation fractions must satisfy 0 <= lo <= hi <= 1");
  }
}

std::vector<selfies::SelfiesSequence> encode_all(const std::vector<mol::Molecule>& mols) {
  std::vector<selfies::SelfiesSequence> out;
  for (const auto& m : mols) {
    try {
      out.push_back(selfies::encode(m));
    } catch (const std::exception&) {
    }
  }
  return out;
}

std::vector<selfies::SelfiesSequence> markov_proposals(const MarkovModel& model, const std::vector<mol::Molecule>& top,
                                                       const MarkovHcConfig& cfg, util::Rng& rng) {
  std::vector<selfies::SelfiesSequence> out;
  if (top.empty()) return out;
  out.reserve(cfg.batch_size);
  for (std::size_t s = 0; s < top.size(); ++s) {
    // Even split; the first seeds take the remainder.
    const std::size_t share = cfg.batch_size / top.size() + (s < cfg.batch_size % top.size() ? 1 : 0);
    std::vector<selfies::SelfiesSequence> variants;
    for (const auto& smi : mol::randomized_smiles(top[s], static_cast<std::size_t>(cfg.reorderings), rng())) {
      try {
        variants.push_back(selfies::encode(mol::parse_smiles(smi)));
      } catch (const std::exception&) {
      }
    }
    if (variants.empty()) continue;
    for (std::size_t k = 0; k < share; ++k) {
      const auto& base = variants[k % variants.size()];
      const double f = cfg.truncate_lo + (cfg.truncate_hi - cfg.truncate_lo) * util::uniform_real(rng);
      const auto keep = static_cast<std::size_t>(std::floor(f * static_cast<double>(base.size())));
      selfies::SelfiesSequence prefix;
      prefix.tokens.assign(base.tokens.begin(), base.tokens.begin() + static_cast<std::ptrdiff_t>(keep));
      out.push_back(keep >= base.size() ? base : model.complete(prefix, std::max(cfg.max_length, keep), rng));
    }
  }
  return out;
}

RunTrace run_markov_hc(FitnessOracle& oracle, const std::vector<mol::Molecule>& training,
                       const std::vector<mol::Molecule>& seeds, const MarkovHcConfig& cfg) {
  cfg.validate();
  util::Rng rng(cfg.rng_seed);
  RunTrace trace;
  trace.optimizer = "markov-hc";
  trace.degenerate = cfg.truncate_lo >= 1.0;
  if (training.empty()) throw std::invalid_argument("Markov-HC needs a training set");
  MarkovModel model(cfg.order, cfg.smoothing);
  model.fit(encode_all(training));

  // Known molecules with their fitness, keyed canonically.
  std::map<std::string, std::pair<mol::Molecule, Scored>> known;
  auto absorb = [&](const std::vector<mol::Molecule>& batch, const OracleResult& res) {
    for (std::size_t i = 0; i < res.scored.size(); ++i) {
      const auto& s = res.scored[i];
      auto it = known.find(s.key);
      if (it == known.end() || better(s, it->second.second)) known.insert_or_assign(s.key, std::make_pair(batch[i], s));
    }
  };

  const auto res0 = oracle.evaluate(seeds);
  record_batch(trace, 0, res0);
  close_iteration(trace);
  absorb(seeds, res0);

  for (int it = 1; it <= cfg.iterations && !trace.budget_exhausted && !known.empty(); ++it) {
    std::vector<const std::pair<mol::Molecule, Scored>*> ranked;
    for (const auto& [k, v] : known) ranked.push_back(&v);
    std::sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) { return better(a->second, b->second); });
    std::vector<mol::Molecule> top;
    for (std::size_t i = 0; i < std::min(cfg.top_k, ranked.size()); ++i) top.push_back(ranked[i]->first);

    const auto proposals = markov_proposals(model, top, cfg, rng);
    std::vector<mol::Molecule> batch;
    batch.reserve(proposals.size());
    for (const auto& p : proposals) batch.push_back(selfies::decode(p));
    const auto res = oracle.evaluate(batch);
    record_batch(trace, it, res);
    close_iteration(trace);
    absorb(batch, res);
    for (std::size_t i = 0; i < res.scored.size(); ++i) model.update(proposals[i]);
  }
  return trace;
}

}  // namespace tartarus::opt
