// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "support/corpus.hpp"
#include "support/valence.hpp"
#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/optimizers/ga.hpp"
#include "tartarus/optimizers/markov.hpp"
#include "tartarus/optimizers/shaping.hpp"
#include "tartarus/optimizers/timing.hpp"
#include "tartarus/providers/evaluator.hpp"

using namespace tartarus;
using namespace tartarus::opt;

namespace {

std::vector<mol::Molecule> corpus() {
  std::vector<mol::Molecule> out;
  for (const auto& s : testing::seed_smiles()) {
    auto m = mol::parse_smiles(s);
    try {
      (void)selfies::encode(m);
      out.push_back(std::move(m));
    } catch (const std::exception&) {
    }
  }
  return out;
}

double heavy_atoms(const mol::Molecule& m) {
  double n = 0;
  for (const auto& a : m.atoms()) n += a.atomic_number > 1 ? 1 : 0;
  return n;
}

void check_monotone(const RunTrace& t) {
  for (std::size_t i = 1; i < t.best_so_far.size(); ++i) REQUIRE(t.best_so_far[i] >= t.best_so_far[i - 1]);
}

// Oracle for the sigmoid as literally written.
double sigmoid_oracle(double f, const std::vector<double>& F, double c) {
  const double a = std::accumulate(F.begin(), F.end(), 0.0) / static_cast<double>(F.size());
  const double mx = *std::max_element(F.begin(), F.end());
  const double b = -(1.0 / (mx - a)) * std::log(2.0 / (c + 1.0) - 1.0);
  return 2.0 / (1.0 + std::exp(-b * (f - a))) - 1.0;
}

}  // namespace

TEST_CASE("GA with zero iterations evaluates only the seeds") {
  FunctionOracle oracle(heavy_atoms, 5000);
  GaConfig cfg;
  cfg.iterations = 0;
  cfg.population_size = 10;
  const auto t = run_ga(oracle, corpus(), cfg);
  CHECK(t.proposals.size() == 10);
  CHECK(t.best_so_far.size() == 1);
  for (const auto& e : t.proposals) CHECK(e.iteration == 0);
}

TEST_CASE("GA on heavy atom count") {
  FunctionOracle oracle(heavy_atoms, 5000);
  GaConfig cfg;
  cfg.population_size = 50;
  cfg.iterations = 10;
  cfg.rng_seed = 3;
  const auto seeds = corpus();
  const auto t = run_ga(oracle, {seeds.begin(), seeds.begin() + 20}, cfg);
  CHECK(t.best_so_far.size() == 11);
  check_monotone(t);
  CHECK(t.best_so_far.back() >= t.best_so_far.front());
  std::set<std::string> unique;
  for (auto it = seeds.begin(); it != seeds.begin() + 20; ++it) unique.insert(mol::canonical_key(*it));
  CHECK(t.proposals.size() == unique.size() + 50 * 10);
  CHECK(t.best_fitness == t.best_so_far.back());

  FunctionOracle again(heavy_atoms, 5000);
  CHECK(run_ga(again, {seeds.begin(), seeds.begin() + 20}, cfg) == t);
  CHECK(trace_to_jsonl(t).size() > 0);
}

TEST_CASE("GA stops at the proposal budget") {
  FunctionOracle oracle(heavy_atoms, 137);
  GaConfig cfg;
  cfg.population_size = 40;
  const auto t = run_ga(oracle, corpus(), cfg);
  CHECK(t.proposals.size() == 137);
  CHECK(t.budget_exhausted);
  CHECK(t.proposals.back().budget == 137);
  check_monotone(t);
}

TEST_CASE("GA configuration errors") {
  FunctionOracle oracle(heavy_atoms, 10);
  GaConfig cfg;
  cfg.population_size = 0;
  CHECK_THROWS_AS((void)run_ga(oracle, corpus(), cfg), std::invalid_argument);
  cfg = {};
  CHECK_THROWS_AS((void)run_ga(oracle, {}, cfg), std::invalid_argument);
}

TEST_CASE("Markov model distributions normalize") {
  const auto seqs = encode_all(corpus());
  for (int k : {0, 1, 3, 5}) {
    MarkovModel model(k, 0.1);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      model.update(seqs[i]);
      for (std::size_t cut = 0; cut <= seqs[i].size(); cut += 3) {
        const std::vector<std::string> prefix(seqs[i].tokens.begin(),
                                              seqs[i].tokens.begin() + static_cast<std::ptrdiff_t>(cut));
        const auto p = model.distribution(prefix);
        CHECK(p.size() == model.vocabulary().size() + 1);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-9);
        for (double x : p) CHECK(x > 0.0);
      }
    }
  }
}

TEST_CASE("Markov model probabilities match smoothed counts") {
  MarkovModel model(1, 0.5);
  model.fit({selfies::parse_selfies("[C][O]"), selfies::parse_selfies("[C][C]")});
  // Vocabulary [C], [O]; after [C]: [C] once, [O] once, end once.
  const auto p = model.distribution({"[C]"});
  REQUIRE(p.size() == 3);
  CHECK(p[0] == doctest::Approx((1 + 0.5) / (3 + 1.5)));
  CHECK(p[1] == doctest::Approx((1 + 0.5) / (3 + 1.5)));
  CHECK(p[2] == doctest::Approx((1 + 0.5) / (3 + 1.5)));
  // Start context: [C] twice.
  const auto s = model.distribution({});
  CHECK(s[0] == doctest::Approx(2.5 / 3.5));
  CHECK(s[1] == doctest::Approx(0.5 / 3.5));
}

TEST_CASE("order zero completions decode validly") {
  MarkovModel model(0, 0.1);
  model.fit(encode_all(corpus()));
  util::Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto s = model.complete({}, 40, rng);
    CHECK(s.size() <= 40);
    REQUIRE(testing::valences_ok(selfies::decode(s)));
  }
}

TEST_CASE("Markov-HC on a toy objective") {
  // Token count capped at 25.
  const auto toy = [](const mol::Molecule& m) {
    return std::min(25.0, static_cast<double>(selfies::encode(m).size()));
  };
  FunctionOracle oracle(toy, 5000);
  MarkovHcConfig cfg;
  cfg.batch_size = 100;
  cfg.rng_seed = 5;
  const auto data = corpus();
  const std::vector<mol::Molecule> seeds(data.begin(), data.begin() + 5);
  const auto t = run_markov_hc(oracle, data, seeds, cfg);
  CHECK(t.best_so_far.size() == 11);
  check_monotone(t);
  CHECK(t.proposals.size() == 5 + 100 * 10);
  CHECK_FALSE(t.degenerate);

  FunctionOracle again(toy, 5000);
  CHECK(run_markov_hc(again, data, seeds, cfg) == t);
}

TEST_CASE("full truncation reproduces the seeds") {
  FunctionOracle oracle(heavy_atoms, 5000);
  MarkovHcConfig cfg;
  cfg.truncate_lo = 1.0;
  cfg.truncate_hi = 1.0;
  cfg.batch_size = 20;
  cfg.iterations = 2;
  const auto seeds = std::vector<mol::Molecule>{mol::parse_smiles("CCCCO"), mol::parse_smiles("c1ccccc1N")};
  const auto t = run_markov_hc(oracle, corpus(), seeds, cfg);
  CHECK(t.degenerate);
  std::set<std::string> keys;
  for (const auto& s : seeds) keys.insert(mol::canonical_key(s));
  for (const auto& e : t.proposals) CHECK(keys.contains(e.key));
}

TEST_CASE("Markov-HC proposals split evenly between the top two") {
  MarkovModel model;
  model.fit(encode_all(corpus()));
  MarkovHcConfig cfg;
  cfg.truncate_lo = 1.0;
  cfg.truncate_hi = 1.0;
  cfg.batch_size = 500;
  util::Rng rng(1);
  const std::vector<mol::Molecule> top{mol::parse_smiles("CCCCO"), mol::parse_smiles("c1ccccc1N")};
  const auto props = markov_proposals(model, top, cfg, rng);
  REQUIRE(props.size() == 500);
  std::size_t first = 0;
  for (const auto& p : props) first += mol::canonical_key(selfies::decode(p)) == mol::canonical_key(top[0]) ? 1 : 0;
  CHECK(first == 250);
}

TEST_CASE("score shaping") {
  const std::vector<double> F{1.0, 2.0, 3.0, 10.0};
  const ScoreShaper s(F);
  CHECK(s(4.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(s(10.0) - 0.8) < 1e-12);
  CHECK(s(-1e6) == doctest::Approx(-1.0));
  CHECK(s(1e6) == doctest::Approx(1.0));
  for (double f = -5.0; f <= 15.0; f += 0.25) {
    CHECK(s(f) == doctest::Approx(sigmoid_oracle(f, F, 0.8)).epsilon(1e-12));
    CHECK(s(f + 0.25) > s(f));
  }
  CHECK_THROWS_AS(ScoreShaper(std::vector<double>{2.0, 2.0}), DegenerateSet);
  CHECK_THROWS_AS(ScoreShaper(std::vector<double>{2.0}), DegenerateSet);
}

TEST_CASE("timing samplers") {
  const auto data = corpus();
  const auto ga = precondition_ga(data);
  GaConfig gcfg;
  gcfg.population_size = 100;
  const auto one = sample_ga(ga, 1, gcfg, 100000);
  CHECK(one.unique_keys.size() == 1);
  const auto a = sample_ga(ga, 300, gcfg, 100000);
  const auto b = sample_ga(ga, 300, gcfg, 100000);
  CHECK(a.unique_keys.size() == 300);
  CHECK(a.unique_keys == b.unique_keys);

  MarkovHcConfig mcfg;
  const auto model = precondition_markov(data, mcfg);
  const auto m1 = sample_markov(model, 200, mcfg, 100000);
  CHECK(m1.unique_keys.size() == 200);
  CHECK(sample_markov(model, 200, mcfg, 100000).unique_keys == m1.unique_keys);
  CHECK(sample_markov(model, 200, mcfg, 10).proposals == 10);
}

TEST_CASE("task oracle through the evaluator") {
  const auto& task = obj::find_task("toy_heavy_atoms");
  const obj::TaskEvaluator te(task);
  providers::NullProvider provider({}, {});
  providers::Evaluator ev(provider, providers::Budget{60, 86400, false});
  TaskOracle oracle(te, ev);
  GaConfig cfg;
  cfg.population_size = 20;
  const auto t = run_ga(oracle, corpus(), cfg);
  CHECK(t.proposals.size() == 60);
  CHECK(t.budget_exhausted);
  CHECK(ev.consumed() == 60);
  check_monotone(t);
}
