// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>

#include "support/corpus.hpp"
#include "support/isomorphism.hpp"
#include "support/valence.hpp"
#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/selfies/selfies.hpp"
#include "tartarus/substructure/pattern.hpp"

using namespace tartarus;
using namespace tartarus::selfies;

namespace {

bool encodable(const mol::Molecule& m) {
  for (const auto& a : m.atoms()) {
    if (a.atomic_number == 1 || a.atomic_number == 14 || a.atomic_number == 50) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("methane and benzene round trip") {
  const auto methane = mol::parse_smiles("C");
  const auto s = encode(methane);
  CHECK(s.str() == "[C]");
  CHECK(testing::isomorphic(decode(s), methane));

  const auto benzene = mol::parse_smiles("c1ccccc1");
  const auto b = encode(benzene);
  CHECK(b.str().find("Ring1") != std::string::npos);
  CHECK(testing::isomorphic(decode(b), benzene));
}

TEST_CASE("branch and ring tokens decode as expected") {
  CHECK(mol::canonical_key(decode(parse_selfies("[C][C][=Branch1][C][=O][O]"))) ==
        mol::canonical_key(mol::parse_smiles("CC(=O)O")));
  CHECK(mol::canonical_key(decode(parse_selfies("[C][C][C][C][C][C][Ring1][=Branch1]"))) ==
        mol::canonical_key(mol::parse_smiles("C1CCCCC1")));
  // Capacity limits the requested bond order.
  CHECK(mol::canonical_key(decode(parse_selfies("[F][=C]"))) == mol::canonical_key(mol::parse_smiles("FC")));
  // An exhausted atom ends the derivation.
  CHECK(decode(parse_selfies("[F][F][C]")).atom_count() == 2);
  // Fragments.
  CHECK(decode(parse_selfies("[C].[O]")).atom_count() == 2);
}

TEST_CASE("empty sequence decodes to the empty molecule") {
  CHECK(decode(SelfiesSequence{}).empty());
  CHECK(decode(parse_selfies("[Branch1][Ring1]")).empty());
}

TEST_CASE("token grammar") {
  CHECK(is_valid_token("[C]"));
  CHECK(is_valid_token("[=N+1]"));
  CHECK(is_valid_token("[NH3+1]"));
  CHECK(is_valid_token("[#Branch2]"));
  CHECK(is_valid_token("[=Ring3]"));
  CHECK_FALSE(is_valid_token("[Xe]"));
  CHECK_FALSE(is_valid_token("[Si]"));
  CHECK_FALSE(is_valid_token("[Branch4]"));
  CHECK_FALSE(is_valid_token("[OH3]"));
  CHECK_THROWS_AS((void)parse_selfies("[C][Xx]"), SelfiesSyntaxError);
  CHECK_THROWS_AS((void)parse_selfies("C"), SelfiesSyntaxError);
  const auto t = parse_atom_token("[=NH1+1]");
  REQUIRE(t.has_value());
  CHECK(t->bond_order == 2);
  CHECK(t->h == 1);
  CHECK(t->charge == 1);
  CHECK(t->capacity() == 3);
  CHECK(atom_token_text(*t) == "[=NH1+1]");
}

TEST_CASE("corpus round trips through encode and decode") {
  for (const auto& smi : testing::seed_smiles()) {
    const auto m = mol::parse_smiles(smi);
    if (!encodable(m)) continue;
    CAPTURE(smi);
    const auto s = encode(m);
    CAPTURE(s.str());
    CHECK(testing::isomorphic(decode(s), m));
    CHECK(parse_selfies(s.str()) == s);
    // Random atom orders give different strings with the same molecule.
    for (const auto& variant : mol::randomized_smiles(m, 5, 17)) {
      CHECK(testing::isomorphic(decode(encode(mol::parse_smiles(variant))), m));
    }
  }
}

TEST_CASE("elements without tokens are rejected") {
  CHECK_THROWS_AS((void)encode(mol::parse_smiles("C[Si](C)(C)C")), mol::UnsupportedElement);
}

TEST_CASE("random sequences always decode to valid molecules") {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto s = random_sequence(30, seed);
    mol::Molecule m;
    REQUIRE_NOTHROW(m = decode(s));
    REQUIRE(testing::valences_ok(m));
  }
}

TEST_CASE("mutation") {
  const auto s = encode(mol::parse_smiles("CC(=O)Oc1ccccc1C(=O)O"));
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto m = mutate(s, seed);
    const long diff = static_cast<long>(m.size()) - static_cast<long>(s.size());
    CHECK(std::abs(diff) <= 1);
    REQUIRE(testing::valences_ok(decode(m)));
  }
  CHECK(mutate(s, 5) == mutate(s, 5));

  MutationOptions opts;
  opts.replace_only = true;
  opts.alphabet = {"[C]", "[N]", "[O]", "[F]"};
  const SelfiesSequence single{{"[C]"}};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto m = mutate(single, seed, opts);
    REQUIRE(m.size() == 1);
    CHECK(m.tokens[0] != "[C]");
    CHECK(decode(m).atom_count() == 1);
  }
  opts.weights = {0.0, 0.0, 1.0, 0.0};
  CHECK(mutate(single, 1, opts).tokens[0] == "[O]");
}

TEST_CASE("crossover") {
  const auto a = encode(mol::parse_smiles("CCOc1ccccc1"));
  const auto b = encode(mol::parse_smiles("NC(=O)CCCl"));
  CHECK(crossover_at(a, b, 0) == b);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    REQUIRE(testing::valences_ok(decode(crossover(a, b, seed))));
    REQUIRE(testing::valences_ok(decode(crossover(a, a, seed))));
  }
  CHECK(crossover(a, b, 9) == crossover(a, b, 9));
}

TEST_CASE("alphabet from sequences") {
  const auto alpha = alphabet_from({parse_selfies("[C][NH3+1]")});
  CHECK(std::find(alpha.begin(), alpha.end(), "[NH3+1]") != alpha.end());
}

TEST_CASE("dataset expansion") {
  const auto seed = mol::parse_smiles("c1ccccc1O");
  const auto always = [](const mol::Molecule&) { return true; };
  const auto one = expand_dataset(seed, always, 5, 5, 1, 3);
  REQUIRE(one.size() == 1);

  const auto single = expand_dataset(seed, always, 1, 1, 2, 3);
  CHECK(single.size() <= 2);

  const auto many = expand_dataset(seed, always, 3, 5, 40, 3);
  CHECK(many.size() == 40);
  std::set<std::string> keys;
  for (const auto& m : many) keys.insert(mol::canonical_key(m));
  CHECK(keys.size() == many.size());
  CHECK(mol::canonical_key(many.front()) == mol::canonical_key(seed));

  const auto never = [](const mol::Molecule&) { return false; };
  CHECK_THROWS_AS((void)expand_dataset(seed, never, 2, 2, 10, 3), PredicateNeverSatisfied);

  // Motif-preserving expansion.
  const auto phenyl = substructure::compile_pattern("c1ccccc1");
  const auto keep = [&](const mol::Molecule& m) { return substructure::has_match(m, phenyl); };
  const auto motif = expand_dataset(seed, keep, 20, 20, 30, 5);
  for (const auto& m : motif) CHECK(substructure::has_match(m, phenyl));
  CHECK(expand_dataset(seed, keep, 4, 4, 10, 8).size() == expand_dataset(seed, keep, 4, 4, 10, 8).size());
}
