// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support/brute_match.hpp"
#include "support/corpus.hpp"
#include "tartarus/descriptors/descriptors.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/substructure/filter_bank.hpp"
#include "tartarus/substructure/pattern.hpp"

using namespace tartarus;
using namespace tartarus::substructure;

namespace {

bool matches(std::string_view smiles, std::string_view smarts) {
  return has_match(mol::parse_smiles(smiles), compile_pattern(smarts));
}

// Every local descriptor plus neutral values for provider descriptors.
DescriptorMap full_descriptors(const mol::Molecule& m) {
  auto d = desc::local_descriptors(m);
  d["logp"] = 1.0;
  d["sascore"] = 2.0;
  d["qed"] = 0.6;
  d["tpsa"] = 60.0;
  d["alerts_pass"] = 1.0;
  return d;
}

const std::vector<std::string> kOraclePatterns = {
    "[Cl,Br,I]",  "*#*",          "*=*=*",         "c1ccccc1",       "[#6]~[#7]",    "C=O",
    "[N,O;!R]",   "[*;R2]",       "[CH2]",         "[X4]",           "[D3]",         "*~*~*",
    "[r5]",       "[!#6]",        "C-,=C",         "[O-]",           "[N+]",         "a:a",
    "[C;R]@[C]",  "[#8]-[#6]=O",  "[c;H1]",        "*1~*~*1",        "[S,s]",        "C(=O)N",
};

}  // namespace

TEST_CASE("atom lists, triple bonds and cumulenes") {
  CHECK(matches("ClCC", "[Cl,Br,I]"));
  CHECK(matches("CCI", "[Cl,Br,I]"));
  CHECK_FALSE(matches("CCF", "[Cl,Br,I]"));
  CHECK(matches("C#N", "*#*"));
  CHECK_FALSE(matches("C=CC=C", "*#*"));
  CHECK(matches("C=C=C", "*=*=*"));
  CHECK_FALSE(matches("C=CC=C", "*=*=*"));
  CHECK(matches("Ic1ccccc1", "[I]"));
  CHECK(matches("Ic1ccccc1", "c1ccccc1"));
  CHECK_FALSE(matches("C1CCCCC1", "c1ccccc1"));
}

TEST_CASE("primitives read the matched molecule") {
  CHECK(matches("CC", "[CH3]"));
  CHECK_FALSE(matches("CC", "[CH2]"));
  CHECK(matches("CS(=O)(=O)C", "[S&X4]"));
  CHECK(matches("C1CC1", "[C;r3]"));
  CHECK_FALSE(matches("C1CCC1", "[C;r3]"));
  CHECK(matches("C12CCC1CC2", "[C;R2]"));
  CHECK_FALSE(matches("CCCC", "[R]"));
  CHECK(matches("[O-]C", "[O-]"));
  CHECK(matches("C[N+](C)(C)C", "[N+]"));
  CHECK_FALSE(matches("CN", "[N+]"));
  CHECK(matches("c1ccncc1", "[n]"));
  CHECK_FALSE(matches("CCN", "[n]"));
  CHECK(matches("CC(C)(C)C", "[D4]"));
  CHECK(matches("CCO", "[!#6]"));
}

TEST_CASE("leading hydrogen requires an explicit hydrogen neighbour") {
  CHECK(matches("CC", "[H]C"));
  CHECK_FALSE(matches("C(C)(C)(C)C", "[H][C;H0]"));
  CHECK(matches("C(C)(C)(C)C", "[C;D4]"));
}

TEST_CASE("unsupported features are rejected") {
  CHECK_THROWS_AS((void)compile_pattern("C.C"), UnsupportedPatternFeature);
  CHECK_THROWS_AS((void)compile_pattern("[$(CO)]"), UnsupportedPatternFeature);
  CHECK_THROWS_AS((void)compile_pattern("CC>>CC"), UnsupportedPatternFeature);
  CHECK_THROWS_AS((void)compile_pattern("[13C]"), UnsupportedPatternFeature);
  CHECK_THROWS_AS((void)compile_pattern("[C@H](F)Cl"), UnsupportedPatternFeature);
  CHECK_THROWS_AS((void)compile_pattern("F/C=C/F"), UnsupportedPatternFeature);
  CHECK_NOTHROW((void)compile_pattern("[C@H](F)Cl", {.strip_stereo = true}));
  CHECK_NOTHROW((void)compile_pattern("F/C=C/F", {.strip_stereo = true}));
  CHECK_THROWS_AS((void)compile_pattern("C(("), PatternSyntaxError);
  CHECK_THROWS_AS((void)compile_pattern("C1CC"), PatternSyntaxError);
  CHECK_THROWS_AS((void)compile_pattern("[C"), PatternSyntaxError);
}

TEST_CASE("matcher agrees with brute force enumeration") {
  int compared = 0;
  for (const auto& smi : testing::seed_smiles()) {
    const auto m = mol::parse_smiles(smi);
    if (m.atom_count() > 14) continue;
    for (const auto& text : kOraclePatterns) {
      const auto p = compile_pattern(text);
      if (p.atom_count() > 4) continue;
      const auto expected = testing::brute_force_matches(m, p);
      CHECK_MESSAGE(count_matches(m, p) == expected, smi << " / " << text);
      CHECK(has_match(m, p) == (expected > 0));
      ++compared;
    }
  }
  CHECK(compared > 200);
}

TEST_CASE("shipped banks parse and list their descriptors") {
  const auto names = shipped_bank_names();
  CHECK(names.size() == 5);
  for (const auto& n : names) {
    const auto bank = shipped_bank(n);
    CHECK(bank.name == n);
    CHECK(bank.version == 1);
    CHECK_FALSE(bank.rules.empty());
  }
  const auto rsa = shipped_bank("reactivity_sa");
  CHECK(rsa.rules.size() == shipped_bank("reactivity").rules.size() + 1);
  CHECK(rsa.rules.back().name == "sascore");
}

TEST_CASE("reactivity core motif matches the substituted core") {
  const auto bank = shipped_bank("reactivity");
  const auto& core = bank.rules.front();
  REQUIRE(core.kind == Rule::Kind::Required);
  const auto substituted =
      mol::parse_smiles("[H]C1(C)C(C)2C34C5(C)C(C)=C(C)C(C)(C5)C3(C4)C(C)(C2)C1(C)[H]");
  CHECK(has_match(substituted, *core.pattern));
  CHECK_FALSE(has_match(mol::parse_smiles("c1ccccc1"), *core.pattern));
  const auto verdict = apply_filter_bank(substituted, bank, full_descriptors(substituted));
  CHECK(verdict.pass);
}

TEST_CASE("gdb13 bank accepts benzene and rejects methyl groups") {
  const auto bank = shipped_bank("gdb13");
  const auto benzene = mol::parse_smiles("c1ccccc1");
  CHECK(apply_filter_bank(benzene, bank, full_descriptors(benzene)).pass);
  const auto toluene = mol::parse_smiles("Cc1ccccc1");
  const auto v = apply_filter_bank(toluene, bank, full_descriptors(toluene));
  CHECK_FALSE(v.pass);
  CHECK(std::find(v.violations.begin(), v.violations.end(), "methyl") != v.violations.end());
}

TEST_CASE("empty bank accepts everything") {
  const auto bank = parse_filter_bank("bank empty\nversion 1\n");
  CHECK(bank.rules.empty());
  for (const auto& smi : testing::seed_smiles()) {
    CHECK(apply_filter_bank(mol::parse_smiles(smi), bank, {}).pass);
  }
}

TEST_CASE("missing descriptors raise unless skipped") {
  const auto bank = parse_filter_bank("bank t\nversion 1\nscalar q qed > 0.3\n");
  const auto m = mol::parse_smiles("CCO");
  try {
    (void)apply_filter_bank(m, bank, {});
    FAIL("expected MissingDescriptor");
  } catch (const MissingDescriptor& e) {
    CHECK(e.descriptor() == "qed");
  }
  CHECK(apply_filter_bank(m, bank, {}, true).pass);
  CHECK(bank.descriptors() == std::vector<std::string>{"qed"});
}

TEST_CASE("adding a rule never turns a rejection into an acceptance") {
  const std::string base = "bank t\nversion 1\nforbidden halogen [Cl,Br,I]\nscalar mw mol_weight <= 200\n";
  const std::vector<std::string> extra = {"forbidden nitro [N+](=O)[O-]", "required ring [R]",
                                          "scalar rings n_rings <= 1", "forbidden carbonyl C=O"};
  const auto small = parse_filter_bank(base);
  for (const auto& rule : extra) {
    const auto big = parse_filter_bank(base + rule + "\n");
    for (const auto& smi : testing::seed_smiles()) {
      const auto m = mol::parse_smiles(smi);
      const auto d = desc::local_descriptors(m);
      const auto a = apply_filter_bank(m, small, d);
      const auto b = apply_filter_bank(m, big, d);
      if (!a.pass) CHECK_FALSE(b.pass);
      CHECK(b.violations.size() >= a.violations.size());
    }
  }
}

TEST_CASE("tpsa option selects the standard direction") {
  const auto published = shipped_bank("docking");
  const auto standard = shipped_bank("docking", {.tpsa_standard = true});
  auto find = [](const FilterBank& b) {
    for (const auto& r : b.rules) {
      if (r.name == "tpsa") return r;
    }
    throw std::runtime_error("no tpsa rule");
  };
  CHECK(find(published).op == Comparator::Greater);
  CHECK(find(standard).op == Comparator::LessEqual);
  CHECK(find(standard).threshold == 140.0);
  const auto m = mol::parse_smiles("CCO");
  auto d = full_descriptors(m);
  CHECK(apply_filter_bank(m, standard, d).pass);
  CHECK_FALSE(apply_filter_bank(m, published, d).pass);
}

TEST_CASE("bank files resolve includes relative to their directory") {
  const auto dir = std::filesystem::temp_directory_path() / "tartarus_bank_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "base.bank") << "bank base\nversion 1\nforbidden triple *#*\n";
    std::ofstream(dir / "top.bank") << "# comment\nbank top\nversion 1\ninclude base\nforbidden halogen [Cl,Br,I]\n";
    std::ofstream(dir / "loop.bank") << "bank loop\nversion 1\ninclude loop\n";
    std::ofstream(dir / "v2.bank") << "bank v2\nversion 2\n";
  }
  const auto top = load_filter_bank((dir / "top.bank").string());
  REQUIRE(top.rules.size() == 2);
  CHECK(top.rules[0].name == "triple");
  CHECK_THROWS_AS((void)load_filter_bank((dir / "loop.bank").string()), BankFormatError);
  CHECK_THROWS_AS((void)load_filter_bank((dir / "v2.bank").string()), BankFormatError);
  CHECK_THROWS_AS((void)parse_filter_bank("bank x\nversion 1\nfrobnicate y\n"), BankFormatError);
  std::filesystem::remove_all(dir);
}
