// SPDX-License-Identifier: Apache-2.0
#include "tartarus/substructure/filter_bank.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tartarus/data/embedded.hpp"

namespace tartarus::substructure {
namespace {

std::optional<Comparator> parse_comparator(std::string_view s) {
  if (s == "<") return Comparator::Less;
  if (s == "<=") return Comparator::LessEqual;
  if (s == ">") return Comparator::Greater;
  if (s == ">=") return Comparator::GreaterEqual;
  if (s == "==") return Comparator::Equal;
  if (s == "!=") return Comparator::NotEqual;
  return std::nullopt;
}

std::optional<std::string> shipped_text(std::string_view name) {
  const auto text = data::embedded_file("banks/" + std::string(name) + ".bank");
  if (!text) return std::nullopt;
  return std::string(*text);
}

void parse_into(FilterBank& bank, std::string_view text, const BankResolver& resolver, std::set<std::string>& stack,
                bool top) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool saw_version = false;
  auto fail = [&](const std::string& what) {
    throw BankFormatError("bank line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    // Only whole-line comments: SMARTS uses '#' for triple bonds and atomic numbers.
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') continue;
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string token; words >> token;) w.push_back(token);
    if (w.empty()) continue;
    const std::string& directive = w[0];
    if (directive == "bank") {
      if (w.size() != 2) fail("expected 'bank <name>'");
      if (top) bank.name = w[1];
    } else if (directive == "version") {
      if (w.size() != 2 || w[1] != "1") fail("unsupported bank version");
      saw_version = true;
    } else if (directive == "forbidden" || directive == "required") {
      if (w.size() < 3 || w.size() > 4) fail("expected '" + directive + " <rule> <pattern> [strip_stereo]'");
      CompileOptions opts;
      if (w.size() == 4) {
        if (w[3] != "strip_stereo") fail("unknown pattern flag '" + w[3] + "'");
        opts.strip_stereo = true;
      }
      Rule r;
      r.kind = directive == "forbidden" ? Rule::Kind::Forbidden : Rule::Kind::Required;
      r.name = w[1];
      try {
        r.pattern = compile_pattern(w[2], opts);
      } catch (const PatternSyntaxError& e) {
        fail(e.what());
      }
      bank.rules.push_back(std::move(r));
    } else if (directive == "scalar") {
      if (w.size() != 5) fail("expected 'scalar <rule> <descriptor> <op> <threshold>'");
      Rule r;
      r.kind = Rule::Kind::Scalar;
      r.name = w[1];
      r.descriptor = w[2];
      const auto op = parse_comparator(w[3]);
      if (!op) fail("unknown comparator '" + w[3] + "'");
      r.op = *op;
      try {
        std::size_t used = 0;
        r.threshold = std::stod(w[4], &used);
        if (used != w[4].size()) fail("bad threshold '" + w[4] + "'");
      } catch (const std::logic_error&) {
        fail("bad threshold '" + w[4] + "'");
      }
      bank.rules.push_back(std::move(r));
    } else if (directive == "include") {
      if (w.size() != 2) fail("expected 'include <bank>'");
      if (stack.count(w[1])) fail("include cycle through '" + w[1] + "'");
      std::optional<std::string> inner = resolver ? resolver(w[1]) : std::nullopt;
      if (!inner) inner = shipped_text(w[1]);
      if (!inner) fail("cannot resolve included bank '" + w[1] + "'");
      stack.insert(w[1]);
      parse_into(bank, *inner, resolver, stack, false);
      stack.erase(w[1]);
    } else {
      fail("unknown directive '" + directive + "'");
    }
  }
  if (!saw_version) throw BankFormatError("bank has no version line");
  if (top && bank.name.empty()) throw BankFormatError("bank has no name");
}

}  // namespace

std::string_view comparator_text(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Equal: return "==";
    case Comparator::NotEqual: return "!=";
  }
  return "?";
}

bool compare(double v, Comparator c, double t) {
  switch (c) {
    case Comparator::Less: return v < t;
    case Comparator::LessEqual: return v <= t;
    case Comparator::Greater: return v > t;
    case Comparator::GreaterEqual: return v >= t;
    case Comparator::Equal: return v == t;
    case Comparator::NotEqual: return v != t;
  }
  return false;
}

std::vector<std::string> FilterBank::descriptors() const {
  std::vector<std::string> out;
  for (const auto& r : rules) {
    if (r.kind == Rule::Kind::Scalar && std::find(out.begin(), out.end(), r.descriptor) == out.end()) {
      out.push_back(r.descriptor);
    }
  }
  return out;
}

FilterBank parse_filter_bank(std::string_view text, const BankResolver& resolver) {
  FilterBank bank;
  std::set<std::string> stack;
  parse_into(bank, text, resolver, stack, true);
  stack.insert(bank.name);
  return bank;
}

FilterBank load_filter_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BankFormatError("cannot open bank file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  BankResolver resolver = [dir](std::string_view name) -> std::optional<std::string> {
    std::ifstream f(dir / (std::string(name) + ".bank"));
    if (!f) return std::nullopt;
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  };
  return parse_filter_bank(ss.str(), resolver);
}

std::vector<std::string> shipped_bank_names() {
  std::vector<std::string> out;
  for (auto name : data::embedded_files()) {
    if (name.starts_with("banks/") && name.ends_with(".bank")) {
      out.emplace_back(name.substr(6, name.size() - 11));
    }
  }
  return out;
}

void apply_bank_options(FilterBank& bank, const BankOptions& options) {
  if (!options.tpsa_standard) return;
  for (auto& r : bank.rules) {
    if (r.kind == Rule::Kind::Scalar && r.descriptor == "tpsa" && r.op == Comparator::Greater) {
      r.op = Comparator::LessEqual;
    }
  }
}

FilterBank shipped_bank(std::string_view name, const BankOptions& options) {
  const auto text = shipped_text(name);
  if (!text) throw std::out_of_range("no shipped filter bank named '" + std::string(name) + "'");
  auto bank = parse_filter_bank(*text);
  apply_bank_options(bank, options);
  return bank;
}

FilterBank resolve_bank(const std::string& name_or_path, const BankOptions& options) {
  if (shipped_text(name_or_path)) return shipped_bank(name_or_path, options);
  auto bank = load_filter_bank(name_or_path);
  apply_bank_options(bank, options);
  return bank;
}

FilterVerdict apply_filter_bank(const mol::Molecule& m, const FilterBank& bank, const DescriptorMap& descriptors,
                                bool skip_missing) {
  FilterVerdict v;
  for (const auto& r : bank.rules) {
    bool ok = true;
    if (r.kind == Rule::Kind::Scalar) {
      const auto it = descriptors.find(r.descriptor);
      if (it == descriptors.end()) {
        if (skip_missing) continue;
        throw MissingDescriptor(r.descriptor);
      }
      ok = compare(it->second, r.op, r.threshold);
    } else {
      const bool found = has_match(m, *r.pattern);
      ok = r.kind == Rule::Kind::Forbidden ? !found : found;
    }
    if (!ok) {
      v.pass = false;
      v.violations.push_back(r.name);
    }
  }
  return v;
}

}  // namespace tartarus::substructure
