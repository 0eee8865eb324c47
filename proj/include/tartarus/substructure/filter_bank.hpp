// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/substructure/pattern.hpp"

namespace tartarus::substructure {

class MissingDescriptor : public std::runtime_error {
 public:
  explicit MissingDescriptor(const std::string& name)
      : std::runtime_error("missing descriptor '" + name + "'"), name_(name) {}
  [[nodiscard]] const std::string& descriptor() const noexcept { return name_; }

 private:
  std::string name_;
};

class BankFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual };

[[nodiscard]] std::string_view comparator_text(Comparator c);
[[nodiscard]] bool compare(double value, Comparator c, double threshold);

struct Rule {
  enum class Kind { Forbidden, Required, Scalar } kind = Kind::Forbidden;
  std::string name;
  // Pattern rules.
  std::optional<Pattern> pattern;
  // Scalar rules.
  std::string descriptor;
  Comparator op = Comparator::LessEqual;
  double threshold = 0.0;
};

/// Versioned rule list. Text format, one directive per line:
///   bank <name>
///   version 1
///   forbidden <rule> <pattern> [strip_stereo]
///   required <rule> <pattern> [strip_stereo]
///   scalar <rule> <descriptor> <op> <threshold>
///   include <bank>
/// with '#' comments and blank lines ignored.
struct FilterBank {
  std::string name;
  int version = 1;
  std::vector<Rule> rules;

  /// Descriptor names referenced by scalar rules, in first-use order.
  [[nodiscard]] std::vector<std::string> descriptors() const;
};

struct FilterVerdict {
  bool pass = true;
  std::vector<std::string> violations;
};

using DescriptorMap = std::map<std::string, double, std::less<>>;
/// Returns bank text for an include directive, or nullopt.
using BankResolver = std::function<std::optional<std::string>(std::string_view)>;

[[nodiscard]] FilterBank parse_filter_bank(std::string_view text, const BankResolver& resolver = {});
/// Loads a bank file; includes resolve next to the file, then among shipped banks.
[[nodiscard]] FilterBank load_filter_bank(const std::string& path);

struct BankOptions {
  // Replace the published "tpsa > 140" rule with the conventional "<= 140".
  bool tpsa_standard = false;
};

[[nodiscard]] std::vector<std::string> shipped_bank_names();
/// One of the banks shipped in data/banks (gdb13, docking, reactivity,
/// reactivity_sa, emitter_sa). Throws std::out_of_range for unknown names.
[[nodiscard]] FilterBank shipped_bank(std::string_view name, const BankOptions& options = {});
/// Shipped bank by name, or a bank file when `name_or_path` names one.
[[nodiscard]] FilterBank resolve_bank(const std::string& name_or_path, const BankOptions& options = {});
void apply_bank_options(FilterBank& bank, const BankOptions& options);

/// Verdict over every rule. Throws MissingDescriptor when a scalar rule's
/// descriptor is absent, unless skip_missing is set, in which case such
/// rules are not evaluated.
[[nodiscard]] FilterVerdict apply_filter_bank(const mol::Molecule& m, const FilterBank& bank,
                                              const DescriptorMap& descriptors, bool skip_missing = false);

}  // namespace tartarus::substructure
