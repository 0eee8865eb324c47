// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tartarus/molgraph/molecule.hpp"
#include "tartarus/objectives/tasks.hpp"

namespace tartarus::harness {

class DatasetParseError : public std::runtime_error {
 public:
  DatasetParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDataset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetEntry {
  mol::Molecule molecule;
  std::string key;
  std::string smiles;
  std::map<std::string, double, std::less<>> properties;
};

struct Dataset {
  std::string path;
  std::vector<std::string> columns;
  std::vector<DatasetEntry> entries;
  // Entries [0, train_count) train; the rest are held out.
  std::size_t train_count = 0;
  // One message per dropped duplicate.
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
  [[nodiscard]] std::vector<mol::Molecule> molecules() const;
  [[nodiscard]] std::vector<mol::Molecule> training() const;
  [[nodiscard]] std::vector<mol::Molecule> holdout() const;
};

/// One SMILES per line. When columns follow (tab separated) the first line
/// is a header naming them; a lone "smiles" first line is also a header.
/// Blank lines and lines starting with '#' are skipped. Molecules are
/// canonicalized and deduplicated; the first 80% (at least one) train.
[[nodiscard]] Dataset parse_dataset(const std::string& text, const std::string& name = "<memory>");
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& path);

/// Entries ordered best first for seeding a task: by task_score on the
/// property columns when the dataset has all objective properties (the toy
/// task needs none), otherwise in file order. Ties break by canonical key.
[[nodiscard]] std::vector<mol::Molecule> reference_seeds(const Dataset& d, const obj::TaskDefinition& task,
                                                        const obj::ScharberConfig& cfg, std::size_t count);

}  // namespace tartarus::harness
