// SPDX-License-Identifier: Apache-2.0
#include "tartarus/harness/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "tartarus/descriptors/descriptors.hpp"
#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/smiles.hpp"

namespace tartarus::harness {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

double parse_number(const std::string& text, std::size_t line, const std::string& column) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw DatasetParseError(line, "column '" + column + "' is not numeric: '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<mol::Molecule> Dataset::molecules() const {
  std::vector<mol::Molecule> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.molecule);
  return out;
}

std::vector<mol::Molecule> Dataset::training() const {
  std::vector<mol::Molecule> out;
  for (std::size_t i = 0; i < train_count; ++i) out.push_back(entries[i].molecule);
  return out;
}

std::vector<mol::Molecule> Dataset::holdout() const {
  std::vector<mol::Molecule> out;
  for (std::size_t i = train_count; i < entries.size(); ++i) out.push_back(entries[i].molecule);
  return out;
}

Dataset parse_dataset(const std::string& text, const std::string& name) {
  Dataset d;
  d.path = name;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool first = true;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    for (auto& f : fields) f = trim(f);
    if (first) {
      first = false;
      std::string head = fields[0];
      std::transform(head.begin(), head.end(), head.begin(), [](unsigned char c) { return std::tolower(c); });
      if (fields.size() > 1 || head == "smiles") {
        d.columns.assign(fields.begin() + 1, fields.end());
        continue;
      }
    }
    if (fields.size() != d.columns.size() + 1) {
      throw DatasetParseError(line_no, "expected " + std::to_string(d.columns.size() + 1) + " fields, found " +
                                           std::to_string(fields.size()));
    }
    DatasetEntry e;
    try {
      e.molecule = mol::parse_smiles(fields[0]);
    } catch (const std::exception& ex) {
      throw DatasetParseError(line_no, "invalid SMILES '" + fields[0] + "': " + ex.what());
    }
    e.key = mol::canonical_key(e.molecule);
    e.smiles = mol::canonical_smiles(e.molecule);
    for (std::size_t c = 0; c < d.columns.size(); ++c) {
      e.properties[d.columns[c]] = parse_number(fields[c + 1], line_no, d.columns[c]);
    }
    if (!seen.insert(e.key).second) {
      d.warnings.push_back("line " + std::to_string(line_no) + ": duplicate of " + e.smiles + " dropped");
      continue;
    }
    d.entries.push_back(std::move(e));
  }
  if (d.entries.empty()) throw EmptyDataset("dataset '" + name + "' holds no molecules");
  d.train_count = std::max<std::size_t>(1, d.entries.size() * 8 / 10);
  return d;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), path.string());
}

std::vector<mol::Molecule> reference_seeds(const Dataset& d, const obj::TaskDefinition& task,
                                          const obj::ScharberConfig& cfg, std::size_t count) {
  bool scored = true;
  for (const auto& p : task.objective_properties) {
    if (std::find(d.columns.begin(), d.columns.end(), p) == d.columns.end()) scored = false;
  }
  std::vector<std::pair<double, const DatasetEntry*>> ranked;
  for (const auto& e : d.entries) {
    double s = 0.0;
    if (scored) {
      s = obj::task_score(task, e.properties, cfg, desc::scalar_descriptors(e.molecule).heavy_atom_count);
    }
    ranked.emplace_back(s, &e);
  }
  if (scored) {
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second->key < b.second->key;
    });
  }
  std::vector<mol::Molecule> out;
  for (std::size_t i = 0; i < std::min(count, ranked.size()); ++i) out.push_back(ranked[i].second->molecule);
  return out;
}

}  // namespace tartarus::harness
