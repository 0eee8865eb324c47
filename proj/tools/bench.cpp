// SPDX-License-Identifier: Apache-2.0
// Command-line entry point for benchmark runs, timing and dataset tooling.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>

#include "tartarus/descriptors/descriptors.hpp"
#include "tartarus/harness/benchmark.hpp"
#include "tartarus/harness/dataset.hpp"
#include "tartarus/kernels/similarity.hpp"
#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/objectives/parameters.hpp"
#include "tartarus/providers/catalogue.hpp"
#include "tartarus/providers/subprocess.hpp"
#include "tartarus/selfies/selfies.hpp"
#include "tartarus/substructure/filter_bank.hpp"

namespace fs = std::filesystem;
using namespace tartarus;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty() && line.front() != '#') out.push_back(line);
  }
  return out;
}

// Dataset property columns with catalogue units serve as provider fixtures.
std::unique_ptr<providers::Provider> null_provider(const harness::Dataset& d) {
  std::map<std::string, providers::PropertyMap> fixtures;
  for (const auto& e : d.entries) {
    providers::PropertyMap values;
    for (const auto& [name, v] : e.properties) {
      if (providers::find_property(name)) values[name] = {v, providers::property_unit(name)};
    }
    fixtures[e.smiles] = std::move(values);
  }
  return std::make_unique<providers::NullProvider>(fixtures, providers::PropertyMap{});
}

struct RunArgs {
  std::string task;
  std::string dataset;
  std::string optimizer = "ga";
  std::size_t budget = 5000;
  std::optional<std::size_t> population;
  std::optional<int> iterations;
  int reps = 5;
  std::uint64_t seed = 0;
  std::string provider_cmd;
  bool null_provider = false;
  int workers = 1;
  int pipeline = 1;
  std::optional<double> timeout;
  std::string out;
  std::string parameters;
  bool unique_budget = false;
  bool csv = false;
  bool tpsa_standard = false;
  double max_wall = 86400.0;
};

int cmd_run(const RunArgs& a) {
  const auto& task = obj::find_task(a.task);
  const auto dataset = harness::load_dataset(a.dataset);
  for (const auto& w : dataset.warnings) std::cerr << "warning: " << w << '\n';

  harness::BenchmarkConfig cfg;
  cfg.optimizer = a.optimizer;
  cfg.budget = a.budget;
  cfg.unique_budget = a.unique_budget;
  cfg.max_wall_seconds = a.max_wall;
  cfg.population = a.population;
  cfg.iterations = a.iterations;
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.context.bank_options.tpsa_standard = a.tpsa_standard;
  if (const char* dir = std::getenv(providers::kCacheDirEnv); dir != nullptr && *dir != '\0') cfg.cache_dir = dir;

  if (!a.parameters.empty()) {
    const auto p = obj::load_parameters(a.parameters);
    cfg.context.scharber = p.scharber;
    cfg.context.envelope = p.envelope;
  } else if (task.family == obj::TaskFamily::Reactivity) {
    const auto& cols = dataset.columns;
    const bool has = std::find(cols.begin(), cols.end(), "dE_act_kcal") != cols.end() &&
                     std::find(cols.begin(), cols.end(), "dE_rxn_kcal") != cols.end();
    if (has && dataset.size() >= obj::kEnvelopeMinPoints) {
      std::vector<obj::EnergyPoint> points;
      for (const auto& e : dataset.entries) points.push_back({e.properties.at("dE_rxn_kcal"), e.properties.at("dE_act_kcal")});
      cfg.context.envelope = obj::fit_outlier_envelope(points);
    } else {
      std::cerr << "note: no outlier envelope (dataset lacks dE_act_kcal/dE_rxn_kcal columns)\n";
    }
  }

  providers::SubprocessOptions so;
  so.workers = a.workers;
  so.pipeline_depth = a.pipeline;
  so.timeout_seconds = a.timeout;
  std::unique_ptr<providers::Provider> provider;
  if (a.null_provider) {
    provider = null_provider(dataset);
  } else if (!a.provider_cmd.empty()) {
    provider = std::make_unique<providers::SubprocessProvider>(a.provider_cmd, so);
  } else if (auto env = providers::provider_from_environment(so)) {
    provider = std::move(env);
  } else if (obj::TaskEvaluator(task, cfg.context).required_properties().empty()) {
    provider = std::make_unique<providers::NullProvider>(std::map<std::string, providers::PropertyMap>{},
                                                         providers::PropertyMap{});
  } else {
    std::cerr << "error: task '" << task.name << "' needs a provider (--provider-cmd, --null-provider or "
              << providers::kProviderCommandEnv << ")\n";
    return 2;
  }

  const auto report = harness::run_benchmark(task, dataset, *provider, cfg);
  const auto table = harness::reports_table({report});
  std::cout << table;
  if (!a.out.empty()) {
    const fs::path out(a.out);
    fs::create_directories(out / "traces");
    write_file(out / "report.jsonl", harness::report_to_jsonl(report));
    write_file(out / "wall.json", harness::report_wall_json(report));
    write_file(out / "table.txt", table);
    if (a.csv) write_file(out / "report.csv", harness::reports_csv({report}));
    for (const auto& rep : report.reps) {
      write_file(out / "traces" / ("seed" + std::to_string(rep.seed) + ".jsonl"), opt::trace_to_jsonl(rep.trace));
    }
  }
  return 0;
}

int cmd_timing(const std::string& path, const harness::TimingConfig& cfg) {
  const auto dataset = harness::load_dataset(path);
  std::cout << harness::timing_table(harness::run_timing(dataset, cfg));
  return 0;
}

int cmd_diversity(const std::string& path) {
  std::vector<mol::Molecule> mols;
  for (const auto& line : read_lines(path)) {
    std::string smiles = line;
    if (line.front() == '{') smiles = nlohmann::json::parse(line).at("smiles").get<std::string>();
    if (smiles.empty()) continue;
    mols.push_back(mol::parse_smiles(smiles));
  }
  std::cout << "molecules " << mols.size() << "\ndiversity " << kernels::diversity_parallel(mols) << '\n';
  return 0;
}

int cmd_expand(const std::string& seed_smiles, const std::string& bank_name, std::size_t target, int reorderings,
               int mutations, std::uint64_t seed, const std::string& out) {
  const auto bank = substructure::resolve_bank(bank_name);
  const auto keep = [&](const mol::Molecule& m) {
    return substructure::apply_filter_bank(m, bank, desc::local_descriptors(m), true).pass;
  };
  const auto mols = selfies::expand_dataset(mol::parse_smiles(seed_smiles), keep, reorderings, mutations, target, seed);
  std::string text;
  for (const auto& m : mols) text += mol::canonical_smiles(m) + '\n';
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  std::cerr << mols.size() << " molecules\n";
  return 0;
}

int cmd_filters(const std::string& bank_name, const std::string& path, bool tpsa_standard) {
  substructure::BankOptions opts;
  opts.tpsa_standard = tpsa_standard;
  const auto bank = substructure::resolve_bank(bank_name, opts);
  std::size_t passed = 0;
  std::size_t total = 0;
  for (const auto& line : read_lines(path)) {
    const auto smiles = line.substr(0, line.find('\t'));
    ++total;
    try {
      const auto m = mol::parse_smiles(smiles);
      const auto v = substructure::apply_filter_bank(m, bank, desc::local_descriptors(m), true);
      passed += v.pass ? 1 : 0;
      std::cout << smiles << '\t' << (v.pass ? "pass" : "fail");
      for (const auto& r : v.violations) std::cout << '\t' << r;
      std::cout << '\n';
    } catch (const std::exception& e) {
      std::cout << smiles << "\terror\t" << e.what() << '\n';
    }
  }
  std::cerr << passed << "/" << total << " pass (rules on provider descriptors are skipped)\n";
  return 0;
}

int cmd_tasks() {
  for (const auto& t : obj::task_registry()) {
    std::cout << t.name << '\t' << obj::family_name(t.family) << '\t' << (t.bank.empty() ? "-" : t.bank) << '\t'
              << t.population << 'x' << t.iterations << '\t' << t.description << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse molecular design benchmark harness"};
  app.require_subcommand(1);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run a task with an optimizer over repeated seeds");
  r->add_option("--task", run.task, "Task name (see 'tasks list')")->required();
  r->add_option("--dataset", run.dataset, "SMILES file, optional tab-separated property columns")->required();
  r->add_option("--optimizer", run.optimizer, "ga or markov-hc")->check(CLI::IsMember(harness::optimizer_names()));
  r->add_option("--budget", run.budget, "Proposal budget per repetition");
  r->add_option("--population", run.population, "Population (GA) or batch size (Markov-HC)");
  r->add_option("--iterations", run.iterations, "Iterations after the seed population");
  r->add_option("--reps", run.reps, "Repetitions");
  r->add_option("--seed", run.seed, "Seed of the first repetition");
  r->add_option("--provider-cmd", run.provider_cmd, "Provider command line");
  r->add_flag("--null-provider", run.null_provider, "Serve dataset property columns as provider values");
  r->add_option("--workers", run.workers, "Provider processes");
  r->add_option("--pipeline", run.pipeline, "In-flight requests per provider process");
  r->add_option("--timeout", run.timeout, "Per-request timeout in seconds");
  r->add_option("--out", run.out, "Output directory for reports and traces");
  r->add_option("--parameters", run.parameters, "Scharber and envelope parameters (JSON)");
  r->add_flag("--unique-budget", run.unique_budget, "Count each distinct molecule once");
  r->add_flag("--csv", run.csv, "Also write report.csv");
  r->add_flag("--tpsa-standard", run.tpsa_standard, "Use tpsa <= 140 in the docking bank");
  r->add_option("--max-wall", run.max_wall, "Wall-clock cap in seconds");

  std::string timing_dataset;
  harness::TimingConfig timing;
  auto* t = app.add_subcommand("timing", "Pre-conditioning and sampling time per optimizer");
  t->add_option("--dataset", timing_dataset, "SMILES file")->required();
  t->add_option("--n", timing.unique_target, "Unique molecules to sample");
  t->add_option("--reps", timing.reps, "Repetitions");
  t->add_option("--seed", timing.seed, "Seed of the first repetition");
  t->add_option("--optimizers", timing.optimizers, "Optimizers to time")->check(CLI::IsMember(harness::optimizer_names()));

  std::string diversity_in;
  auto* dv = app.add_subcommand("diversity", "Diversity of a proposal file (SMILES lines or trace JSONL)");
  dv->add_option("--in", diversity_in, "Proposal file")->required();

  auto* ds = app.add_subcommand("dataset", "Dataset tooling");
  ds->require_subcommand(1);
  std::string seed_smiles;
  std::string expand_bank = "reactivity";
  std::size_t target = 1000;
  int reorderings = 20;
  int mutations = 20;
  std::uint64_t expand_seed = 0;
  std::string expand_out;
  auto* ex = ds->add_subcommand("expand", "Grow a dataset from a seed by mutation, keeping bank-passing molecules");
  ex->add_option("--seed-smiles", seed_smiles, "Seed molecule")->required();
  ex->add_option("--bank", expand_bank, "Filter bank name or file");
  ex->add_option("--target", target, "Dataset size");
  ex->add_option("--reorderings", reorderings, "Randomized SMILES per frontier molecule");
  ex->add_option("--mutations", mutations, "Mutations per reordering");
  ex->add_option("--seed", expand_seed, "Random seed");
  ex->add_option("--out", expand_out, "Output file (stdout when omitted)");

  auto* fl = app.add_subcommand("filters", "Filter bank tooling");
  fl->require_subcommand(1);
  std::string check_bank;
  std::string check_in;
  bool check_tpsa = false;
  auto* ck = fl->add_subcommand("check", "Apply a filter bank to a SMILES file");
  ck->add_option("--bank", check_bank, "Filter bank name or file")->required();
  ck->add_option("--in", check_in, "SMILES file")->required();
  ck->add_flag("--tpsa-standard", check_tpsa, "Use tpsa <= 140 in the docking bank");

  auto* tk = app.add_subcommand("tasks", "Task registry");
  tk->require_subcommand(1);
  auto* tl = tk->add_subcommand("list", "List registered tasks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (r->parsed()) return cmd_run(run);
    if (t->parsed()) return cmd_timing(timing_dataset, timing);
    if (dv->parsed()) return cmd_diversity(diversity_in);
    if (ex->parsed()) return cmd_expand(seed_smiles, expand_bank, target, reorderings, mutations, expand_seed, expand_out);
    if (ck->parsed()) return cmd_filters(check_bank, check_in, check_tpsa);
    if (tl->parsed()) return cmd_tasks();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
