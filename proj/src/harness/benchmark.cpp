// SPDX-License-Identifier: Apache-2.0
#include "tartarus/harness/benchmark.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "tartarus/kernels/similarity.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/optimizers/ga.hpp"
#include "tartarus/optimizers/markov.hpp"
#include "tartarus/optimizers/timing.hpp"
#include "tartarus/providers/evaluator.hpp"

namespace tartarus::harness {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<providers::EvaluationRecord> read_cache(const std::filesystem::path& path) {
  std::vector<providers::EvaluationRecord> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    try {
      out.push_back(providers::record_from_json(line));
    } catch (const std::exception&) {
      // A torn or foreign line only loses that entry.
    }
  }
  return out;
}

void write_cache(const std::filesystem::path& path, const std::vector<providers::EvaluationRecord>& records) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& r : records) out << providers::record_to_json(r) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

double proposal_diversity(const opt::RunTrace& t) {
  std::vector<mol::Molecule> mols;
  mols.reserve(t.proposals.size());
  for (const auto& e : t.proposals) {
    if (!e.smiles.empty()) mols.push_back(mol::parse_smiles(e.smiles));
  }
  if (mols.size() < 2) return 0.0;
  return kernels::diversity_parallel(mols);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

const std::vector<std::string>& optimizer_names() {
  static const std::vector<std::string> kNames{"ga", "markov-hc"};
  return kNames;
}

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd r;
  if (v.empty()) return r;
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(v.size()));
  return r;
}

RunReport run_benchmark(const obj::TaskDefinition& task, const Dataset& dataset, providers::Provider& provider,
                        const BenchmarkConfig& cfg) {
  if (cfg.optimizer != "ga" && cfg.optimizer != "markov-hc") throw UnknownOptimizer("unknown optimizer '" + cfg.optimizer + "'");
  if (cfg.reps < 1) throw std::invalid_argument("repetitions must be positive");
  const obj::TaskEvaluator evaluator(task, cfg.context);
  const auto population = cfg.population.value_or(static_cast<std::size_t>(task.population));
  const int iterations = cfg.iterations.value_or(task.iterations);

  RunReport report;
  report.task = task.name;
  report.optimizer = cfg.optimizer;
  const auto t_all = Clock::now();

  std::optional<std::filesystem::path> cache_path;
  std::vector<providers::EvaluationRecord> cached;
  if (cfg.cache_dir) {
    cache_path = *cfg.cache_dir / (task.name + ".cache.jsonl");
    cached = read_cache(*cache_path);
  }
  const auto training = dataset.training();
  std::size_t all_proposals = 0;
  std::size_t all_feasible = 0;

  for (int r = 0; r < cfg.reps; ++r) {
    const auto t0 = Clock::now();
    providers::Evaluator ev(provider, providers::Budget{cfg.budget, cfg.max_wall_seconds, cfg.unique_budget});
    ev.warm_cache(cached);
    opt::TaskOracle oracle(evaluator, ev);
    RepetitionResult rep;
    rep.seed = cfg.seed + static_cast<std::uint64_t>(r);
    if (cfg.optimizer == "ga") {
      opt::GaConfig g;
      g.population_size = population;
      g.iterations = iterations;
      g.rng_seed = rep.seed;
      rep.trace = opt::run_ga(oracle, reference_seeds(dataset, task, cfg.context.scharber, population), g);
    } else {
      opt::MarkovHcConfig m;
      m.batch_size = population;
      m.iterations = iterations;
      m.rng_seed = rep.seed;
      rep.trace = opt::run_markov_hc(oracle, training, reference_seeds(dataset, task, cfg.context.scharber, m.top_k), m);
    }
    cached = ev.cached_records();
    rep.best_fitness = rep.trace.best_fitness;
    rep.best_smiles = rep.trace.best_smiles;
    rep.best_so_far = rep.trace.best_so_far;
    rep.proposals = rep.trace.proposals.size();
    for (const auto& e : rep.trace.proposals) rep.feasible += e.feasible ? 1 : 0;
    rep.success_rate = rep.proposals == 0 ? 0.0 : static_cast<double>(rep.feasible) / static_cast<double>(rep.proposals);
    rep.diversity = proposal_diversity(rep.trace);
    rep.budget_exhausted = rep.trace.budget_exhausted;
    rep.degenerate = rep.trace.degenerate;
    rep.provider_requests = ev.provider_requests();
    rep.wall_seconds = seconds_since(t0);
    all_proposals += rep.proposals;
    all_feasible += rep.feasible;
    report.reps.push_back(std::move(rep));
  }
  if (cache_path) write_cache(*cache_path, cached);

  std::vector<double> bests;
  std::vector<double> divs;
  for (const auto& rep : report.reps) {
    bests.push_back(rep.best_fitness);
    divs.push_back(rep.diversity);
  }
  const auto ms = mean_sd(bests);
  report.mean_best = ms.mean;
  report.sd_best = ms.sd;
  report.mean_diversity = mean_sd(divs).mean;
  report.success_rate = all_proposals == 0 ? 0.0 : static_cast<double>(all_feasible) / static_cast<double>(all_proposals);
  report.wall_seconds = seconds_since(t_all);
  return report;
}

std::string report_to_jsonl(const RunReport& r) {
  std::string out;
  for (const auto& rep : r.reps) {
    nlohmann::json j;
    j["kind"] = "repetition";
    j["task"] = r.task;
    j["optimizer"] = r.optimizer;
    j["seed"] = rep.seed;
    j["best_fitness"] = rep.best_fitness;
    j["best_smiles"] = rep.best_smiles;
    j["best_so_far"] = rep.best_so_far;
    j["proposals"] = rep.proposals;
    j["feasible"] = rep.feasible;
    j["success_rate"] = rep.success_rate;
    j["diversity"] = rep.diversity;
    j["budget_exhausted"] = rep.budget_exhausted;
    j["degenerate"] = rep.degenerate;
    out += j.dump() + '\n';
  }
  nlohmann::json s;
  s["kind"] = "summary";
  s["task"] = r.task;
  s["optimizer"] = r.optimizer;
  s["repetitions"] = r.reps.size();
  s["mean_best"] = r.mean_best;
  s["sd_best"] = r.sd_best;
  s["success_rate"] = r.success_rate;
  s["diversity"] = r.mean_diversity;
  out += s.dump() + '\n';
  return out;
}

std::string report_wall_json(const RunReport& r) {
  nlohmann::json j;
  j["task"] = r.task;
  j["optimizer"] = r.optimizer;
  j["wall_seconds"] = r.wall_seconds;
  std::vector<double> per;
  for (const auto& rep : r.reps) per.push_back(rep.wall_seconds);
  j["repetition_wall_seconds"] = per;
  return j.dump() + '\n';
}

std::string reports_table(const std::vector<RunReport>& reports) {
  std::vector<std::array<std::string, 5>> rows{{"task", "optimizer", "best (mean ± sd)", "SR", "diversity"}};
  for (const auto& r : reports) {
    rows.push_back({r.task, r.optimizer, fixed(r.mean_best, 3) + " ± " + fixed(r.sd_best, 3),
                    fixed(r.success_rate, 3), fixed(r.mean_diversity, 3)});
  }
  std::array<std::size_t, 5> width{};
  // "±" is two bytes but one column wide.
  auto cols = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
    return n;
  };
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], cols(row[c]));
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < 5; ++c) {
      out += rows[i][c];
      if (c + 1 < 5) out += std::string(width[c] - cols(rows[i][c]) + 2, ' ');
    }
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out += std::string(total - 2, '-') + '\n';
    }
  }
  return out;
}

std::string reports_csv(const std::vector<RunReport>& reports) {
  std::string out = "task,optimizer,repetitions,mean_best,sd_best,success_rate,diversity\n";
  for (const auto& r : reports) {
    out += r.task + ',' + r.optimizer + ',' + std::to_string(r.reps.size()) + ',' + fixed(r.mean_best, 6) + ',' +
           fixed(r.sd_best, 6) + ',' + fixed(r.success_rate, 6) + ',' + fixed(r.mean_diversity, 6) + '\n';
  }
  return out;
}

std::vector<TimingRow> run_timing(const Dataset& dataset, const TimingConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("repetitions must be positive");
  const auto training = dataset.training();
  std::vector<TimingRow> rows;
  for (const auto& name : cfg.optimizers) {
    TimingRow row;
    row.optimizer = name;
    std::vector<double> pre;
    std::vector<double> sample;
    for (int r = 0; r < cfg.reps; ++r) {
      const auto seed = cfg.seed + static_cast<std::uint64_t>(r);
      opt::SampleOutcome outcome;
      if (name == "ga") {
        auto t0 = Clock::now();
        const auto prepared = opt::precondition_ga(training);
        pre.push_back(seconds_since(t0));
        opt::GaConfig g;
        g.population_size = cfg.unique_target;
        g.rng_seed = seed;
        t0 = Clock::now();
        outcome = opt::sample_ga(prepared, cfg.unique_target, g, cfg.max_proposals);
        sample.push_back(seconds_since(t0));
      } else if (name == "markov-hc") {
        opt::MarkovHcConfig m;
        m.rng_seed = seed;
        auto t0 = Clock::now();
        const auto model = opt::precondition_markov(training, m);
        pre.push_back(seconds_since(t0));
        t0 = Clock::now();
        outcome = opt::sample_markov(model, cfg.unique_target, m, cfg.max_proposals);
        sample.push_back(seconds_since(t0));
      } else {
        throw UnknownOptimizer("unknown optimizer '" + name + "'");
      }
      row.unique_counts.push_back(outcome.unique_keys.size());
    }
    row.precondition_seconds = mean_sd(pre);
    row.sample_seconds = mean_sd(sample);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string timing_table(const std::vector<TimingRow>& rows) {
  std::string out = "optimizer    precondition time [s]    sample time [s]        unique\n";
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %9.3f ± %-9.3f    %9.3f ± %-9.3f  %zu\n", r.optimizer.c_str(),
                  r.precondition_seconds.mean, r.precondition_seconds.sd, r.sample_seconds.mean, r.sample_seconds.sd,
                  r.unique_counts.empty() ? std::size_t{0} : r.unique_counts.front());
    out += buf;
  }
  return out;
}

}  // namespace tartarus::harness
