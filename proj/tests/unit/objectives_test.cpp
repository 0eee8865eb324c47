// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/objectives/envelope.hpp"
#include "tartarus/objectives/parameters.hpp"
#include "tartarus/objectives/scharber.hpp"
#include "tartarus/objectives/tasks.hpp"
#include "tartarus/util/rng.hpp"

using namespace tartarus;
using namespace tartarus::obj;

namespace {

// Photon flux integral recomputed from scratch over the masked table.
double jsc_oracle(const Spectrum& s, double gap_ev, double eqe) {
  const double hc = 6.62607015e-34 * 2.99792458e8;
  const double q = 1.602176634e-19;
  std::vector<double> wl;
  std::vector<double> phi;
  for (std::size_t i = 0; i < s.wavelength_nm.size(); ++i) {
    const double e_joule = hc / (s.wavelength_nm[i] * 1e-9);
    if (e_joule / q >= gap_ev) {
      wl.push_back(s.wavelength_nm[i]);
      phi.push_back(s.irradiance[i] / e_joule);
    }
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < wl.size(); ++i) integral += (wl[i] - wl[i - 1]) * (phi[i] + phi[i - 1]) / 2.0;
  return q * eqe * integral / 10.0;
}

providers::PropertyMap props(std::initializer_list<std::pair<const char*, double>> values) {
  providers::PropertyMap m;
  for (const auto& [k, v] : values) m[k] = {v, providers::property_unit(k)};
  return m;
}

}  // namespace

TEST_CASE("reference spectrum parses and integrates") {
  const auto& s = reference_spectrum();
  CHECK(s.wavelength_nm.front() == 280.0);
  CHECK(s.wavelength_nm.back() == 4000.0);
  const double p_in = incident_power(s);
  CHECK(p_in > 95.0);
  CHECK(p_in < 105.0);
  for (double e : {0.0, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    CHECK(integrated_jsc(s, e, 0.65) == doctest::Approx(jsc_oracle(s, e, 0.65)).epsilon(1e-12));
  }
  CHECK(integrated_jsc(s, 1.0, 0.65) == doctest::Approx(31.317844212192526).epsilon(1e-9));
  CHECK(integrated_jsc(s, 10.0, 0.65) == 0.0);
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS((void)parse_spectrum("300 1\n"), SpectrumMalformed);
  CHECK_THROWS_AS((void)parse_spectrum("280 1\n270 1\n4000 1\n"), SpectrumMalformed);
  CHECK_THROWS_AS((void)parse_spectrum("300 1\n4000 1\n"), SpectrumMalformed);
  CHECK_THROWS_AS((void)parse_spectrum("280 1\n4000 x\n"), SpectrumMalformed);
  CHECK_NOTHROW((void)parse_spectrum("# header\n280 1\n4000 1\n"));
}

TEST_CASE("current surrogate is the least squares optimum") {
  const auto& s = reference_spectrum();
  const auto fit = fit_jsc_surrogate(s, 0.65);
  CHECK(fit.a > 0.0);
  CHECK(fit.b > 0.0);
  CHECK(fit(0.0) == fit.a);
  const FitGrid grid;
  auto sse = [&](double a, double b) {
    double t = 0.0;
    for (int i = 0; i < grid.points; ++i) {
      const double e = grid.lo_ev + (grid.hi_ev - grid.lo_ev) * i / (grid.points - 1);
      const double r = a * std::exp(-e * e / b) - jsc_oracle(s, e, 0.65);
      t += r * r;
    }
    return t;
  };
  const double best = sse(fit.a, fit.b);
  for (double da : {-1e-3, 1e-3}) {
    for (double db : {-1e-3, 0.0, 1e-3}) CHECK(sse(fit.a * (1 + da), fit.b * (1 + db)) > best);
  }
  double worst = 0.0;
  for (int i = 0; i < grid.points; ++i) {
    const double e = grid.lo_ev + (grid.hi_ev - grid.lo_ev) * i / (grid.points - 1);
    const double j = jsc_oracle(s, e, 0.65);
    worst = std::max(worst, std::abs(fit(e) - j) / j);
  }
  CHECK(fit.max_relative_error == doctest::Approx(worst).epsilon(1e-9));
  CHECK_THROWS_AS((void)fit_jsc_surrogate(s, 0.0), FitDiverged);
  // Linear in quantum efficiency.
  const auto half = fit_jsc_surrogate(s, 0.325);
  CHECK(half.a == doctest::Approx(fit.a / 2).epsilon(1e-6));
  CHECK(half.b == doctest::Approx(fit.b).epsilon(1e-6));
}

TEST_CASE("calibration intercepts and affinity") {
  const auto& cfg = default_scharber_config();
  const auto zero = calibrate(make_frontier(0.0, 0.0), cfg);
  CHECK(std::abs(zero.homo_ev - 2.5377) <= 1e-12);
  CHECK(std::abs(zero.lumo_ev - 3.7913) <= 1e-12);
  CHECK(calibrate(make_frontier(-10.0, 0.0), cfg).homo_ev == doctest::Approx(-5.5133).epsilon(1e-12));
  const auto e = calibrate(make_frontier(-9.0, -3.0), cfg);
  CHECK(e.gap_ev == doctest::Approx(e.lumo_ev - e.homo_ev));
  util::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = -12.0 + 10.0 * util::uniform_real(rng);
    const double alpha = 0.5 + util::uniform_real(rng);
    const auto a = calibrate(make_frontier(alpha * x, alpha * x), cfg);
    const auto b = calibrate(make_frontier(x, x), cfg);
    CHECK(a.homo_ev - b.homo_ev == doctest::Approx((alpha - 1.0) * x * cfg.calib_homo_slope).epsilon(1e-9));
    CHECK(a.lumo_ev - b.lumo_ev == doctest::Approx((alpha - 1.0) * x * cfg.calib_lumo_slope).epsilon(1e-9));
  }
}

TEST_CASE("open circuit voltage and clamps") {
  const auto& cfg = default_scharber_config();
  const auto donor = make_frontier(-5.5, -3.0);
  CHECK(std::abs(open_circuit_voltage(donor, PceMode::DonorPcbm, cfg) - 0.9) <= 1e-12);
  CHECK(scharber_pce(donor, PceMode::DonorPcbm, cfg) > 0.0);
  // Donor LUMO only 0.1 eV above the acceptor LUMO.
  const auto shallow = make_frontier(-5.5, -4.2);
  CHECK(open_circuit_voltage(shallow, PceMode::DonorPcbm, cfg) == 0.0);
  CHECK(scharber_pce(shallow, PceMode::DonorPcbm, cfg) == 0.0);
  // Donor HOMO above acceptor LUMO + overpotential.
  const auto high = make_frontier(-4.1, -1.0);
  CHECK(open_circuit_voltage(high, PceMode::DonorPcbm, cfg) == 0.0);
  CHECK(scharber_pce(high, PceMode::DonorPcbm, cfg) == 0.0);
  const auto acceptor = make_frontier(-6.5, -4.0);
  CHECK(open_circuit_voltage(acceptor, PceMode::AcceptorPcdtbt, cfg) == doctest::Approx(1.2));
  CHECK(open_circuit_voltage(make_frontier(-7.0, -5.3), PceMode::AcceptorPcdtbt, cfg) == 0.0);
}

TEST_CASE("surrogate gap modes") {
  auto cfg = default_scharber_config();
  const auto e = make_frontier(-5.5, -3.0);
  CHECK(surrogate_gap(e, PceMode::DonorPcbm, cfg) == doctest::Approx(2.5));
  CHECK(surrogate_gap(e, PceMode::AcceptorPcdtbt, cfg) == doctest::Approx(2.5));
  cfg.gap_mode = GapMode::Interface;
  CHECK(surrogate_gap(e, PceMode::DonorPcbm, cfg) == doctest::Approx(1.2));
  CHECK(surrogate_gap(e, PceMode::AcceptorPcdtbt, cfg) == doctest::Approx(2.5));
  const double pce = scharber_pce(e, PceMode::DonorPcbm, cfg);
  CHECK(pce == doctest::Approx(100.0 * 0.9 * 0.65 * short_circuit_current(1.2, cfg) / cfg.p_in));
}

TEST_CASE("PCE is non-negative and monotone") {
  const auto& cfg = default_scharber_config();
  util::Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const double homo = -8.0 + 4.0 * util::uniform_real(rng);
    const double lumo = homo + 0.5 + 4.0 * util::uniform_real(rng);
    for (auto mode : {PceMode::DonorPcbm, PceMode::AcceptorPcdtbt}) {
      CHECK(scharber_pce(make_frontier(homo, lumo), mode, cfg) >= 0.0);
    }
    const double j = 30.0 * util::uniform_real(rng);
    const double v = 2.0 * util::uniform_real(rng);
    const double dv = util::uniform_real(rng);
    const double dj = util::uniform_real(rng);
    CHECK(pce_from(v + dv, j, cfg) >= pce_from(v, j, cfg));
    CHECK(pce_from(v, j + dj, cfg) >= pce_from(v, j, cfg));
  }
}

TEST_CASE("task registry") {
  const auto& tasks = task_registry();
  int benchmark = 0;
  for (const auto& t : tasks) {
    if (t.family != TaskFamily::Toy) ++benchmark;
    CHECK(t.penalty_fitness == kPenaltyFitness);
    CHECK(&find_task(t.name) == &t);
  }
  CHECK(benchmark == 12);
  CHECK_THROWS_AS((void)find_task("nope"), UnknownTask);
  CHECK(find_task("activation_energy").population == 100);
  CHECK(find_task("activation_energy").iterations == 50);
  CHECK(find_task("docking_1syh").population == 500);
  const TaskEvaluator docking(find_task("docking_1syh"));
  const auto& req = docking.required_properties();
  for (const char* p : {"docking_1syh", "logp", "sascore", "qed", "tpsa", "alerts_pass"}) {
    CHECK(std::find(req.begin(), req.end(), p) != req.end());
  }
  CHECK(std::find(req.begin(), req.end(), "mol_weight") == req.end());
}

TEST_CASE("emitter composite arithmetic") {
  const TaskEvaluator eval(find_task("emitter_composite"));
  const auto m = mol::parse_smiles("c1ccc2ccccc2c1");
  const auto r = eval(m, props({{"osc_strength", 1.0}, {"st_gap_ev", 0.1}, {"vee_ev", 3.2}, {"sascore", 2.0}}));
  CHECK(r.feasible);
  CHECK(r.fitness == doctest::Approx(0.9).epsilon(1e-12));
  const auto gated = eval(m, props({{"osc_strength", 1.0}, {"st_gap_ev", 0.1}, {"vee_ev", 3.2}, {"sascore", 4.6}}));
  CHECK_FALSE(gated.feasible);
  CHECK(gated.fitness == kPenaltyFitness);
  const auto edge = eval(m, props({{"osc_strength", 1.0}, {"st_gap_ev", 0.1}, {"vee_ev", 3.2}, {"sascore", 4.5}}));
  CHECK(edge.feasible);
}

TEST_CASE("reactivity penalties") {
  const TaskEvaluator eval(find_task("activation_energy"));
  const auto values = props({{"dE_act_kcal", 20.0}, {"dE_rxn_kcal", -5.0}});
  const auto no_core = eval(mol::parse_smiles("CCCCCC"), values);
  CHECK_FALSE(no_core.feasible);
  CHECK(no_core.fitness == -10000.0);
  CHECK(no_core.violations.front() == "core_motif");
  const auto core = mol::parse_smiles("[H]C1(C)C(C)2C34C5(C)C(C)=C(C)C(C)(C5)C3(C4)C(C)(C2)C1(C)[H]");
  const auto ok = eval(core, values);
  CHECK(ok.feasible);
  CHECK(ok.fitness == -20.0);
  CHECK(eval(mol::Molecule{}, values).fitness == -10000.0);

  const TaskEvaluator combined(find_task("reaction_minus_activation"));
  auto with_sa = values;
  with_sa["sascore"] = {5.0, "dimensionless"};
  CHECK(combined(core, with_sa).fitness == doctest::Approx(-(-20.0 + -5.0)));
  with_sa["sascore"] = {6.5, "dimensionless"};
  CHECK(combined(core, with_sa).fitness == -10000.0);

  std::vector<EnergyPoint> pts;
  util::Rng rng(1);
  for (int i = 0; i < 200; ++i) pts.push_back({util::standard_normal(rng), 20.0 + util::standard_normal(rng)});
  TaskContext ctx;
  ctx.envelope = fit_outlier_envelope(pts, 0.01);
  const TaskEvaluator guarded(find_task("activation_energy"), ctx);
  CHECK(guarded(core, props({{"dE_act_kcal", 20.0}, {"dE_rxn_kcal", 0.0}})).feasible);
  const auto outlier = guarded(core, props({{"dE_act_kcal", -80.0}, {"dE_rxn_kcal", 0.0}}));
  CHECK_FALSE(outlier.feasible);
  CHECK(outlier.violations == std::vector<std::string>{"energy_outlier"});
}

TEST_CASE("missing properties and unit tags") {
  const TaskEvaluator eval(find_task("singlet_triplet"));
  const auto m = mol::parse_smiles("c1ccccc1");
  try {
    (void)eval(m, props({{"st_gap_ev", 0.2}}));
    FAIL("expected MissingProperty");
  } catch (const MissingProperty& e) {
    CHECK(e.property() == "sascore");
  }
  providers::PropertyMap wrong = props({{"st_gap_ev", 0.2}, {"sascore", 2.0}});
  wrong["st_gap_ev"].unit = "kcal/mol";
  CHECK_THROWS_AS((void)eval(m, wrong), UnitMismatch);
}

TEST_CASE("penalty dominates feasible fitness and minimized quantities are negated") {
  const auto& cfg = default_scharber_config();
  util::Rng rng(21);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * util::uniform_real(rng); };
  for (const auto& task : task_registry()) {
    double worst = INFINITY;
    for (int i = 0; i < 10000; ++i) {
      std::map<std::string, double, std::less<>> v = {
          {"homo_ev", draw(-12, -4)},        {"lumo_ev", draw(-4, 2)},        {"sascore", draw(1, 10)},
          {"st_gap_ev", draw(-1, 3)},        {"osc_strength", draw(0, 3)},    {"vee_ev", draw(0, 10)},
          {"docking_1syh", draw(-20, 10)},   {"docking_6y2f", draw(-20, 10)}, {"docking_4lde", draw(-20, 10)},
          {"dE_act_kcal", draw(-100, 200)},  {"dE_rxn_kcal", draw(-200, 100)}};
      worst = std::min(worst, task_score(task, v, cfg, static_cast<int>(draw(1, 60))));
    }
    CHECK_MESSAGE(task.penalty_fitness < worst, task.name);
  }
  // argmax over fitness equals argmin over the minimized quantity.
  const std::vector<std::pair<std::string, std::string>> minimized = {{"singlet_triplet", "st_gap_ev"},
                                                                       {"docking_6y2f", "docking_6y2f"},
                                                                       {"activation_energy", "dE_act_kcal"},
                                                                       {"reaction_energy", "dE_rxn_kcal"}};
  for (const auto& [name, key] : minimized) {
    const auto& task = find_task(name);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::map<std::string, double, std::less<>>> sets(20);
      std::size_t best_q = 0;
      std::size_t best_f = 0;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        sets[i] = {{"dE_act_kcal", draw(-50, 50)}, {"dE_rxn_kcal", draw(-50, 50)}};
        sets[i][key] = draw(-50, 50);
        if (sets[i][key] < sets[best_q][key]) best_q = i;
        if (task_score(task, sets[i], cfg) > task_score(task, sets[best_f], cfg)) best_f = i;
      }
      CHECK(best_q == best_f);
    }
  }
}

TEST_CASE("outlier envelope on a Gaussian sample") {
  util::Rng rng(42);
  std::vector<EnergyPoint> pts(10000);
  for (auto& p : pts) p = {util::standard_normal(rng), util::standard_normal(rng)};
  const auto env = fit_outlier_envelope(pts, 0.01);
  int flagged = 0;
  double largest = 0.0;
  for (const auto& p : pts) {
    flagged += env.is_outlier(p) ? 1 : 0;
    largest = std::max(largest, env.mahalanobis2(p));
  }
  CHECK(std::abs(flagged / 10000.0 - 0.01) <= 0.005);
  CHECK_FALSE(env.is_outlier(env.center));
  // Boundary points are inliers.
  bool boundary_seen = false;
  for (const auto& p : pts) {
    if (env.mahalanobis2(p) == env.threshold) {
      boundary_seen = true;
      CHECK_FALSE(env.is_outlier(p));
    }
  }
  CHECK(boundary_seen);
  const double scale = std::sqrt(10.0 * largest / env.mahalanobis2({env.center[0] + 1.0, env.center[1]}));
  CHECK(env.is_outlier({env.center[0] + scale, env.center[1]}));
}

TEST_CASE("envelope rejects degenerate input") {
  std::vector<EnergyPoint> same(50, EnergyPoint{1.0, 2.0});
  CHECK_THROWS_AS((void)fit_outlier_envelope(same, 0.01), DegenerateCovariance);
  std::vector<EnergyPoint> line;
  for (int i = 0; i < 50; ++i) line.push_back({1.0 * i, 2.0 * i + 1.0});
  CHECK_THROWS_AS((void)fit_outlier_envelope(line, 0.01), DegenerateCovariance);
  std::vector<EnergyPoint> few(10, EnergyPoint{0.0, 0.0});
  CHECK_THROWS_AS((void)fit_outlier_envelope(few, 0.01), std::invalid_argument);
  std::vector<EnergyPoint> ok(30);
  util::Rng rng(2);
  for (auto& p : ok) p = {util::standard_normal(rng), util::standard_normal(rng)};
  CHECK_THROWS_AS((void)fit_outlier_envelope(ok, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)fit_outlier_envelope(ok, 0.5), std::invalid_argument);
}

TEST_CASE("flag rate stays within the binomial bound") {
  for (double c : {0.00035, 0.005, 0.02, 0.1}) {
    util::Rng rng(static_cast<std::uint64_t>(c * 1e6));
    std::vector<EnergyPoint> pts(5000);
    for (auto& p : pts) p = {3.0 * util::standard_normal(rng), 10.0 + util::standard_normal(rng)};
    const auto env = fit_outlier_envelope(pts, c);
    int flagged = 0;
    for (const auto& p : pts) flagged += env.is_outlier(p) ? 1 : 0;
    const double n = static_cast<double>(pts.size());
    const double bound = 2.0 * c + 3.0 * std::sqrt(c * (1 - c) / n);
    CHECK(flagged / n >= 0.0);
    CHECK(flagged / n <= bound);
  }
}

TEST_CASE("parameters file round trip") {
  Parameters p;
  p.scharber = default_scharber_config();
  p.scharber.gap_mode = GapMode::Interface;
  std::vector<EnergyPoint> pts;
  util::Rng rng(4);
  for (int i = 0; i < 100; ++i) pts.push_back({util::standard_normal(rng), util::standard_normal(rng) * 2});
  p.envelope = fit_outlier_envelope(pts, 0.05);
  const auto path = (std::filesystem::temp_directory_path() / "tartarus_params_test.json").string();
  save_parameters(path, p);
  const auto q = load_parameters(path);
  std::filesystem::remove(path);
  CHECK(q.scharber.a == p.scharber.a);
  CHECK(q.scharber.b == p.scharber.b);
  CHECK(q.scharber.p_in == p.scharber.p_in);
  CHECK(q.scharber.gap_mode == GapMode::Interface);
  REQUIRE(q.envelope);
  CHECK(q.envelope->threshold == p.envelope->threshold);
  CHECK(q.envelope->precision == p.envelope->precision);
  CHECK_THROWS_AS((void)parameters_from_json("{\"version\": 2}"), ParametersFormatError);
  CHECK_THROWS_AS((void)parameters_from_json("not json"), ParametersFormatError);
}
