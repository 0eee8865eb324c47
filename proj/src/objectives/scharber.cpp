// SPDX-License-Identifier: Apache-2.0
#include "tartarus/objectives/scharber.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "tartarus/data/embedded.hpp"

namespace tartarus::obj {

Spectrum parse_spectrum(std::string_view text) {
  Spectrum s;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double wl = 0.0;
    double irr = 0.0;
    if (!(row >> wl >> irr)) throw SpectrumMalformed("spectrum line " + std::to_string(line_no) + " is not two numbers");
    if (!std::isfinite(wl) || !std::isfinite(irr) || irr < 0.0 || wl <= 0.0) {
      throw SpectrumMalformed("spectrum line " + std::to_string(line_no) + " has an invalid value");
    }
    if (!s.wavelength_nm.empty() && wl <= s.wavelength_nm.back()) {
      throw SpectrumMalformed("spectrum wavelengths must increase (line " + std::to_string(line_no) + ")");
    }
    s.wavelength_nm.push_back(wl);
    s.irradiance.push_back(irr);
  }
  if (s.wavelength_nm.size() < 2) throw SpectrumMalformed("spectrum needs at least two rows");
  if (s.wavelength_nm.front() > 280.0 || s.wavelength_nm.back() < 4000.0) {
    throw SpectrumMalformed("spectrum must cover 280-4000 nm");
  }
  return s;
}

const Spectrum& reference_spectrum() {
  static const Spectrum kSpectrum = parse_spectrum(data::embedded_file("am15g.txt").value());
  return kSpectrum;
}

double photon_energy_ev(double wavelength_nm) {
  return kPlanck * kLightSpeed / (wavelength_nm * 1e-9) / kElementaryCharge;
}

double incident_power(const Spectrum& s) {
  double total = 0.0;
  for (std::size_t i = 1; i < s.wavelength_nm.size(); ++i) {
    total += 0.5 * (s.irradiance[i] + s.irradiance[i - 1]) * (s.wavelength_nm[i] - s.wavelength_nm[i - 1]);
  }
  // W/m^2 to mW/cm^2.
  return total * 0.1;
}

double integrated_jsc(const Spectrum& s, double gap_ev, double eqe) {
  // Photon flux per nm: irradiance / photon energy (J).
  auto flux = [&](std::size_t i) {
    return s.irradiance[i] / (photon_energy_ev(s.wavelength_nm[i]) * kElementaryCharge);
  };
  double total = 0.0;
  for (std::size_t i = 1; i < s.wavelength_nm.size(); ++i) {
    if (photon_energy_ev(s.wavelength_nm[i]) < gap_ev) break;
    total += 0.5 * (flux(i) + flux(i - 1)) * (s.wavelength_nm[i] - s.wavelength_nm[i - 1]);
  }
  // A/m^2 to mA/cm^2.
  return kElementaryCharge * eqe * total * 0.1;
}

double JscFit::operator()(double gap_ev) const { return a * std::exp(-gap_ev * gap_ev / b); }

JscFit fit_jsc_surrogate(const Spectrum& s, double eqe, const FitGrid& grid) {
  if (!(eqe > 0.0)) throw FitDiverged("quantum efficiency must be positive");
  if (grid.points < 3 || !(grid.hi_ev > grid.lo_ev)) throw FitDiverged("fit grid is empty");
  std::vector<double> e(static_cast<std::size_t>(grid.points));
  std::vector<double> j(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = grid.lo_ev + (grid.hi_ev - grid.lo_ev) * static_cast<double>(i) / static_cast<double>(grid.points - 1);
    j[i] = integrated_jsc(s, e[i], eqe);
    if (!(j[i] > 0.0)) throw FitDiverged("integrated current vanishes on the fit grid");
  }

  // Log-linear seed: ln J = ln A - E^2 / B.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double x = e[i] * e[i];
    const double y = std::log(j[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double a = std::exp((sy - slope * sx) / n);
  double b = slope < 0.0 ? -1.0 / slope : 1.0;

  auto sse = [&](double pa, double pb) {
    double t = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double r = pa * std::exp(-e[i] * e[i] / pb) - j[i];
      t += r * r;
    }
    return t;
  };

  double lambda = 1e-3;
  double cost = sse(a, b);
  bool converged = false;
  for (int iter = 0; iter < 500; ++iter) {
    double h00 = 0, h01 = 0, h11 = 0, g0 = 0, g1 = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double x = e[i] * e[i];
      const double g = std::exp(-x / b);
      const double r = a * g - j[i];
      const double da = g;
      const double db = a * g * x / (b * b);
      h00 += da * da;
      h01 += da * db;
      h11 += db * db;
      g0 += da * r;
      g1 += db * r;
    }
    bool stepped = false;
    for (int tries = 0; tries < 50 && !stepped; ++tries) {
      const double m00 = h00 * (1.0 + lambda);
      const double m11 = h11 * (1.0 + lambda);
      const double det = m00 * m11 - h01 * h01;
      if (det == 0.0 || !std::isfinite(det)) {
        lambda *= 10.0;
        continue;
      }
      const double step_a = -(m11 * g0 - h01 * g1) / det;
      const double step_b = -(m00 * g1 - h01 * g0) / det;
      const double na = a + step_a;
      const double nb = b + step_b;
      const double ncost = nb > 0.0 ? sse(na, nb) : INFINITY;
      if (ncost < cost) {
        const double rel = (cost - ncost) / std::max(cost, 1e-300);
        a = na;
        b = nb;
        cost = ncost;
        lambda = std::max(lambda / 10.0, 1e-12);
        stepped = true;
        if (rel < 1e-14) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped || converged) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) {
    throw FitDiverged("current surrogate fit did not converge");
  }
  JscFit fit{a, b, 0.0};
  for (std::size_t i = 0; i < e.size(); ++i) {
    fit.max_relative_error = std::max(fit.max_relative_error, std::abs(fit(e[i]) - j[i]) / j[i]);
  }
  return fit;
}

FrontierEnergies make_frontier(double homo_ev, double lumo_ev, double dipole_debye) {
  return {homo_ev, lumo_ev, lumo_ev - homo_ev, dipole_debye};
}

void ScharberConfig::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(p_in > 0.0)) throw std::invalid_argument("Scharber A, B and P_in must be positive");
  if (!(fill_factor > 0.0 && fill_factor <= 1.0)) throw std::invalid_argument("fill factor must lie in (0, 1]");
  if (!(eqe > 0.0 && eqe <= 1.0)) throw std::invalid_argument("quantum efficiency must lie in (0, 1]");
}

ScharberConfig make_scharber_config(const Spectrum& s) {
  ScharberConfig cfg;
  const auto fit = fit_jsc_surrogate(s, cfg.eqe);
  cfg.a = fit.a;
  cfg.b = fit.b;
  cfg.p_in = incident_power(s);
  cfg.validate();
  return cfg;
}

const ScharberConfig& default_scharber_config() {
  static const ScharberConfig kConfig = make_scharber_config(reference_spectrum());
  return kConfig;
}

FrontierEnergies calibrate(const FrontierEnergies& e, const ScharberConfig& cfg) {
  const double homo = e.homo_ev * cfg.calib_homo_slope + cfg.calib_homo_intercept;
  const double lumo = e.lumo_ev * cfg.calib_lumo_slope + cfg.calib_lumo_intercept;
  return make_frontier(homo, lumo, e.dipole_debye);
}

double open_circuit_voltage(const FrontierEnergies& e, PceMode mode, const ScharberConfig& cfg) {
  double voc = 0.0;
  if (mode == PceMode::DonorPcbm) {
    if (e.lumo_ev - cfg.acceptor_lumo_ev < cfg.overpotential_ev) return 0.0;
    voc = (cfg.acceptor_lumo_ev - e.homo_ev) - cfg.overpotential_ev;
  } else {
    voc = (e.lumo_ev - cfg.donor_homo_ev) - cfg.overpotential_ev;
  }
  return std::max(0.0, voc);
}

double surrogate_gap(const FrontierEnergies& e, PceMode mode, const ScharberConfig& cfg) {
  if (cfg.gap_mode == GapMode::Absorber) return e.lumo_ev - e.homo_ev;
  return mode == PceMode::DonorPcbm ? cfg.acceptor_lumo_ev - e.homo_ev : e.lumo_ev - cfg.donor_homo_ev;
}

double short_circuit_current(double gap_ev, const ScharberConfig& cfg) {
  return cfg.a * std::exp(-gap_ev * gap_ev / cfg.b);
}

double pce_from(double voc, double jsc, const ScharberConfig& cfg) {
  return 100.0 * voc * cfg.fill_factor * jsc / cfg.p_in;
}

double scharber_pce(const FrontierEnergies& e, PceMode mode, const ScharberConfig& cfg) {
  const double voc = open_circuit_voltage(e, mode, cfg);
  if (voc == 0.0) return 0.0;
  return pce_from(voc, short_circuit_current(surrogate_gap(e, mode, cfg), cfg), cfg);
}

}  // namespace tartarus::obj
