// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string_view>
#include <vector>

namespace tartarus::obj {

class SpectrumMalformed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-column table: wavelength (nm, strictly increasing) and spectral
/// irradiance (W m^-2 nm^-1).
struct Spectrum {
  std::vector<double> wavelength_nm;
  std::vector<double> irradiance;
};

/// Parses whitespace separated columns; '#' starts a comment line. Requires
/// coverage of at least 280-4000 nm.
[[nodiscard]] Spectrum parse_spectrum(std::string_view text);
/// The reference AM1.5G table shipped with the library.
[[nodiscard]] const Spectrum& reference_spectrum();

constexpr double kPlanck = 6.62607015e-34;
constexpr double kLightSpeed = 2.99792458e8;
constexpr double kElementaryCharge = 1.602176634e-19;

/// Photon energy in eV for a wavelength in nm.
[[nodiscard]] double photon_energy_ev(double wavelength_nm);

/// Incident power in mW/cm^2: trapezoidal integral of the whole table.
[[nodiscard]] double incident_power(const Spectrum& s);

/// Short-circuit current density in mA/cm^2 for absorption of every photon
/// with energy >= gap_ev: q * eqe * trapezoidal photon flux integral over the
/// tabulated wavelengths at or below the band edge.
[[nodiscard]] double integrated_jsc(const Spectrum& s, double gap_ev, double eqe);

struct JscFit {
  double a = 0.0;  // mA/cm^2
  double b = 0.0;  // eV^2
  // Largest |fit - integral| / integral over the fit grid.
  double max_relative_error = 0.0;

  [[nodiscard]] double operator()(double gap_ev) const;
};

struct FitGrid {
  double lo_ev = 1.0;
  double hi_ev = 4.0;
  int points = 301;
};

/// Least-squares fit of J = A exp(-E^2 / B) to integrated_jsc over the grid
/// (Levenberg-Marquardt seeded by a log-linear fit). Throws FitDiverged for
/// eqe <= 0 or a non-converging fit.
[[nodiscard]] JscFit fit_jsc_surrogate(const Spectrum& s, double eqe, const FitGrid& grid = {});

struct FrontierEnergies {
  double homo_ev = 0.0;
  double lumo_ev = 0.0;
  double gap_ev = 0.0;
  double dipole_debye = 0.0;
};

[[nodiscard]] FrontierEnergies make_frontier(double homo_ev, double lumo_ev, double dipole_debye = 0.0);

enum class PceMode { DonorPcbm, AcceptorPcdtbt };

/// Band gap fed to the current surrogate: the absorber's own HOMO-LUMO gap,
/// or the donor HOMO to acceptor LUMO gap across the interface.
enum class GapMode { Absorber, Interface };

struct ScharberConfig {
  double a = 0.0;
  double b = 0.0;
  double p_in = 0.0;  // mW/cm^2
  double fill_factor = 0.65;
  double eqe = 0.65;
  double overpotential_ev = 0.3;
  double acceptor_lumo_ev = -4.3;
  double donor_homo_ev = -5.5;
  double calib_homo_slope = 0.8051;
  double calib_homo_intercept = 2.5377;
  double calib_lumo_slope = 0.8788;
  double calib_lumo_intercept = 3.7913;
  GapMode gap_mode = GapMode::Absorber;

  void validate() const;
};

/// Config with A, B and P_in derived from `s`.
[[nodiscard]] ScharberConfig make_scharber_config(const Spectrum& s);
/// Derived once from the reference spectrum and cached.
[[nodiscard]] const ScharberConfig& default_scharber_config();

/// Affine maps from the semiempirical to the calibrated scale; gap recomputed.
[[nodiscard]] FrontierEnergies calibrate(const FrontierEnergies& e, const ScharberConfig& cfg);

/// Open-circuit voltage (V) with both clamp rules applied.
[[nodiscard]] double open_circuit_voltage(const FrontierEnergies& calibrated, PceMode mode, const ScharberConfig& cfg);
/// Gap (eV) passed to the current surrogate under cfg.gap_mode.
[[nodiscard]] double surrogate_gap(const FrontierEnergies& calibrated, PceMode mode, const ScharberConfig& cfg);
[[nodiscard]] double short_circuit_current(double gap_ev, const ScharberConfig& cfg);
/// 100 * V_OC * FF * J_SC / P_in, in percent.
[[nodiscard]] double pce_from(double voc, double jsc, const ScharberConfig& cfg);
[[nodiscard]] double scharber_pce(const FrontierEnergies& calibrated, PceMode mode, const ScharberConfig& cfg);

}  // namespace tartarus::obj
