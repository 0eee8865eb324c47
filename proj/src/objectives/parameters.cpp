// SPDX-License-Identifier: Apache-2.0
#include "tartarus/objectives/parameters.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tartarus::obj {

using nlohmann::json;

std::string parameters_to_json(const Parameters& p) {
  const auto& s = p.scharber;
  json j;
  j["version"] = kParametersVersion;
  j["scharber"] = {
      {"a", s.a},
      {"b", s.b},
      {"p_in", s.p_in},
      {"fill_factor", s.fill_factor},
      {"eqe", s.eqe},
      {"overpotential_ev", s.overpotential_ev},
      {"acceptor_lumo_ev", s.acceptor_lumo_ev},
      {"donor_homo_ev", s.donor_homo_ev},
      {"calib_homo", {s.calib_homo_slope, s.calib_homo_intercept}},
      {"calib_lumo", {s.calib_lumo_slope, s.calib_lumo_intercept}},
      {"gap_mode", s.gap_mode == GapMode::Absorber ? "absorber" : "interface"},
  };
  if (p.envelope) {
    const auto& e = *p.envelope;
    j["envelope"] = {
        {"center", e.center},
        {"covariance", e.covariance},
        {"threshold", e.threshold},
        {"contamination", e.contamination},
    };
  }
  return j.dump(2) + "\n";
}

Parameters parameters_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("version").get<int>() != kParametersVersion) {
      throw ParametersFormatError("unsupported parameters version " + j.at("version").dump());
    }
    Parameters p;
    const auto& s = j.at("scharber");
    auto& c = p.scharber;
    c.a = s.at("a").get<double>();
    c.b = s.at("b").get<double>();
    c.p_in = s.at("p_in").get<double>();
    c.fill_factor = s.at("fill_factor").get<double>();
    c.eqe = s.at("eqe").get<double>();
    c.overpotential_ev = s.at("overpotential_ev").get<double>();
    c.acceptor_lumo_ev = s.at("acceptor_lumo_ev").get<double>();
    c.donor_homo_ev = s.at("donor_homo_ev").get<double>();
    c.calib_homo_slope = s.at("calib_homo").at(0).get<double>();
    c.calib_homo_intercept = s.at("calib_homo").at(1).get<double>();
    c.calib_lumo_slope = s.at("calib_lumo").at(0).get<double>();
    c.calib_lumo_intercept = s.at("calib_lumo").at(1).get<double>();
    const auto mode = s.at("gap_mode").get<std::string>();
    if (mode != "absorber" && mode != "interface") throw ParametersFormatError("unknown gap_mode '" + mode + "'");
    c.gap_mode = mode == "absorber" ? GapMode::Absorber : GapMode::Interface;
    c.validate();
    if (j.contains("envelope")) {
      const auto& e = j.at("envelope");
      p.envelope = make_envelope(e.at("center").get<EnergyPoint>(), e.at("covariance").get<std::array<double, 4>>(),
                                 e.at("threshold").get<double>(), e.at("contamination").get<double>());
    }
    return p;
  } catch (const json::exception& e) {
    throw ParametersFormatError(std::string("malformed parameters: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParametersFormatError(std::string("invalid parameters: ") + e.what());
  }
}

void save_parameters(const std::string& path, const Parameters& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << parameters_to_json(p);
}

Parameters load_parameters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parameters_from_json(ss.str());
}

}  // namespace tartarus::obj
