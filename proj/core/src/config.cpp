// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coaxres/errors.hpp"

namespace coaxres {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
  throw ValidationError("config: key '" + path + "' " + why);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) bad_key(path, "must be an object");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& prefix) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ValidationError("config: unknown key '" + prefix + item.key() + "'");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_key(path, "must be a number");
  return j.get<double>();
}

double get_positive(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0) || !std::isfinite(v)) bad_key(path, "must be > 0");
  return v;
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad_key(path, "must be an integer");
  return j.get<int>();
}

TransmissionLineSpec parse_line(const json& j, const std::string& prefix) {
  require_object(j, prefix);
  reject_unknown(j, {"impedance_ohm", "length_m", "cap_per_length_f_per_m",
                     "internal_q"},
                 prefix + ".");
  TransmissionLineSpec line;
  if (!j.contains("impedance_ohm") || !j.contains("length_m") ||
      !j.contains("cap_per_length_f_per_m")) {
    bad_key(prefix,
            "requires impedance_ohm, length_m and cap_per_length_f_per_m");
  }
  line.impedance_ohm = get_positive(j["impedance_ohm"], prefix + ".impedance_ohm");
  line.length_m = get_number(j["length_m"], prefix + ".length_m");
  if (line.length_m < 0.0) bad_key(prefix + ".length_m", "must be >= 0");
  line.cap_per_length_f_per_m = get_positive(
      j["cap_per_length_f_per_m"], prefix + ".cap_per_length_f_per_m");
  if (j.contains("internal_q") && !j["internal_q"].is_null()) {
    line.internal_q = get_positive(j["internal_q"], prefix + ".internal_q");
  }
  return line;
}

json line_to_json(const TransmissionLineSpec& line) {
  json j;
  j["impedance_ohm"] = line.impedance_ohm;
  j["length_m"] = line.length_m;
  j["cap_per_length_f_per_m"] = line.cap_per_length_f_per_m;
  if (line.lossless()) {
    j["internal_q"] = nullptr;
  } else {
    j["internal_q"] = line.internal_q;
  }
  return j;
}

Complex parse_z_out(const json& j, const std::string& path) {
  if (j.is_number()) return Complex{j.get<double>(), 0.0};
  require_object(j, path);
  reject_unknown(j, {"re", "im"}, path + ".");
  if (!j.contains("re") || !j.contains("im")) {
    bad_key(path, "requires 're' and 'im' (or a plain number)");
  }
  return Complex{get_number(j["re"], path + ".re"),
                 get_number(j["im"], path + ".im")};
}

ResonatorTopology parse_topology(const json& j) {
  require_object(j, "topology");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    bad_key("topology.kind", "must be one of \"bare\", \"splice\", \"chip\"");
  }
  const std::string kind = j["kind"].get<std::string>();

  auto common = [&](auto& topo) {
    if (!j.contains("launch")) bad_key("topology.launch", "is required");
    topo.launch = parse_line(j["launch"], "topology.launch");
    if (!j.contains("c_in_f")) bad_key("topology.c_in_f", "is required");
    topo.c_in_f = get_positive(j["c_in_f"], "topology.c_in_f");
    if (j.contains("z_out_ohm")) {
      topo.z_out_ohm = parse_z_out(j["z_out_ohm"], "topology.z_out_ohm");
    }
  };

  if (kind == "bare") {
    reject_unknown(j, {"kind", "launch", "c_in_f", "z_out_ohm", "resonator"},
                   "topology.");
    BareCableTopology topo;
    common(topo);
    if (!j.contains("resonator")) bad_key("topology.resonator", "is required");
    topo.resonator = parse_line(j["resonator"], "topology.resonator");
    return topo;
  }
  if (kind == "splice") {
    reject_unknown(j,
                   {"kind", "launch", "c_in_f", "z_out_ohm", "half_a", "half_b",
                    "join", "r_cont_ohm"},
                   "topology.");
    SplicedCableTopology topo;
    common(topo);
    for (const char* key : {"half_a", "half_b", "join", "r_cont_ohm"}) {
      if (!j.contains(key)) bad_key(std::string("topology.") + key, "is required");
    }
    topo.half_a = parse_line(j["half_a"], "topology.half_a");
    topo.half_b = parse_line(j["half_b"], "topology.half_b");
    topo.join = parse_line(j["join"], "topology.join");
    topo.r_cont_ohm = get_number(j["r_cont_ohm"], "topology.r_cont_ohm");
    if (topo.r_cont_ohm < 0.0) bad_key("topology.r_cont_ohm", "must be >= 0");
    return topo;
  }
  if (kind == "chip") {
    reject_unknown(j,
                   {"kind", "launch", "c_in_f", "z_out_ohm", "cpw", "cable",
                    "r_cont_ohm", "r_shunt_ohm"},
                   "topology.");
    ChipCableTopology topo;
    common(topo);
    for (const char* key : {"cpw", "cable", "r_cont_ohm", "r_shunt_ohm"}) {
      if (!j.contains(key)) bad_key(std::string("topology.") + key, "is required");
    }
    topo.cpw = parse_line(j["cpw"], "topology.cpw");
    topo.cable = parse_line(j["cable"], "topology.cable");
    topo.r_cont_ohm = get_number(j["r_cont_ohm"], "topology.r_cont_ohm");
    if (topo.r_cont_ohm < 0.0) bad_key("topology.r_cont_ohm", "must be >= 0");
    if (j["r_shunt_ohm"].is_null()) {
      topo.r_shunt_ohm = std::numeric_limits<double>::infinity();
    } else {
      topo.r_shunt_ohm = get_positive(j["r_shunt_ohm"], "topology.r_shunt_ohm");
    }
    return topo;
  }
  bad_key("topology.kind", "must be one of \"bare\", \"splice\", \"chip\"");
}

json topology_to_json(const ResonatorTopology& t) {
  json j;
  j["kind"] = topology_kind_name(t);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        j["launch"] = line_to_json(v.launch);
        j["c_in_f"] = v.c_in_f;
        j["z_out_ohm"] = {{"re", v.z_out_ohm.real()}, {"im", v.z_out_ohm.imag()}};
        if constexpr (std::is_same_v<T, BareCableTopology>) {
          j["resonator"] = line_to_json(v.resonator);
        } else if constexpr (std::is_same_v<T, SplicedCableTopology>) {
          j["half_a"] = line_to_json(v.half_a);
          j["half_b"] = line_to_json(v.half_b);
          j["join"] = line_to_json(v.join);
          j["r_cont_ohm"] = v.r_cont_ohm;
        } else {
          j["cpw"] = line_to_json(v.cpw);
          j["cable"] = line_to_json(v.cable);
          j["r_cont_ohm"] = v.r_cont_ohm;
          if (std::isinf(v.r_shunt_ohm)) {
            j["r_shunt_ohm"] = nullptr;
          } else {
            j["r_shunt_ohm"] = v.r_shunt_ohm;
          }
        }
      },
      t);
  return j;
}

Config from_json(const json& doc) {
  require_object(doc, "(document root)");
  reject_unknown(doc,
                 {"schema_version", "port", "topology", "sweep", "fit", "noise",
                  "power", "calibration", "fsr"},
                 "");
  if (!doc.contains("schema_version")) {
    throw ValidationError("config: missing required key 'schema_version'");
  }

  Config cfg;
  cfg.schema_version = get_int(doc["schema_version"], "schema_version");
  if (cfg.schema_version != 1) {
    bad_key("schema_version", "must be 1");
  }

  if (doc.contains("port")) {
    const json& j = doc["port"];
    require_object(j, "port");
    reject_unknown(j, {"reference_impedance_ohm"}, "port.");
    if (j.contains("reference_impedance_ohm")) {
      cfg.port.reference_impedance_ohm =
          get_positive(j["reference_impedance_ohm"], "port.reference_impedance_ohm");
    }
  }

  if (doc.contains("topology") && !doc["topology"].is_null()) {
    cfg.topology = parse_topology(doc["topology"]);
  }

  if (doc.contains("sweep")) {
    const json& j = doc["sweep"];
    require_object(j, "sweep");
    reject_unknown(j, {"f_min_hz", "f_max_hz", "points"}, "sweep.");
    if (j.contains("f_min_hz")) cfg.sweep.f_min_hz = get_positive(j["f_min_hz"], "sweep.f_min_hz");
    if (j.contains("f_max_hz")) cfg.sweep.f_max_hz = get_positive(j["f_max_hz"], "sweep.f_max_hz");
    if (j.contains("points")) cfg.sweep.points = get_int(j["points"], "sweep.points");
  }

  if (doc.contains("fit")) {
    const json& j = doc["fit"];
    require_object(j, "fit");
    reject_unknown(j,
                   {"max_iterations", "relative_cost_tol", "window_linewidths",
                    "min_window_points", "min_dip_db", "min_separation_hz",
                    "target_f0_hz"},
                   "fit.");
    if (j.contains("max_iterations")) cfg.fit.max_iterations = get_int(j["max_iterations"], "fit.max_iterations");
    if (j.contains("relative_cost_tol")) cfg.fit.relative_cost_tol = get_positive(j["relative_cost_tol"], "fit.relative_cost_tol");
    if (j.contains("window_linewidths")) cfg.fit.window_linewidths = get_positive(j["window_linewidths"], "fit.window_linewidths");
    if (j.contains("min_window_points")) cfg.fit.min_window_points = get_int(j["min_window_points"], "fit.min_window_points");
    if (j.contains("min_dip_db")) cfg.fit.min_dip_db = get_positive(j["min_dip_db"], "fit.min_dip_db");
    if (j.contains("min_separation_hz")) cfg.fit.min_separation_hz = get_positive(j["min_separation_hz"], "fit.min_separation_hz");
    if (j.contains("target_f0_hz") && !j["target_f0_hz"].is_null()) {
      cfg.fit.target_f0_hz = get_positive(j["target_f0_hz"], "fit.target_f0_hz");
    }
  }

  if (doc.contains("noise")) {
    const json& j = doc["noise"];
    require_object(j, "noise");
    reject_unknown(j, {"kind", "sigma", "seed"}, "noise.");
    if (j.contains("kind")) {
      const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
      if (kind == "none") {
        cfg.noise.kind = NoiseKind::none;
      } else if (kind == "additive-complex-gaussian") {
        cfg.noise.kind = NoiseKind::additive_complex_gaussian;
      } else {
        bad_key("noise.kind", "must be \"none\" or \"additive-complex-gaussian\"");
      }
    }
    if (j.contains("sigma")) {
      cfg.noise.sigma = get_number(j["sigma"], "noise.sigma");
      if (cfg.noise.sigma < 0.0) bad_key("noise.sigma", "must be >= 0");
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
        bad_key("noise.seed", "must be an integer");
      }
      cfg.noise.seed = j["seed"].get<std::uint64_t>();
    }
  }

  if (doc.contains("power")) {
    const json& j = doc["power"];
    require_object(j, "power");
    reject_unknown(j, {"chain_attenuation_db", "generator_powers_w"}, "power.");
    if (j.contains("chain_attenuation_db")) {
      cfg.power.chain_attenuation_db = get_number(j["chain_attenuation_db"], "power.chain_attenuation_db");
    }
    if (j.contains("generator_powers_w")) {
      if (!j["generator_powers_w"].is_array()) {
        bad_key("power.generator_powers_w", "must be an array of numbers");
      }
      cfg.power.generator_powers_w.clear();
      for (const auto& v : j["generator_powers_w"]) {
        cfg.power.generator_powers_w.push_back(get_positive(v, "power.generator_powers_w[]"));
      }
    }
  }

  if (doc.contains("calibration")) {
    const json& j = doc["calibration"];
    require_object(j, "calibration");
    reject_unknown(j,
                   {"fixed_cable_q", "f_lo_hz", "f_hi_hz", "r_cont_min_ohm",
                    "r_cont_max_ohm", "r_shunt_min_ohm", "r_shunt_max_ohm",
                    "rel_tol"},
                   "calibration.");
    auto& c = cfg.calibration;
    if (j.contains("fixed_cable_q")) c.fixed_cable_q = get_positive(j["fixed_cable_q"], "calibration.fixed_cable_q");
    if (j.contains("f_lo_hz")) c.f_lo_hz = get_positive(j["f_lo_hz"], "calibration.f_lo_hz");
    if (j.contains("f_hi_hz")) c.f_hi_hz = get_positive(j["f_hi_hz"], "calibration.f_hi_hz");
    if (j.contains("r_cont_min_ohm")) c.r_cont_min_ohm = get_positive(j["r_cont_min_ohm"], "calibration.r_cont_min_ohm");
    if (j.contains("r_cont_max_ohm")) c.r_cont_max_ohm = get_positive(j["r_cont_max_ohm"], "calibration.r_cont_max_ohm");
    if (j.contains("r_shunt_min_ohm")) c.r_shunt_min_ohm = get_positive(j["r_shunt_min_ohm"], "calibration.r_shunt_min_ohm");
    if (j.contains("r_shunt_max_ohm")) c.r_shunt_max_ohm = get_positive(j["r_shunt_max_ohm"], "calibration.r_shunt_max_ohm");
    if (j.contains("rel_tol")) c.rel_tol = get_positive(j["rel_tol"], "calibration.rel_tol");
  }

  if (doc.contains("fsr")) {
    const json& j = doc["fsr"];
    require_object(j, "fsr");
    reject_unknown(j, {"reference_hz"}, "fsr.");
    if (j.contains("reference_hz")) {
      cfg.fsr_reference_hz = get_positive(j["reference_hz"], "fsr.reference_hz");
    }
  }

  validate(cfg);
  return cfg;
}

json to_json(const Config& cfg) {
  json doc;
  doc["schema_version"] = cfg.schema_version;
  doc["port"] = {{"reference_impedance_ohm", cfg.port.reference_impedance_ohm}};
  if (cfg.topology) doc["topology"] = topology_to_json(*cfg.topology);
  doc["sweep"] = {{"f_min_hz", cfg.sweep.f_min_hz},
                  {"f_max_hz", cfg.sweep.f_max_hz},
                  {"points", cfg.sweep.points}};
  doc["fit"] = {{"max_iterations", cfg.fit.max_iterations},
                {"relative_cost_tol", cfg.fit.relative_cost_tol},
                {"window_linewidths", cfg.fit.window_linewidths},
                {"min_window_points", cfg.fit.min_window_points},
                {"min_dip_db", cfg.fit.min_dip_db},
                {"min_separation_hz", cfg.fit.min_separation_hz}};
  if (cfg.fit.target_f0_hz) doc["fit"]["target_f0_hz"] = *cfg.fit.target_f0_hz;
  doc["noise"] = {{"kind", cfg.noise.kind == NoiseKind::none
                               ? "none"
                               : "additive-complex-gaussian"},
                  {"sigma", cfg.noise.sigma},
                  {"seed", cfg.noise.seed}};
  doc["power"] = {{"chain_attenuation_db", cfg.power.chain_attenuation_db},
                  {"generator_powers_w", cfg.power.generator_powers_w}};
  doc["calibration"] = {{"fixed_cable_q", cfg.calibration.fixed_cable_q},
                        {"f_lo_hz", cfg.calibration.f_lo_hz},
                        {"f_hi_hz", cfg.calibration.f_hi_hz},
                        {"r_cont_min_ohm", cfg.calibration.r_cont_min_ohm},
                        {"r_cont_max_ohm", cfg.calibration.r_cont_max_ohm},
                        {"r_shunt_min_ohm", cfg.calibration.r_shunt_min_ohm},
                        {"r_shunt_max_ohm", cfg.calibration.r_shunt_max_ohm},
                        {"rel_tol", cfg.calibration.rel_tol}};
  doc["fsr"] = {{"reference_hz", cfg.fsr_reference_hz}};
  return doc;
}

void apply_override_to(json& doc, const ConfigOverride& kv) {
  if (kv.first.empty()) throw ValidationError("override key must not be empty");
  std::vector<std::string> parts;
  std::istringstream is(kv.first);
  std::string part;
  while (std::getline(is, part, '.')) {
    if (part.empty()) {
      throw ValidationError("override key '" + kv.first + "' has an empty segment");
    }
    parts.push_back(part);
  }
  json* cursor = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!cursor->contains(parts[i]) || !(*cursor)[parts[i]].is_object()) {
      (*cursor)[parts[i]] = json::object();
    }
    cursor = &(*cursor)[parts[i]];
  }
  json value = json::parse(kv.second, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = kv.second;  // plain string
  (*cursor)[parts.back()] = value;
}

}  // namespace

SurveyOptions Config::survey_options() const {
  SurveyOptions opts;
  opts.min_dip_db = fit.min_dip_db;
  opts.min_separation_hz = fit.min_separation_hz;
  opts.window_linewidths = fit.window_linewidths;
  opts.min_window_points = fit.min_window_points;
  opts.fit = fit_options();
  return opts;
}

FitOptions Config::fit_options() const {
  FitOptions opts;
  opts.max_iterations = fit.max_iterations;
  opts.relative_cost_tol = fit.relative_cost_tol;
  return opts;
}

CalibrationOptions Config::calibration_options() const {
  CalibrationOptions opts;
  opts.f_lo_hz = calibration.f_lo_hz;
  opts.f_hi_hz = calibration.f_hi_hz;
  opts.r_cont_min_ohm = calibration.r_cont_min_ohm;
  opts.r_cont_max_ohm = calibration.r_cont_max_ohm;
  opts.r_shunt_min_ohm = calibration.r_shunt_min_ohm;
  opts.r_shunt_max_ohm = calibration.r_shunt_max_ohm;
  opts.rel_tol = calibration.rel_tol;
  opts.survey = survey_options();
  return opts;
}

void validate(const Config& cfg) {
  if (cfg.schema_version != 1) {
    throw ValidationError("config: schema_version must be 1");
  }
  validate(cfg.port);
  if (cfg.topology) validate(*cfg.topology);
  if (!(cfg.sweep.f_min_hz < cfg.sweep.f_max_hz)) {
    throw ValidationError("config: sweep.f_min_hz must be < sweep.f_max_hz");
  }
  if (cfg.sweep.points < 2) {
    throw ValidationError("config: sweep.points must be >= 2");
  }
  if (cfg.fit.max_iterations < 1) {
    throw ValidationError("config: fit.max_iterations must be >= 1");
  }
  if (cfg.fit.min_window_points < 9) {
    throw ValidationError("config: fit.min_window_points must be >= 9");
  }
  validate(cfg.noise);
  for (double p : cfg.power.generator_powers_w) {
    if (!(p > 0.0)) throw ValidationError("config: generator powers must be > 0");
  }
  const auto& c = cfg.calibration;
  if (!(c.f_lo_hz < c.f_hi_hz)) {
    throw ValidationError("config: calibration.f_lo_hz must be < f_hi_hz");
  }
  if (!(c.r_cont_min_ohm < c.r_cont_max_ohm) ||
      !(c.r_shunt_min_ohm < c.r_shunt_max_ohm)) {
    throw ValidationError("config: calibration search bounds must be ordered");
  }
}

Config parse_config_text(const std::string& json_text,
                         const std::vector<ConfigOverride>& overrides) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw IoError("config: not a valid JSON document");
  }
  for (const auto& kv : overrides) apply_override_to(doc, kv);
  return from_json(doc);
}

Config load_config(const std::string& path,
                   const std::vector<ConfigOverride>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config_text(buffer.str(), overrides);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Config apply_overrides(const Config& config,
                       const std::vector<ConfigOverride>& overrides) {
  json doc = to_json(config);
  for (const auto& kv : overrides) apply_override_to(doc, kv);
  return from_json(doc);
}

std::string config_to_text(const Config& config) {
  return to_json(config).dump(2) + "\n";
}

TransmissionLineSpec default_cable_line() {
  // 50 ohm aluminum coax, 83 pF/m (eps_R ~ 1.55), Q_i 1.55e6.
  return {50.0, 1.0, 83.0e-12, 1.55e6};
}

TransmissionLineSpec default_launch_line() {
  TransmissionLineSpec launch = default_cable_line();
  launch.length_m = 0.1;
  launch.internal_q = std::numeric_limits<double>::infinity();
  return launch;
}

BareCableTopology default_bare_topology() {
  BareCableTopology topo;
  topo.launch = default_launch_line();
  topo.c_in_f = 3.602e-15;
  topo.resonator = default_cable_line();
  return topo;
}

SplicedCableTopology default_splice_topology() {
  SplicedCableTopology topo;
  topo.launch = default_launch_line();
  topo.c_in_f = 3.602e-15;

  // Two half cables around an 8 mm, 45 ohm join. The cable capacitance per
  // length is set so the assembly free spectral range lands on 120.75 MHz.
  const double join_length = 8e-3;
  const double total_length = 1.0 + join_length;
  const double fsr_target = 1.2075e8;
  const double sqrt_eps =
      constants::speed_of_light_m_per_s / (2.0 * fsr_target * total_length);

  TransmissionLineSpec half;
  half.impedance_ohm = 50.0;
  half.length_m = 0.5;
  half.cap_per_length_f_per_m =
      sqrt_eps / (constants::speed_of_light_m_per_s * half.impedance_ohm);
  half.internal_q = 1.55e6;

  TransmissionLineSpec join;
  join.impedance_ohm = 45.0;
  join.length_m = join_length;
  join.cap_per_length_f_per_m =
      sqrt_eps / (constants::speed_of_light_m_per_s * join.impedance_ohm);

  topo.half_a = half;
  topo.half_b = half;
  topo.join = join;
  topo.r_cont_ohm = 6e-4;
  return topo;
}

ChipCableTopology default_chip_topology(bool halfwave) {
  ChipCableTopology topo;
  topo.launch = default_launch_line();
  topo.c_in_f = 3.602e-15;
  topo.cable = default_cable_line();

  // Coplanar waveguide on silicon: 50 ohm, effective eps_R 6.45, lossless.
  // Lengths put the attach interface at a voltage maximum (half-wave case)
  // or a current maximum (quarter-wave case) at 5 GHz.
  const double sqrt_eps = std::sqrt(6.45);
  const double guided_wavelength =
      constants::speed_of_light_m_per_s / (5e9 * sqrt_eps);
  TransmissionLineSpec cpw;
  cpw.impedance_ohm = 50.0;
  cpw.length_m = halfwave ? guided_wavelength : 0.25 * guided_wavelength;
  cpw.cap_per_length_f_per_m =
      sqrt_eps / (constants::speed_of_light_m_per_s * cpw.impedance_ohm);
  topo.cpw = cpw;

  topo.r_cont_ohm = 8.5e-4;
  topo.r_shunt_ohm = 1.3e7;
  return topo;
}

Config default_config(const std::string& topology_kind) {
  Config cfg;
  if (topology_kind == "bare") {
    cfg.topology = default_bare_topology();
  } else if (topology_kind == "splice") {
    cfg.topology = default_splice_topology();
  } else if (topology_kind == "chip-halfwave") {
    cfg.topology = default_chip_topology(true);
  } else if (topology_kind == "chip-quarterwave") {
    cfg.topology = default_chip_topology(false);
  } else if (topology_kind != "none") {
    throw ValidationError("unknown default config kind '" + topology_kind + "'");
  }
  return cfg;
}

}  // namespace coaxres
