// SPDX-License-Identifier: Apache-2.0
#include "ldma/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ldma {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::correlation_sweep:
      return "correlation_sweep";
    case ScenarioKind::linear_bound:
      return "linear_bound";
    case ScenarioKind::linear_multipath:
      return "linear_multipath";
    case ScenarioKind::uniform_cell:
      return "uniform_cell";
  }
  return "unknown";
}

std::string to_string(PrecoderMethod method) {
  switch (method) {
    case PrecoderMethod::zf:
      return "zf";
    case PrecoderMethod::wmmse:
      return "wmmse";
    case PrecoderMethod::fully_digital_zf:
      return "fully_digital_zf";
    case PrecoderMethod::sdma_dft_zf:
      return "sdma_dft_zf";
    case PrecoderMethod::sdma_dft_wmmse:
      return "sdma_dft_wmmse";
  }
  return "unknown";
}

ArrayConfig ArraySpec::make() const { return make(num_antennas); }

ArrayConfig ArraySpec::make(int n) const {
  if (element_spacing == 0.0) {
    return ArrayConfig::half_wavelength(n, carrier_frequency, propagation_speed);
  }
  return ArrayConfig(n, element_spacing, carrier_frequency, propagation_speed);
}

SystemConfig ScenarioConfig::system_at(double snr_db) const {
  SystemConfig sys = SystemConfig::from_snr_db(num_users, snr_db, total_power);
  if (power_allocation) {
    sys.power_allocation = Eigen::Map<const RVector>(power_allocation->data(),
                                                     static_cast<Eigen::Index>(power_allocation->size()));
    sys.validate();
  }
  return sys;
}

namespace {

template <typename T>
T from_string(const std::string& name, const std::string& field,
              std::initializer_list<std::pair<const char*, T>> options) {
  for (const auto& [label, value] : options) {
    if (name == label) {
      return value;
    }
  }
  throw ConfigError(field + ": unknown value '" + name + "'");
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

std::pair<double, double> read_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(where + ": expected [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void check_angle(double a, const std::string& where) {
  if (!(std::abs(a) < 0.5 * kPi)) {
    throw ConfigError(where + ": angles must lie strictly inside (-pi/2, pi/2)");
  }
}

void parse_into(const json& doc, ScenarioConfig& cfg) {
  check_keys(doc, "config",
             {"id", "scenario_kind", "array", "sys", "kappa", "L", "user_region", "scatter_region",
              "snr_grid", "num_trials", "seed", "precoder", "codebook", "pilot_noise_variance",
              "wmmse", "correlation", "linear_bound"});
  if (!doc.contains("scenario_kind")) {
    throw ConfigError("config: missing scenario_kind");
  }
  cfg.scenario_kind = from_string<ScenarioKind>(
      doc.at("scenario_kind").get<std::string>(), "scenario_kind",
      {{"correlation_sweep", ScenarioKind::correlation_sweep},
       {"linear_bound", ScenarioKind::linear_bound},
       {"linear_multipath", ScenarioKind::linear_multipath},
       {"uniform_cell", ScenarioKind::uniform_cell}});
  cfg.id = doc.value("id", to_string(cfg.scenario_kind));

  if (doc.contains("array")) {
    const json& a = doc["array"];
    check_keys(a, "array",
               {"num_antennas", "element_spacing", "carrier_frequency", "propagation_speed"});
    cfg.array.num_antennas = a.value("num_antennas", cfg.array.num_antennas);
    cfg.array.element_spacing = a.value("element_spacing", cfg.array.element_spacing);
    cfg.array.carrier_frequency = a.value("carrier_frequency", cfg.array.carrier_frequency);
    cfg.array.propagation_speed = a.value("propagation_speed", cfg.array.propagation_speed);
  }
  if (doc.contains("sys")) {
    const json& s = doc["sys"];
    check_keys(s, "sys", {"num_users", "num_rf_chains", "total_power", "power_allocation"});
    cfg.num_users = s.value("num_users", cfg.num_users);
    if (s.value("num_rf_chains", cfg.num_users) != cfg.num_users) {
      throw ConfigError("sys: num_rf_chains must equal num_users");
    }
    cfg.total_power = s.value("total_power", cfg.total_power);
    if (s.contains("power_allocation")) {
      cfg.power_allocation = s["power_allocation"].get<std::vector<double>>();
    }
  }
  if (doc.contains("kappa")) {
    cfg.kappa = doc["kappa"].get<double>();
  }
  cfg.num_nlos = doc.value("L", cfg.num_nlos);
  if (doc.contains("user_region")) {
    const json& u = doc["user_region"];
    check_keys(u, "user_region", {"angle_range", "distance_range", "distance_sampling"});
    if (u.contains("angle_range")) {
      std::tie(cfg.user_region.min_angle, cfg.user_region.max_angle) =
          read_range(u["angle_range"], "user_region.angle_range");
    }
    if (u.contains("distance_range")) {
      std::tie(cfg.user_region.min_distance, cfg.user_region.max_distance) =
          read_range(u["distance_range"], "user_region.distance_range");
    }
    if (u.contains("distance_sampling")) {
      cfg.user_region.distance_sampling = from_string<DistanceSampling>(
          u["distance_sampling"].get<std::string>(), "user_region.distance_sampling",
          {{"uniform", DistanceSampling::uniform}, {"inverse", DistanceSampling::inverse}});
    }
  }
  if (doc.contains("scatter_region")) {
    const json& s = doc["scatter_region"];
    check_keys(s, "scatter_region", {"angle_range", "distance_range"});
    if (s.contains("angle_range")) {
      std::tie(cfg.scatter_region.min_angle, cfg.scatter_region.max_angle) =
          read_range(s["angle_range"], "scatter_region.angle_range");
    }
    if (s.contains("distance_range")) {
      std::tie(cfg.scatter_region.min_distance, cfg.scatter_region.max_distance) =
          read_range(s["distance_range"], "scatter_region.distance_range");
    }
  }
  if (doc.contains("snr_grid")) {
    cfg.snr_grid = doc["snr_grid"].get<std::vector<double>>();
  }
  cfg.num_trials = doc.value("num_trials", cfg.num_trials);
  cfg.seed = doc.value("seed", cfg.seed);
  if (doc.contains("precoder")) {
    const json& p = doc["precoder"];
    std::vector<std::string> names;
    if (p.is_string()) {
      names.push_back(p.get<std::string>());
    } else {
      names = p.get<std::vector<std::string>>();
    }
    cfg.precoders.clear();
    for (const auto& name : names) {
      cfg.precoders.push_back(from_string<PrecoderMethod>(
          name, "precoder",
          {{"zf", PrecoderMethod::zf},
           {"wmmse", PrecoderMethod::wmmse},
           {"fully_digital_zf", PrecoderMethod::fully_digital_zf},
           {"sdma_dft_zf", PrecoderMethod::sdma_dft_zf},
           {"sdma_dft_wmmse", PrecoderMethod::sdma_dft_wmmse}}));
    }
  }
  if (doc.contains("codebook")) {
    const json& c = doc["codebook"];
    check_keys(c, "codebook", {"kind", "coherence_target", "r_min"});
    cfg.codebook.kind = c.value("kind", cfg.codebook.kind);
    cfg.codebook.coherence_target = c.value("coherence_target", cfg.codebook.coherence_target);
    if (c.contains("r_min")) {
      cfg.codebook.min_distance = c["r_min"].get<double>();
    }
  }
  cfg.pilot_noise_variance = doc.value("pilot_noise_variance", cfg.pilot_noise_variance);
  if (doc.contains("wmmse")) {
    const json& w = doc["wmmse"];
    check_keys(w, "wmmse", {"max_iters", "tol"});
    cfg.wmmse.max_iters = w.value("max_iters", cfg.wmmse.max_iters);
    cfg.wmmse.tol = w.value("tol", cfg.wmmse.tol);
  }
  if (doc.contains("correlation")) {
    const json& c = doc["correlation"];
    check_keys(c, "correlation", {"antenna_grid", "location_a", "location_b"});
    if (c.contains("antenna_grid")) {
      cfg.correlation.antenna_grid = c["antenna_grid"].get<std::vector<int>>();
    }
    for (const char* key : {"location_a", "location_b"}) {
      if (!c.contains(key)) {
        continue;
      }
      const json& l = c[key];
      check_keys(l, std::string("correlation.") + key, {"distance", "angle"});
      const bool a = std::string(key) == "location_a";
      double& dist = a ? cfg.correlation.distance_a : cfg.correlation.distance_b;
      double& ang = a ? cfg.correlation.angle_a : cfg.correlation.angle_b;
      dist = l.value("distance", dist);
      ang = l.value("angle", ang);
    }
  }
  if (doc.contains("linear_bound")) {
    const json& l = doc["linear_bound"];
    check_keys(l, "linear_bound",
               {"k_max", "exhaustive_grid", "exhaustive_max_users", "placement_grid_points",
                "placement_passes"});
    auto& lb = cfg.linear_bound;
    lb.k_max = l.value("k_max", lb.k_max);
    lb.exhaustive_grid = l.value("exhaustive_grid", lb.exhaustive_grid);
    lb.exhaustive_max_users = l.value("exhaustive_max_users", lb.exhaustive_max_users);
    lb.placement_grid_points = l.value("placement_grid_points", lb.placement_grid_points);
    lb.placement_passes = l.value("placement_passes", lb.placement_passes);
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  (void)array.make();
  if (num_trials < 1) fail("num_trials must be >= 1");
  if (snr_grid.empty()) fail("snr_grid must be non-empty");
  for (double s : snr_grid) {
    if (!std::isfinite(s)) fail("snr_grid entries must be finite");
  }
  if (num_users < 1) fail("sys.num_users must be >= 1");
  if (!(total_power > 0.0)) fail("sys.total_power must be positive");
  if (power_allocation) {
    (void)system_at(0.0);
  }
  if (num_nlos < 0) fail("L must be >= 0");
  if (kappa && !(*kappa >= 0.0)) fail("kappa must be >= 0");
  if (!(pilot_noise_variance >= 0.0)) fail("pilot_noise_variance must be >= 0");
  if (wmmse.max_iters < 1 || !(wmmse.tol > 0.0)) fail("wmmse: need max_iters >= 1, tol > 0");

  const UserRegion& u = user_region;
  check_angle(u.min_angle, "user_region");
  check_angle(u.max_angle, "user_region");
  if (u.min_angle > u.max_angle) fail("user_region.angle_range must be ordered");
  if (!(u.min_distance > 0.0) || !(u.max_distance >= u.min_distance)) {
    fail("user_region.distance_range must satisfy 0 < lo <= hi");
  }
  scatter_region.validate();

  if (codebook.kind != "dft" && codebook.kind != "polar") fail("codebook.kind must be dft or polar");
  if (codebook.kind == "polar" &&
      !(codebook.coherence_target > 0.0 && codebook.coherence_target < 1.0)) {
    fail("codebook.coherence_target must lie in (0, 1)");
  }
  if (codebook.min_distance && !(*codebook.min_distance > 0.0)) fail("codebook.r_min must be > 0");

  switch (scenario_kind) {
    case ScenarioKind::correlation_sweep: {
      if (correlation.antenna_grid.empty()) fail("correlation.antenna_grid must be non-empty");
      for (int n : correlation.antenna_grid) {
        if (n < 1) fail("correlation.antenna_grid entries must be >= 1");
      }
      (void)Location(correlation.distance_a, correlation.angle_a);
      (void)Location(correlation.distance_b, correlation.angle_b);
      break;
    }
    case ScenarioKind::linear_bound: {
      const auto& lb = linear_bound;
      if (lb.k_max < 1) fail("linear_bound.k_max must be >= 1");
      if (lb.exhaustive_grid < 2) fail("linear_bound.exhaustive_grid must be >= 2");
      if (lb.exhaustive_max_users < 0) fail("linear_bound.exhaustive_max_users must be >= 0");
      if (lb.placement_grid_points < 2) fail("linear_bound.placement_grid_points must be >= 2");
      if (lb.placement_passes < 0) fail("linear_bound.placement_passes must be >= 0");
      if (!(u.max_distance > u.min_distance)) fail("user_region.distance_range must be non-empty");
      if (snr_grid.size() != 1) fail("linear_bound: snr_grid must hold exactly one value");
      break;
    }
    case ScenarioKind::linear_multipath:
    case ScenarioKind::uniform_cell: {
      if (!kappa) fail("kappa is required for multipath scenarios");
      if (num_nlos == 0 && *kappa == 0.0) fail("L = 0 with kappa = 0 carries no power");
      if (precoders.empty()) fail("precoder list must be non-empty");
      break;
    }
  }
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  ScenarioConfig cfg;
  try {
    const json doc = json::parse(json_text);
    parse_into(doc, cfg);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["id"] = cfg.id;
  doc["scenario_kind"] = to_string(cfg.scenario_kind);
  doc["array"] = {{"num_antennas", cfg.array.num_antennas},
                  {"element_spacing", cfg.array.make().element_spacing()},
                  {"carrier_frequency", cfg.array.carrier_frequency},
                  {"propagation_speed", cfg.array.propagation_speed}};
  doc["sys"] = {{"num_users", cfg.num_users},
                {"num_rf_chains", cfg.num_users},
                {"total_power", cfg.total_power}};
  if (cfg.power_allocation) {
    doc["sys"]["power_allocation"] = *cfg.power_allocation;
  }
  if (cfg.kappa) {
    doc["kappa"] = *cfg.kappa;
  }
  doc["L"] = cfg.num_nlos;
  doc["user_region"] = {
      {"angle_range", {cfg.user_region.min_angle, cfg.user_region.max_angle}},
      {"distance_range", {cfg.user_region.min_distance, cfg.user_region.max_distance}},
      {"distance_sampling",
       cfg.user_region.distance_sampling == DistanceSampling::uniform ? "uniform" : "inverse"}};
  doc["scatter_region"] = {
      {"angle_range", {cfg.scatter_region.min_angle, cfg.scatter_region.max_angle}},
      {"distance_range", {cfg.scatter_region.min_distance, cfg.scatter_region.max_distance}}};
  doc["snr_grid"] = cfg.snr_grid;
  doc["num_trials"] = cfg.num_trials;
  doc["seed"] = cfg.seed;
  auto precoders = nlohmann::ordered_json::array();
  for (auto p : cfg.precoders) {
    precoders.push_back(to_string(p));
  }
  doc["precoder"] = precoders;
  doc["codebook"] = {{"kind", cfg.codebook.kind},
                     {"coherence_target", cfg.codebook.coherence_target},
                     {"r_min", cfg.codebook.min_distance.value_or(cfg.user_region.min_distance)}};
  doc["pilot_noise_variance"] = cfg.pilot_noise_variance;
  doc["wmmse"] = {{"max_iters", cfg.wmmse.max_iters}, {"tol", cfg.wmmse.tol}};
  if (cfg.scenario_kind == ScenarioKind::correlation_sweep) {
    doc["correlation"] = {
        {"antenna_grid", cfg.correlation.antenna_grid},
        {"location_a", {{"distance", cfg.correlation.distance_a}, {"angle", cfg.correlation.angle_a}}},
        {"location_b", {{"distance", cfg.correlation.distance_b}, {"angle", cfg.correlation.angle_b}}}};
  }
  if (cfg.scenario_kind == ScenarioKind::linear_bound) {
    const auto& lb = cfg.linear_bound;
    doc["linear_bound"] = {{"k_max", lb.k_max},
                           {"exhaustive_grid", lb.exhaustive_grid},
                           {"exhaustive_max_users", lb.exhaustive_max_users},
                           {"placement_grid_points", lb.placement_grid_points},
                           {"placement_passes", lb.placement_passes}};
  }
  return doc.dump(2);
}

}  // namespace ldma
