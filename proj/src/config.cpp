#include "socnav/config.hpp"

#include <fstream>

#include <json.hpp>

namespace socnav {

void RunConfig::validate() const {
  person_defaults.validate("person defaults");
  adaptation.validate();
  velocity.validate();
  approach.validate();
  eval.validate();
  std::string errors;
  auto bad = [&](const char* msg) {
    if (!errors.empty()) errors += "; ";
    errors += msg;
  };
  if (!(grid_resolution > 0.0)) bad("grid_resolution must be > 0");
  if (!(astar_cost_weight >= 0.0)) bad("astar_cost_weight must be >= 0");
  if (!(sim_dt > 0.0)) bad("sim_dt must be > 0");
  if (!(sim_replan_period >= sim_dt)) bad("sim_replan_period must be >= sim_dt");
  if (!(group_model.amplitude >= 0.0 && group_model.amplitude <= 254.0))
    bad("group amplitude must lie in [0, 254]");
  if (!(group_model.sigma_ratio > 0.0)) bad("group sigma_ratio must be > 0");
  if (!(group_model.sigma_floor > 0.0)) bad("group sigma_floor must be > 0");
  if (!errors.empty()) throw ValidationError("run config: " + errors);
}

SimParams RunConfig::sim_params() const {
  SimParams params;
  params.group_model = group_model;
  params.adaptation = adaptation;
  params.velocity = velocity;
  params.approach = approach;
  params.costmap = costmap;
  params.eval = eval;
  params.astar_cost_weight = astar_cost_weight;
  return params;
}

namespace {

void read_double(const nlohmann::json& obj, const char* key, double& out) {
  if (obj.contains(key)) out = obj.at(key).get<double>();
}

void read_int(const nlohmann::json& obj, const char* key, int& out) {
  if (obj.contains(key)) out = obj.at(key).get<int>();
}

}  // namespace

RunConfig run_config_defaults() { return RunConfig{}; }

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed config " + path + ": " + e.what());
  }

  RunConfig cfg;
  if (doc.contains("social")) {
    const auto& s = doc["social"];
    read_double(s, "amplitude", cfg.person_defaults.amplitude);
    read_double(s, "sigma_f", cfg.person_defaults.sigma_f);
    read_double(s, "sigma_r", cfg.person_defaults.sigma_r);
    read_double(s, "sigma_sl", cfg.person_defaults.sigma_sl);
    read_double(s, "sigma_sr", cfg.person_defaults.sigma_sr);
    read_double(s, "group_amplitude", cfg.group_model.amplitude);
    read_double(s, "group_sigma_ratio", cfg.group_model.sigma_ratio);
    read_double(s, "group_sigma_floor", cfg.group_model.sigma_floor);
  }
  if (doc.contains("adaptation")) {
    const auto& a = doc["adaptation"];
    read_double(a, "zeta", cfg.adaptation.zeta);
    read_double(a, "s_h", cfg.adaptation.s_h);
    read_double(a, "s_r", cfg.adaptation.s_r);
    read_double(a, "intimate_radius", cfg.adaptation.intimate_radius);
    read_double(a, "half_human_width", cfg.adaptation.half_human_width);
    read_double(a, "orientation_diff_min", cfg.adaptation.orientation_diff_min);
    read_double(a, "orientation_diff_max", cfg.adaptation.orientation_diff_max);
  }
  if (doc.contains("velocity")) {
    const auto& v = doc["velocity"];
    read_double(v, "a_adapt", cfg.velocity.a_adapt);
    read_double(v, "a_limit", cfg.velocity.a_limit);
    read_double(v, "d_limit", cfg.velocity.d_limit);
  }
  if (doc.contains("approach")) {
    const auto& a = doc["approach"];
    read_double(a, "free_threshold", cfg.approach.free_threshold);
    read_double(a, "initial_radius_person", cfg.approach.initial_radius_person);
    read_double(a, "step", cfg.approach.step);
    read_double(a, "d_a_limit", cfg.approach.d_a_limit);
    read_double(a, "a_a_adapt", cfg.approach.a_a_adapt);
    read_double(a, "a_a_limit", cfg.approach.a_a_limit);
    read_double(a, "v_mod", cfg.approach.v_mod);
    read_double(a, "f_ifov", cfg.approach.f_ifov);
    read_double(a, "f_mod", cfg.approach.f_mod);
    read_double(a, "max_radius", cfg.approach.max_radius);
    read_double(a, "track_threshold", cfg.approach.track_threshold);
    read_int(a, "min_samples", cfg.approach.min_samples);
  }
  if (doc.contains("costmap")) {
    const auto& c = doc["costmap"];
    read_double(c, "clearing_radius", cfg.costmap.clearing_radius);
    read_double(c, "inscribed_radius", cfg.costmap.inscribed_radius);
    read_double(c, "decay_rate", cfg.costmap.decay_rate);
    read_double(c, "resolution", cfg.grid_resolution);
    read_double(c, "astar_cost_weight", cfg.astar_cost_weight);
  }
  if (doc.contains("eval")) {
    const auto& e = doc["eval"];
    read_double(e, "comfort_threshold", cfg.eval.comfort_threshold);
    read_double(e, "sii_sigma", cfg.eval.sii_sigma);
    read_double(e, "transient_grace", cfg.eval.transient_grace);
  }
  if (doc.contains("sim")) {
    const auto& s = doc["sim"];
    read_double(s, "dt", cfg.sim_dt);
    read_double(s, "replan_period", cfg.sim_replan_period);
  }
  cfg.validate();
  return cfg;
}

}  // namespace socnav
