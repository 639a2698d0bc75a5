#pragma once

#include <string>

#include "socnav/sim.hpp"

namespace socnav {

/// Whole-run configuration, loadable from one JSON file. Every field carries
/// the experiment defaults; absent keys keep them.
struct RunConfig {
  GaussianParams person_defaults;
  GroupModel group_model;
  AdaptationConfig adaptation;
  VelocityAdaptConfig velocity;
  ApproachConfig approach;
  CostmapParams costmap;
  EvalConfig eval;
  double grid_resolution = 0.05;
  double astar_cost_weight = 0.02;
  double sim_dt = 0.1;
  double sim_replan_period = 0.5;

  void validate() const;
  SimParams sim_params() const;
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_defaults();

}  // namespace socnav
