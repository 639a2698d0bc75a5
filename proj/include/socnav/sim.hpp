#pragma once

#include <optional>
#include <string>
#include <vector>

#include "socnav/approach.hpp"
#include "socnav/costmap.hpp"
#include "socnav/eval.hpp"

namespace socnav {

struct RobotLimits {
  double v_max = 0.6;   // m/s
  double w_max = 1.8;   // rad/s
  double a_max = 1.2;   // m/s^2
};

struct RobotState {
  Pose2D pose;
  double v = 0.0;
  double w = 0.0;
  RobotLimits limits;
};

struct AgentScript {
  std::string person_id;
  Vec2 velocity;              // constant walking velocity
  double stop_distance = 0.0; // halts permanently below this robot distance
};

struct SimConfigFlags {
  bool space_base = true;       // individual shrink + group lateral shrink
  bool space_velocity = false;  // velocity-driven frontal growth
  bool approach_velocity = false;  // step/limit growth and fov narrowing
};

struct Scenario {
  GridSpec map_spec;                 // used when map files are absent
  std::string map_pgm;               // optional static map image
  std::string map_meta;
  SceneState initial_scene;
  std::vector<AgentScript> scripts;
  std::vector<Vec2> obstacles;
  Pose2D robot_start;
  RobotLimits robot_limits;
  TargetRef target;
  SimConfigFlags flags;
  double duration = 40.0;
  double dt = 0.1;
  double replan_period = 0.5;
  double goal_tolerance = 0.03;
  std::string name = "scenario";

  void validate() const;
};

struct SimStepRecord {
  double t = 0.0;
  Pose2D robot;
  double v = 0.0;
  double w = 0.0;
  SceneState scene;  // adapted scene active this tick
  std::optional<ApproachPose> approach;
  HsciSample hsci;
  std::vector<std::string> events;
};

struct SimTrace {
  std::string scenario_name;
  std::string config_name;
  std::vector<SimStepRecord> steps;
  bool goal_reached = false;
  double time_to_goal = -1.0;
  double final_target_distance = -1.0;
};

struct SimParams {
  GroupModel group_model;
  AdaptationConfig adaptation;
  VelocityAdaptConfig velocity;
  ApproachConfig approach;
  CostmapParams costmap;
  EvalConfig eval;
  double astar_cost_weight = 0.02;  // lambda, meters per cost unit per cell
};

/// Scripted persons advance by v dt along their velocity; a person whose
/// robot distance drops below the stop threshold halts for good.
SceneState step_agents(const Scenario& scenario, const SceneState& scene,
                       std::vector<bool>& halted, const Pose2D& robot_pose, double dt);

/// 8-connected A* over the costmap. Edge weight is
/// step_length * (1 + lambda * cost(destination)); lethal, inscribed and
/// unknown cells are impassable. Returns cell-center waypoints from start to
/// goal, or nothing when unreachable.
std::optional<std::vector<Vec2>> plan_path(const Costmap& map, const Vec2& start,
                                           const Vec2& goal, double lambda);

/// Reference Dijkstra over the same edge weights; returns the optimal path
/// cost to the goal.
std::optional<double> dijkstra_path_cost(const Costmap& map, const Vec2& start, const Vec2& goal,
                                         double lambda);

/// Cost of a waypoint chain under the A* edge weights.
double path_cost(const Costmap& map, const std::vector<Vec2>& path, double lambda);

struct DriveCommand {
  double v = 0.0;
  double w = 0.0;
};

/// Pure-pursuit style tracker: heads for a lookahead point on the path,
/// angular error first, velocities clamped to the limits.
DriveCommand follow_path(const RobotState& robot, const std::vector<Vec2>& path,
                         double goal_tolerance, double lookahead = 0.3);

/// Exact kinematic integration of a differential-drive style command.
RobotState integrate_robot(const RobotState& robot, const DriveCommand& cmd, double dt);

SimTrace run_scenario(const Scenario& scenario, const SimParams& params,
                      const std::string& config_name);

/// NDJSON trace writer (one record per line) with stable number formatting.
void write_trace_ndjson(const SimTrace& trace, const std::string& path);

/// Per-step index trace: t,sii,sgi,sdi.
void write_hsci_csv(const SimTrace& trace, const std::string& path);

/// Breach-interval evaluation of a finished run.
TraceEvalSummary evaluate_sim_trace(const SimTrace& trace, const EvalConfig& cfg);
void write_eval_summary_json(const TraceEvalSummary& summary, const std::string& path);

struct SummaryRow {
  std::string scenario;
  std::string config;
  bool success = false;
  double time_to_goal = -1.0;
  double final_distance = -1.0;
  double max_sii = 0.0;
  double max_sgi = 0.0;
};

SummaryRow summarize_trace(const SimTrace& trace, const EvalConfig& cfg);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

}  // namespace socnav
