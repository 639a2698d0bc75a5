#include "socnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include <json.hpp>

namespace socnav {

void Scenario::validate() const {
  if (!(dt > 0.0)) throw ValidationError("scenario: dt must be > 0");
  if (!(duration > 0.0)) throw ValidationError("scenario: duration must be > 0");
  if (!(replan_period >= dt)) throw ValidationError("scenario: replan_period must be >= dt");
  for (const auto& s : scripts)
    if (!initial_scene.find_person(s.person_id))
      throw ValidationError("scenario: script references unknown person " + s.person_id);
  initial_scene.validate();
}

SceneState step_agents(const Scenario& scenario, const SceneState& scene,
                       std::vector<bool>& halted, const Pose2D& robot_pose, double dt) {
  SceneState out = scene;
  halted.resize(scenario.scripts.size(), false);
  for (std::size_t k = 0; k < scenario.scripts.size(); ++k) {
    const AgentScript& script = scenario.scripts[k];
    PersonState* p = out.find_person(script.person_id);
    if (!p) continue;
    if (!halted[k] &&
        distance(p->pose.position(), robot_pose.position()) < script.stop_distance)
      halted[k] = true;
    if (halted[k]) {
      p->velocity = {0.0, 0.0};
      continue;
    }
    p->velocity = script.velocity;
    p->pose.x += script.velocity.x * dt;
    p->pose.y += script.velocity.y * dt;
  }
  return out;
}

namespace {

bool traversable(std::uint8_t cost) { return cost < kCostInscribed; }

struct AStarNode {
  double f = 0.0;
  double g = 0.0;
  int cell = 0;
};

struct AStarNodeOrder {
  bool operator()(const AStarNode& a, const AStarNode& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g > b.g;
    return a.cell > b.cell;
  }
};

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace

std::optional<std::vector<Vec2>> plan_path(const Costmap& map, const Vec2& start,
                                           const Vec2& goal, double lambda) {
  const GridSpec& spec = map.spec();
  const auto start_cell = spec.world_to_cell(start);
  const auto goal_cell = spec.world_to_cell(goal);
  if (!start_cell || !goal_cell) return std::nullopt;
  if (!traversable(map.at(goal_cell->i, goal_cell->j))) return std::nullopt;

  const int w = spec.width;
  const int h = spec.height;
  const int start_id = start_cell->j * w + start_cell->i;
  const int goal_id = goal_cell->j * w + goal_cell->i;
  const double res = spec.resolution;
  const double diag = res * std::sqrt(2.0);

  std::vector<double> g(static_cast<std::size_t>(w) * h,
                        std::numeric_limits<double>::infinity());
  std::vector<int> parent(static_cast<std::size_t>(w) * h, -1);
  std::priority_queue<AStarNode, std::vector<AStarNode>, AStarNodeOrder> open;

  auto heuristic = [&](int cell) {
    const int ci = cell % w;
    const int cj = cell / w;
    const double dx = (ci - goal_cell->i) * res;
    const double dy = (cj - goal_cell->j) * res;
    return std::hypot(dx, dy);
  };

  g[start_id] = 0.0;
  open.push({heuristic(start_id), 0.0, start_id});

  while (!open.empty()) {
    const AStarNode node = open.top();
    open.pop();
    if (node.g > g[node.cell]) continue;
    if (node.cell == goal_id) break;

    const int ci = node.cell % w;
    const int cj = node.cell / w;
    for (int k = 0; k < 8; ++k) {
      const int ni = ci + kDx[k];
      const int nj = cj + kDy[k];
      if (!spec.in_bounds(ni, nj)) continue;
      const std::uint8_t cost = map.at(ni, nj);
      if (!traversable(cost)) continue;
      const double step = k < 4 ? res : diag;
      const double candidate = node.g + step * (1.0 + lambda * cost);
      const int nid = nj * w + ni;
      if (candidate < g[nid] - 1e-15) {
        g[nid] = candidate;
        parent[nid] = node.cell;
        open.push({candidate + heuristic(nid), candidate, nid});
      }
    }
  }

  if (!std::isfinite(g[goal_id])) return std::nullopt;

  std::vector<Vec2> path;
  for (int cell = goal_id; cell != -1; cell = parent[cell])
    path.push_back(spec.cell_center(cell % w, cell / w));
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<double> dijkstra_path_cost(const Costmap& map, const Vec2& start, const Vec2& goal,
                                         double lambda) {
  const GridSpec& spec = map.spec();
  const auto start_cell = spec.world_to_cell(start);
  const auto goal_cell = spec.world_to_cell(goal);
  if (!start_cell || !goal_cell) return std::nullopt;
  if (!traversable(map.at(goal_cell->i, goal_cell->j))) return std::nullopt;

  const int w = spec.width;
  const int h = spec.height;
  const int start_id = start_cell->j * w + start_cell->i;
  const int goal_id = goal_cell->j * w + goal_cell->i;
  const double res = spec.resolution;
  const double diag = res * std::sqrt(2.0);

  std::vector<double> g(static_cast<std::size_t>(w) * h,
                        std::numeric_limits<double>::infinity());
  std::priority_queue<AStarNode, std::vector<AStarNode>, AStarNodeOrder> open;
  g[start_id] = 0.0;
  open.push({0.0, 0.0, start_id});
  while (!open.empty()) {
    const AStarNode node = open.top();
    open.pop();
    if (node.g > g[node.cell]) continue;
    const int ci = node.cell % w;
    const int cj = node.cell / w;
    for (int k = 0; k < 8; ++k) {
      const int ni = ci + kDx[k];
      const int nj = cj + kDy[k];
      if (!spec.in_bounds(ni, nj)) continue;
      const std::uint8_t cost = map.at(ni, nj);
      if (!traversable(cost)) continue;
      const double step = k < 4 ? res : diag;
      const double candidate = node.g + step * (1.0 + lambda * cost);
      const int nid = nj * w + ni;
      if (candidate < g[nid] - 1e-15) {
        g[nid] = candidate;
        open.push({candidate, candidate, nid});
      }
    }
  }
  if (!std::isfinite(g[goal_id])) return std::nullopt;
  return g[goal_id];
}

double path_cost(const Costmap& map, const std::vector<Vec2>& path, double lambda) {
  double total = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double step = distance(path[k - 1], path[k]);
    total += step * (1.0 + lambda * map.cost_at(path[k]));
  }
  return total;
}

DriveCommand follow_path(const RobotState& robot, const std::vector<Vec2>& path,
                         double goal_tolerance, double lookahead) {
  DriveCommand cmd;
  if (path.empty()) return cmd;

  const Vec2 pos = robot.pose.position();
  if (distance(pos, path.back()) <= goal_tolerance) return cmd;

  // Lookahead target: first path point at least `lookahead` away, walking the
  // chain from the nearest point forward.
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double d = distance(pos, path[k]);
    if (d < best) {
      best = d;
      nearest = k;
    }
  }
  Vec2 target = path.back();
  for (std::size_t k = nearest; k < path.size(); ++k) {
    if (distance(pos, path[k]) >= lookahead) {
      target = path[k];
      break;
    }
  }

  const double heading_error = wrap_angle((target - pos).angle() - robot.pose.theta);
  cmd.w = std::clamp(2.0 * heading_error, -robot.limits.w_max, robot.limits.w_max);
  const double slow = std::max(0.0, 1.0 - std::abs(heading_error) / (kPi / 2.0));
  cmd.v = robot.limits.v_max * slow;
  return cmd;
}

RobotState integrate_robot(const RobotState& robot, const DriveCommand& cmd, double dt) {
  RobotState out = robot;
  const double dv = std::clamp(cmd.v - robot.v, -robot.limits.a_max * dt, robot.limits.a_max * dt);
  out.v = std::clamp(robot.v + dv, 0.0, robot.limits.v_max);
  out.w = std::clamp(cmd.w, -robot.limits.w_max, robot.limits.w_max);
  out.pose.x += out.v * std::cos(robot.pose.theta) * dt;
  out.pose.y += out.v * std::sin(robot.pose.theta) * dt;
  out.pose.theta = wrap_angle(robot.pose.theta + out.w * dt);
  return out;
}

namespace {

Pose2D target_pose_for_sdi(const SceneState& scene, const TargetRef& target) {
  if (target.kind == TargetRef::Kind::Person) {
    if (const PersonState* p = scene.find_person(target.id)) return p->pose;
  } else if (target.kind == TargetRef::Kind::Group) {
    if (const GroupState* g = scene.find_group(target.id)) return g->center_pose();
  }
  return Pose2D{};
}

std::optional<Vec2> target_center(const SceneState& scene, const TargetRef& target) {
  if (target.kind == TargetRef::Kind::Person) {
    if (const PersonState* p = scene.find_person(target.id)) return p->pose.position();
  } else if (target.kind == TargetRef::Kind::Group) {
    if (const GroupState* g = scene.find_group(target.id)) return g->center;
  }
  return std::nullopt;
}

}  // namespace

SimTrace run_scenario(const Scenario& scenario, const SimParams& params,
                      const std::string& config_name) {
  scenario.validate();

  SimTrace trace;
  trace.scenario_name = scenario.name;
  trace.config_name = config_name;

  Costmap static_map = scenario.map_pgm.empty()
                           ? make_empty_map(scenario.map_spec)
                           : rasterize_static(scenario.map_pgm, scenario.map_meta);

  SceneState scene = scenario.initial_scene;
  refresh_all_groups(scene, params.group_model);

  RobotState robot;
  robot.pose = scenario.robot_start;
  robot.limits = scenario.robot_limits;

  std::vector<bool> halted(scenario.scripts.size(), false);
  TargetRef target = scenario.target;
  std::optional<Vec2> last_center = target_center(scene, target);
  std::optional<ApproachPose> current_pose;
  std::vector<Vec2> path;

  const AdaptFlags adapt_flags{scenario.flags.space_base, scenario.flags.space_velocity};
  const int steps = static_cast<int>(std::llround(scenario.duration / scenario.dt));
  const int replan_every = std::max(1, static_cast<int>(std::llround(scenario.replan_period /
                                                                     scenario.dt)));

  for (int tick = 0; tick < steps; ++tick) {
    const double t = tick * scenario.dt;
    std::vector<std::string> events;

    scene = step_agents(scenario, scene, halted, robot.pose, scenario.dt);
    scene.timestamp = t;
    refresh_all_groups(scene, params.group_model);

    SceneState adapted = adapt_scene(scene, robot.pose, target, adapt_flags, params.adaptation,
                                     params.velocity);

    const Costmap map = compose(static_map, scenario.obstacles, adapted, params.costmap);

    if (last_center) {
      const TrackResult tracked = track_target(adapted, *last_center,
                                               params.approach.track_threshold);
      if (tracked.lost) {
        events.push_back("target-lost");
      } else {
        target = tracked.target;
        last_center = tracked.center;
      }
    }

    if (tick % replan_every == 0 && last_center) {
      std::optional<double> initial_hint;
      if (target.kind == TargetRef::Kind::Person) {
        if (const PersonState* p = scene.find_person(target.id)) {
          double sigma = p->params.sigma_f;
          if (scenario.flags.space_velocity) {
            const double d = distance(robot.pose.position(), p->pose.position());
            sigma = adapt_velocity(sigma, p->speed(), d, params.velocity);
          }
          initial_hint = sigma;
        }
      }
      const ApproachResult result = estimate_approach_pose(
          map, adapted, target, robot.pose, params.approach, params.adaptation.s_r,
          scenario.flags.approach_velocity, initial_hint);
      if (result.pose) {
        const bool changed = !current_pose ||
                             distance(current_pose->position, result.pose->position) > 1e-9;
        current_pose = result.pose;
        if (changed) events.push_back("pose-replanned");
      } else {
        events.push_back("no-valid-pose");
      }
      if (current_pose) {
        auto planned = plan_path(map, robot.pose.position(), current_pose->position,
                                 params.astar_cost_weight);
        if (planned) {
          path = std::move(*planned);
          path.push_back(current_pose->position);  // home onto the exact pose
        } else {
          path.clear();
          events.push_back("planning-failure");
        }
      }
    }

    if (current_pose) {
      const DriveCommand cmd = follow_path(robot, path, scenario.goal_tolerance);
      RobotState next = integrate_robot(robot, cmd, scenario.dt);
      // The robot refuses to enter lethal, inscribed or unknown cells.
      if (traversable(map.cost_at(next.pose.position())))
        robot = next;
      else
        robot.v = 0.0;
    }

    SimStepRecord record;
    record.t = t;
    record.robot = robot.pose;
    record.v = robot.v;
    record.w = robot.w;
    record.scene = adapted;
    record.approach = current_pose;
    record.hsci.timestamp = t;
    record.hsci.sii = compute_sii(robot.pose, adapted, params.eval);
    record.hsci.sgi = compute_sgi(robot.pose, adapted, params.eval);
    record.hsci.sdi = compute_sdi(robot.pose, target_pose_for_sdi(adapted, target));
    record.events = std::move(events);

    bool all_halted = true;
    for (std::size_t k = 0; k < scenario.scripts.size(); ++k)
      if (!halted[k]) all_halted = false;

    if (current_pose && all_halted &&
        distance(robot.pose.position(), current_pose->position) <=
            std::max(scenario.goal_tolerance, map.spec().resolution)) {
      record.events.push_back("goal-reached");
      trace.goal_reached = true;
      trace.time_to_goal = t;
    }

    trace.steps.push_back(std::move(record));
    if (trace.goal_reached) break;
  }

  if (!trace.steps.empty() && last_center) {
    const SceneState& final_scene = trace.steps.back().scene;
    if (auto center = target_center(final_scene, target))
      trace.final_target_distance =
          distance(trace.steps.back().robot.position(), *center);
  }
  return trace;
}

namespace {

nlohmann::json pose_json(const Pose2D& pose) {
  return {{"x", pose.x}, {"y", pose.y}, {"theta", pose.theta}};
}

}  // namespace

void write_trace_ndjson(const SimTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& step : trace.steps) {
    nlohmann::json rec;
    rec["t"] = step.t;
    rec["robot"] = pose_json(step.robot);
    rec["robot"]["v"] = step.v;
    rec["robot"]["w"] = step.w;
    rec["persons"] = nlohmann::json::array();
    for (const auto& p : step.scene.persons) {
      rec["persons"].push_back({{"id", p.id},
                                {"x", p.pose.x},
                                {"y", p.pose.y},
                                {"theta", p.pose.theta},
                                {"vx", p.velocity.x},
                                {"vy", p.velocity.y}});
    }
    if (step.approach) {
      rec["pose"] = {{"x", step.approach->position.x},
                     {"y", step.approach->position.y},
                     {"heading", step.approach->heading},
                     {"radius", step.approach->radius_used}};
    } else {
      rec["pose"] = nullptr;
    }
    rec["hsci"] = {{"sii", step.hsci.sii}, {"sgi", step.hsci.sgi}, {"sdi", step.hsci.sdi}};
    rec["events"] = step.events;
    out << rec.dump() << '\n';
  }
}

void write_hsci_csv(const SimTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "t,sii,sgi,sdi\n";
  char buffer[128];
  for (const auto& step : trace.steps) {
    std::snprintf(buffer, sizeof(buffer), "%.3f,%.9f,%.9f,%.9f\n", step.t, step.hsci.sii,
                  step.hsci.sgi, step.hsci.sdi);
    out << buffer;
  }
}

TraceEvalSummary evaluate_sim_trace(const SimTrace& trace, const EvalConfig& cfg) {
  std::vector<HsciTracePoint> points;
  std::vector<SceneState> scenes;
  points.reserve(trace.steps.size());
  scenes.reserve(trace.steps.size());
  for (const auto& step : trace.steps) {
    points.push_back({step.t, step.hsci, step.robot});
    scenes.push_back(step.scene);
  }
  return evaluate_trace(points, scenes, cfg);
}

void write_eval_summary_json(const TraceEvalSummary& summary, const std::string& path) {
  nlohmann::json doc;
  doc["max_sii"] = summary.max_sii;
  doc["final_sii"] = summary.final_sii;
  doc["max_sgi"] = summary.max_sgi;
  doc["final_sgi"] = summary.final_sgi;
  doc["final_sdi"] = summary.final_sdi;
  doc["breaches"] = nlohmann::json::array();
  for (const auto& b : summary.breaches) {
    doc["breaches"].push_back({{"index", b.index},
                               {"t_begin", b.t_begin},
                               {"t_end", b.t_end},
                               {"behind", b.behind},
                               {"transient", b.transient}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
}

SummaryRow summarize_trace(const SimTrace& trace, const EvalConfig& cfg) {
  (void)cfg;
  SummaryRow row;
  row.scenario = trace.scenario_name;
  row.config = trace.config_name;
  row.success = trace.goal_reached;
  row.time_to_goal = trace.time_to_goal;
  row.final_distance = trace.final_target_distance;
  for (const auto& step : trace.steps) {
    row.max_sii = std::max(row.max_sii, step.hsci.sii);
    row.max_sgi = std::max(row.max_sgi, step.hsci.sgi);
  }
  return row;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "scenario,config,success,time_to_goal,final_distance,max_sii,max_sgi\n";
  char buffer[256];
  for (const auto& r : rows) {
    std::snprintf(buffer, sizeof(buffer), "%s,%s,%d,%.3f,%.4f,%.6f,%.6f\n", r.scenario.c_str(),
                  r.config.c_str(), r.success ? 1 : 0, r.time_to_goal, r.final_distance,
                  r.max_sii, r.max_sgi);
    out << buffer;
  }
}

}  // namespace socnav
