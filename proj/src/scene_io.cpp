#include "socnav/scene_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

namespace socnav {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
  return doc;
}

SceneState scene_from_json(const json& doc, const RunConfig& cfg) {
  SceneState scene;
  if (doc.contains("persons")) {
    for (const auto& p : doc["persons"]) {
      PersonState person;
      person.id = p.at("id").get<std::string>();
      person.pose = make_pose(p.at("x").get<double>(), p.at("y").get<double>(),
                              p.value("theta", 0.0));
      person.velocity = {p.value("vx", 0.0), p.value("vy", 0.0)};
      person.params = cfg.person_defaults;
      if (p.contains("params")) {
        const auto& overrides = p["params"];
        person.params.amplitude = overrides.value("amplitude", person.params.amplitude);
        person.params.sigma_f = overrides.value("sigma_f", person.params.sigma_f);
        person.params.sigma_r = overrides.value("sigma_r", person.params.sigma_r);
        person.params.sigma_sl = overrides.value("sigma_sl", person.params.sigma_sl);
        person.params.sigma_sr = overrides.value("sigma_sr", person.params.sigma_sr);
      }
      scene.persons.push_back(std::move(person));
    }
  }
  if (doc.contains("groups")) {
    for (const auto& g : doc["groups"]) {
      GroupState group;
      group.id = g.at("id").get<std::string>();
      for (const auto& m : g.at("members")) group.members.push_back(m.get<std::string>());
      scene.groups.push_back(std::move(group));
    }
  }
  refresh_all_groups(scene, cfg.group_model);
  scene.validate();
  return scene;
}

}  // namespace

SceneState load_scene_json(const std::string& path, const RunConfig& cfg) {
  return scene_from_json(read_json_file(path), cfg);
}

SceneState parse_scene(const std::string& json_text, const RunConfig& cfg) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed scene JSON: ") + e.what());
  }
  return scene_from_json(doc, cfg);
}

void write_scene_json(const SceneState& scene, const std::string& path) {
  json doc;
  doc["persons"] = json::array();
  for (const auto& p : scene.persons) {
    doc["persons"].push_back({{"id", p.id},
                              {"x", p.pose.x},
                              {"y", p.pose.y},
                              {"theta", p.pose.theta},
                              {"vx", p.velocity.x},
                              {"vy", p.velocity.y}});
  }
  doc["groups"] = json::array();
  for (const auto& g : scene.groups)
    doc["groups"].push_back({{"id", g.id}, {"members", g.members}});
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
}

Scenario load_scenario_json(const std::string& path, const RunConfig& cfg) {
  const json doc = read_json_file(path);
  Scenario scenario;
  scenario.name = doc.value("name", std::string("scenario"));

  // Relative file references resolve against the scenario's own directory.
  const auto resolve = [&](const std::string& ref) {
    const std::filesystem::path p(ref);
    if (p.is_absolute()) return ref;
    return (std::filesystem::path(path).parent_path() / p).string();
  };

  if (!doc.contains("map")) throw IoError("scenario " + path + ": missing map");
  const auto& map = doc["map"];
  if (map.contains("pgm")) {
    scenario.map_pgm = resolve(map.at("pgm").get<std::string>());
    scenario.map_meta = resolve(map.at("meta").get<std::string>());
  } else {
    scenario.map_spec.resolution = map.value("resolution", cfg.grid_resolution);
    scenario.map_spec.width =
        static_cast<int>(std::ceil(map.at("width_m").get<double>() / scenario.map_spec.resolution));
    scenario.map_spec.height = static_cast<int>(
        std::ceil(map.at("height_m").get<double>() / scenario.map_spec.resolution));
    if (map.contains("origin"))
      scenario.map_spec.origin = {map["origin"][0].get<double>(), map["origin"][1].get<double>()};
    scenario.map_spec.validate();
  }

  if (doc.contains("scene_file")) {
    scenario.initial_scene = load_scene_json(resolve(doc["scene_file"].get<std::string>()), cfg);
  } else if (doc.contains("scene")) {
    scenario.initial_scene = scene_from_json(doc["scene"], cfg);
  } else {
    throw IoError("scenario " + path + ": missing scene");
  }

  if (!doc.contains("robot")) throw IoError("scenario " + path + ": missing robot");
  const auto& robot = doc["robot"];
  scenario.robot_start =
      make_pose(robot.at("x").get<double>(), robot.at("y").get<double>(), robot.value("theta", 0.0));
  scenario.robot_limits.v_max = robot.value("v_max", scenario.robot_limits.v_max);
  scenario.robot_limits.w_max = robot.value("w_max", scenario.robot_limits.w_max);
  scenario.robot_limits.a_max = robot.value("a_max", scenario.robot_limits.a_max);

  if (!doc.contains("target")) throw IoError("scenario " + path + ": missing target");
  const std::string kind = doc["target"].at("type").get<std::string>();
  const std::string id = doc["target"].at("id").get<std::string>();
  if (kind == "person")
    scenario.target = TargetRef::person(id);
  else if (kind == "group")
    scenario.target = TargetRef::group(id);
  else
    throw IoError("scenario " + path + ": target type must be person or group");

  if (doc.contains("scripts")) {
    for (const auto& s : doc["scripts"]) {
      AgentScript script;
      script.person_id = s.at("person").get<std::string>();
      script.velocity = {s.value("vx", 0.0), s.value("vy", 0.0)};
      script.stop_distance = s.value("stop_distance", 0.0);
      scenario.scripts.push_back(std::move(script));
    }
  }
  if (doc.contains("obstacles")) {
    for (const auto& o : doc["obstacles"])
      scenario.obstacles.push_back({o[0].get<double>(), o[1].get<double>()});
  }
  if (doc.contains("config")) {
    const auto& flags = doc["config"];
    scenario.flags.space_base = flags.value("space_base", scenario.flags.space_base);
    scenario.flags.space_velocity = flags.value("space_velocity", scenario.flags.space_velocity);
    scenario.flags.approach_velocity =
        flags.value("approach_velocity", scenario.flags.approach_velocity);
  }
  scenario.duration = doc.value("duration", scenario.duration);
  scenario.dt = doc.value("dt", cfg.sim_dt);
  scenario.replan_period = doc.value("replan_period", cfg.sim_replan_period);
  scenario.goal_tolerance = doc.value("goal_tolerance", scenario.goal_tolerance);
  scenario.validate();
  return scenario;
}

std::vector<Situation> load_dataset_csv(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset: " + path);

  std::map<int, SceneState> scenes;
  std::map<int, std::map<std::string, std::vector<std::string>>> group_members;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 5)
      throw IoError(path + ": line " + std::to_string(line_no) + ": expected at least 5 fields");
    const int situation = std::stoi(fields[0]);
    PersonState person;
    person.id = fields[1];
    person.pose = make_pose(std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4]));
    person.params = cfg.person_defaults;
    scenes[situation].persons.push_back(std::move(person));
    if (fields.size() >= 6 && !fields[5].empty())
      group_members[situation][fields[5]].push_back(fields[1]);
  }

  std::vector<Situation> dataset;
  for (auto& [id, scene] : scenes) {
    for (const auto& [gid, members] : group_members[id]) {
      GroupState group;
      group.id = gid;
      group.members = members;
      scene.groups.push_back(std::move(group));
    }
    refresh_all_groups(scene, cfg.group_model);
    scene.validate();
    dataset.push_back({id, std::move(scene)});
  }
  return dataset;
}

void write_dataset_csv(const std::vector<Situation>& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "situation_id,person_id,x,y,theta,group_id\n";
  char buffer[256];
  for (const auto& situation : dataset) {
    std::map<std::string, std::string> person_group;
    for (const auto& g : situation.scene.groups)
      for (const auto& m : g.members) person_group[m] = g.id;
    for (const auto& p : situation.scene.persons) {
      std::snprintf(buffer, sizeof(buffer), "%d,%s,%.6f,%.6f,%.6f,%s\n", situation.id,
                    p.id.c_str(), p.pose.x, p.pose.y, p.pose.theta,
                    person_group.count(p.id) ? person_group[p.id].c_str() : "");
      out << buffer;
    }
  }
}

std::vector<Situation> generate_dataset(const DatasetGenSpec& spec, const RunConfig& cfg) {
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Situation> dataset;
  int situation_id = 0;
  int person_counter = 0;

  auto add_situation = [&](std::vector<PersonState> persons, bool grouped) {
    SceneState scene;
    GroupState group;
    group.id = "g0";
    for (auto& p : persons) {
      p.id = "p" + std::to_string(person_counter++);
      p.params = cfg.person_defaults;
      group.members.push_back(p.id);
      scene.persons.push_back(std::move(p));
    }
    if (grouped) scene.groups.push_back(std::move(group));
    refresh_all_groups(scene, cfg.group_model);
    dataset.push_back({situation_id++, std::move(scene)});
  };

  auto make_person = [&](double x, double y, double theta) {
    PersonState p;
    p.pose = make_pose(x, y, theta);
    return p;
  };

  // Facing pairs across a diameter.
  for (int k = 0; k < spec.pairs_vis_a_vis; ++k) {
    const double r = uniform(spec.radius_min, spec.radius_max);
    const double phi = uniform(0.0, 2.0 * kPi);
    const double jitter = uniform(-spec.heading_jitter, spec.heading_jitter);
    std::vector<PersonState> persons;
    persons.push_back(make_person(r * std::cos(phi), r * std::sin(phi), phi + kPi + jitter));
    persons.push_back(make_person(-r * std::cos(phi), -r * std::sin(phi), phi - jitter));
    add_situation(std::move(persons), true);
  }

  // Side-by-side pairs walking the same way.
  for (int k = 0; k < spec.pairs_side_by_side; ++k) {
    const double half = uniform(spec.radius_min, spec.radius_max);
    const double heading = uniform(0.0, 2.0 * kPi);
    const double jitter = uniform(-spec.heading_jitter, spec.heading_jitter);
    const Vec2 lateral = unit_from_angle(heading + kPi / 2.0);
    std::vector<PersonState> persons;
    persons.push_back(make_person(lateral.x * half, lateral.y * half, heading + jitter));
    persons.push_back(make_person(-lateral.x * half, -lateral.y * half, heading - jitter));
    add_situation(std::move(persons), true);
  }

  // Circular groups facing the center.
  auto add_ring = [&](int members) {
    const double r = uniform(spec.radius_min, spec.radius_max);
    const double phase = uniform(0.0, 2.0 * kPi);
    std::vector<PersonState> persons;
    for (int m = 0; m < members; ++m) {
      const double ang =
          phase + 2.0 * kPi * m / members + uniform(-spec.jitter, spec.jitter) / std::max(r, 0.3);
      const double rr = r * (1.0 + uniform(-spec.jitter, spec.jitter) / 3.0);
      persons.push_back(make_person(rr * std::cos(ang), rr * std::sin(ang),
                                    ang + kPi + uniform(-spec.heading_jitter, spec.heading_jitter)));
    }
    add_situation(std::move(persons), true);
  };
  for (int k = 0; k < spec.triads; ++k) add_ring(3);
  for (int k = 0; k < spec.quads; ++k) add_ring(4);
  for (int k = 0; k < spec.quints; ++k) add_ring(5);

  return dataset;
}

}  // namespace socnav
