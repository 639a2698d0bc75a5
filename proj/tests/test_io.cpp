#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "socnav/scene_io.hpp"

using namespace socnav;

TEST_CASE("scene parsing with derived groups and overrides") {
  const char* text = R"({
    "persons": [
      {"id": "a", "x": 1.0, "y": 0.0, "theta": 3.14159265, "vx": 0.0, "vy": 0.0},
      {"id": "b", "x": -1.0, "y": 0.0, "theta": 0.0,
       "params": {"sigma_f": 0.9, "amplitude": 100}},
      {"id": "solo", "x": 4.0, "y": 4.0, "theta": 0.5}
    ],
    "groups": [{"id": "g0", "members": ["a", "b"]}]
  })";
  const auto cfg = run_config_defaults();
  const auto scene = parse_scene(text, cfg);

  REQUIRE(scene.persons.size() == 3);
  REQUIRE(scene.groups.size() == 1);
  CHECK(scene.persons[0].params.sigma_f == cfg.person_defaults.sigma_f);
  CHECK(scene.persons[1].params.sigma_f == 0.9);
  CHECK(scene.persons[1].params.amplitude == 100);
  CHECK(scene.persons[1].params.sigma_r == cfg.person_defaults.sigma_r);

  const auto& g = scene.groups[0];
  CHECK(g.center.x == doctest::Approx(0.0));
  CHECK(g.radius == doctest::Approx(1.0));
  CHECK(g.params.sigma_f == doctest::Approx(0.5));  // radius/2
  CHECK(g.params.sigma_sl == g.params.sigma_sr);
}

TEST_CASE("malformed scene raises an io error") {
  CHECK_THROWS_AS(parse_scene("{ not json", run_config_defaults()), IoError);
  CHECK_THROWS_AS(parse_scene(R"({"persons": [{"id": "a"}]})", run_config_defaults()),
                  std::exception);
  // Unknown group member is a validation failure.
  CHECK_THROWS_AS(
      parse_scene(R"({"persons": [], "groups": [{"id": "g", "members": ["x"]}]})",
                  run_config_defaults()),
      ValidationError);
}

TEST_CASE("run config loading overrides defaults and validates") {
  const char* path = "config_test.json";
  {
    std::ofstream out(path);
    out << R"({
      "social": {"sigma_f": 1.0, "amplitude": 200},
      "adaptation": {"zeta": 0.2},
      "approach": {"free_threshold": 120, "max_radius": 0.7},
      "sim": {"dt": 0.05, "replan_period": 0.25}
    })";
  }
  const auto cfg = load_run_config(path);
  CHECK(cfg.person_defaults.sigma_f == 1.0);
  CHECK(cfg.person_defaults.amplitude == 200);
  CHECK(cfg.adaptation.zeta == 0.2);
  CHECK(cfg.approach.free_threshold == 120);
  CHECK(cfg.approach.max_radius == 0.7);
  CHECK(cfg.sim_dt == 0.05);
  CHECK(cfg.person_defaults.sigma_r == run_config_defaults().person_defaults.sigma_r);
  std::remove(path);

  {
    std::ofstream out(path);
    out << R"({"social": {"sigma_f": -2.0}, "adaptation": {"s_r": 0}})";
  }
  CHECK_THROWS_AS(load_run_config(path), ValidationError);
  try {
    load_run_config(path);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("sigma_f") != std::string::npos);
  }
  std::remove(path);
}

TEST_CASE("scenario loading") {
  const char* path = "scenario_test.json";
  {
    std::ofstream out(path);
    out << R"({
      "name": "demo",
      "map": {"width_m": 10, "height_m": 8, "resolution": 0.05},
      "scene": {
        "persons": [{"id": "a", "x": 2.0, "y": 4.0, "theta": 0.0}],
        "groups": []
      },
      "robot": {"x": 8.0, "y": 4.0, "theta": 3.14159, "v_max": 0.5},
      "target": {"type": "person", "id": "a"},
      "scripts": [{"person": "a", "vx": 1.0, "vy": 0.0, "stop_distance": 2.0}],
      "config": {"space_base": true, "space_velocity": true, "approach_velocity": false},
      "duration": 20.0
    })";
  }
  const auto cfg = run_config_defaults();
  const auto scenario = load_scenario_json(path, cfg);
  CHECK(scenario.name == "demo");
  CHECK(scenario.map_spec.width == 200);
  CHECK(scenario.map_spec.height == 160);
  CHECK(scenario.robot_limits.v_max == 0.5);
  CHECK(scenario.target.kind == TargetRef::Kind::Person);
  REQUIRE(scenario.scripts.size() == 1);
  CHECK(scenario.scripts[0].stop_distance == 2.0);
  CHECK(scenario.flags.space_velocity);
  CHECK_FALSE(scenario.flags.approach_velocity);
  std::remove(path);

  CHECK_THROWS_AS(load_scenario_json("missing_scenario.json", cfg), IoError);
}

TEST_CASE("scenario with a pgm-backed static map") {
  const auto cfg = run_config_defaults();
  const auto scenario =
      load_scenario_json(std::string(SOCNAV_DATA_DIR) + "/scenarios/static_individual_room.json",
                         cfg);
  REQUIRE(!scenario.map_pgm.empty());
  const auto map = rasterize_static(scenario.map_pgm, scenario.map_meta);
  CHECK(map.spec().width == 120);
  CHECK(map.spec().height == 80);
  CHECK(map.at(0, 0) == kCostLethal);          // wall
  CHECK(map.at(60, 40) == 0);                  // interior
  CHECK(map.at(119, 40) == 0);                 // doorway
  CHECK(map.at(119, 10) == kCostLethal);       // east wall below the doorway
}

TEST_CASE("scene json write/load round trip") {
  const auto cfg = run_config_defaults();
  const auto scene = parse_scene(R"({
    "persons": [
      {"id": "a", "x": 1.5, "y": -0.25, "theta": 0.7, "vx": 0.3, "vy": -0.1},
      {"id": "b", "x": 0.0, "y": 2.0, "theta": -2.0}
    ],
    "groups": [{"id": "g0", "members": ["a", "b"]}]
  })", cfg);
  write_scene_json(scene, "scene_roundtrip.json");
  const auto back = load_scene_json("scene_roundtrip.json", cfg);
  REQUIRE(back.persons.size() == 2);
  CHECK(back.persons[0].pose.x == scene.persons[0].pose.x);
  CHECK(back.persons[0].velocity.x == scene.persons[0].velocity.x);
  CHECK(back.groups[0].members == scene.groups[0].members);
  CHECK(back.groups[0].radius == doctest::Approx(scene.groups[0].radius));
  std::remove("scene_roundtrip.json");
}

TEST_CASE("dataset csv round trip") {
  const auto cfg = run_config_defaults();
  DatasetGenSpec spec;
  spec.seed = 11;
  spec.pairs_vis_a_vis = 3;
  spec.pairs_side_by_side = 3;
  spec.triads = 4;
  spec.quads = 2;
  spec.quints = 1;
  const auto dataset = generate_dataset(spec, cfg);
  REQUIRE(dataset.size() == 13);

  int by_size[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& s : dataset) {
    REQUIRE(s.scene.groups.size() == 1);
    by_size[s.scene.groups[0].members.size()]++;
    s.scene.validate();
  }
  CHECK(by_size[2] == 6);
  CHECK(by_size[3] == 4);
  CHECK(by_size[4] == 2);
  CHECK(by_size[5] == 1);

  const char* path = "dataset_test.csv";
  write_dataset_csv(dataset, path);
  const auto back = load_dataset_csv(path, cfg);
  REQUIRE(back.size() == dataset.size());
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    CHECK(back[k].scene.persons.size() == dataset[k].scene.persons.size());
    CHECK(back[k].scene.groups.size() == 1);
    CHECK(back[k].scene.groups[0].radius ==
          doctest::Approx(dataset[k].scene.groups[0].radius).epsilon(1e-4));
  }
  std::remove(path);

  // Deterministic generation for a fixed seed.
  const auto again = generate_dataset(spec, cfg);
  for (std::size_t k = 0; k < dataset.size(); ++k)
    CHECK(again[k].scene.persons[0].pose.x == dataset[k].scene.persons[0].pose.x);
}
