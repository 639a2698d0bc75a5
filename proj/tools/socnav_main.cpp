// Command line front end: field dumps, approach queries, scenario runs and
// dataset perimeter sweeps. Exit codes: 0 success, 1 input error, 2 no valid
// result.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "socnav/config.hpp"
#include "socnav/scene_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNoResult = 2;

socnav::RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return socnav::run_config_defaults();
  return socnav::load_run_config(path);
}

void write_manifest(const fs::path& out_dir, const std::string& command, unsigned seed,
                    const std::vector<std::string>& outputs) {
  json doc;
  doc["command"] = command;
  doc["seed"] = seed;
  doc["outputs"] = outputs;
  std::ofstream out(out_dir / "manifest.json");
  out << doc.dump(2) << '\n';
}

int cmd_field(const std::string& scene_file, const std::string& config_file,
              const std::string& out_file, std::vector<double> bounds, double resolution) {
  const auto cfg = load_config_or_default(config_file);
  const auto scene = socnav::load_scene_json(scene_file, cfg);
  if (bounds.size() != 4) {
    std::cerr << "field: --bounds expects x0,y0,x1,y1\n";
    return kExitInputError;
  }
  const double x0 = bounds[0], y0 = bounds[1], x1 = bounds[2], y1 = bounds[3];
  if (!(x1 > x0 && y1 > y0 && resolution > 0.0)) {
    std::cerr << "field: empty bounds or non-positive resolution\n";
    return kExitInputError;
  }
  std::ofstream out(out_file);
  if (!out) {
    std::cerr << "field: cannot open " << out_file << "\n";
    return kExitInputError;
  }
  const int nx = static_cast<int>(std::ceil((x1 - x0) / resolution));
  const int ny = static_cast<int>(std::ceil((y1 - y0) / resolution));
  for (int j = ny - 1; j >= 0; --j) {
    for (int i = 0; i < nx; ++i) {
      const socnav::Vec2 p{x0 + (i + 0.5) * resolution, y0 + (j + 0.5) * resolution};
      out << socnav::global_field(scene, p);
      if (i + 1 < nx) out << ',';
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_approach(const std::string& scene_file, const std::string& config_file,
                 const std::string& target_spec, std::vector<double> robot,
                 const std::string& out_file, bool adapt_space, bool adapt_approach) {
  const auto cfg = load_config_or_default(config_file);
  auto scene = socnav::load_scene_json(scene_file, cfg);
  if (robot.size() != 3) {
    std::cerr << "approach: --robot expects x,y,theta\n";
    return kExitInputError;
  }
  const auto colon = target_spec.find(':');
  if (colon == std::string::npos) {
    std::cerr << "approach: --target expects person:<id> or group:<id>\n";
    return kExitInputError;
  }
  const std::string kind = target_spec.substr(0, colon);
  const std::string id = target_spec.substr(colon + 1);
  socnav::TargetRef target;
  if (kind == "person")
    target = socnav::TargetRef::person(id);
  else if (kind == "group")
    target = socnav::TargetRef::group(id);
  else {
    std::cerr << "approach: unknown target kind " << kind << "\n";
    return kExitInputError;
  }

  const auto robot_pose = socnav::make_pose(robot[0], robot[1], robot[2]);
  if (adapt_space) {
    scene = socnav::adapt_scene(scene, robot_pose, target, {true, false}, cfg.adaptation,
                                cfg.velocity);
  }

  // Field-backed grid sized around the scene.
  double min_x = robot_pose.x, min_y = robot_pose.y, max_x = robot_pose.x, max_y = robot_pose.y;
  for (const auto& p : scene.persons) {
    min_x = std::min(min_x, p.pose.x);
    max_x = std::max(max_x, p.pose.x);
    min_y = std::min(min_y, p.pose.y);
    max_y = std::max(max_y, p.pose.y);
  }
  socnav::GridSpec spec;
  spec.resolution = cfg.grid_resolution;
  spec.origin = {min_x - 4.0, min_y - 4.0};
  spec.width = static_cast<int>(std::ceil((max_x - min_x + 8.0) / spec.resolution));
  spec.height = static_cast<int>(std::ceil((max_y - min_y + 8.0) / spec.resolution));
  const auto map = socnav::compose(socnav::make_empty_map(spec), {}, scene, cfg.costmap);

  const auto result = socnav::estimate_approach_pose(map, scene, target, robot_pose, cfg.approach,
                                                     cfg.adaptation.s_r, adapt_approach);
  json doc;
  doc["target"] = target_spec;
  doc["radii"] = json::array();
  for (const auto& diag : result.radii) {
    doc["radii"].push_back({{"radius", diag.radius},
                            {"samples", diag.n_samples},
                            {"free", diag.free_samples},
                            {"zones", diag.zones},
                            {"fov_fallback", diag.fov_fallback},
                            {"zones_after_fov", diag.zones_after_fov},
                            {"zones_after_width", diag.zones_after_width}});
  }
  if (result.pose) {
    doc["pose"] = {{"x", result.pose->position.x},
                   {"y", result.pose->position.y},
                   {"heading", result.pose->heading},
                   {"radius", result.pose->radius_used},
                   {"zone", result.pose->zone_id}};
  } else {
    doc["pose"] = nullptr;
  }
  if (out_file.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream out(out_file);
    out << doc.dump(2) << '\n';
  }
  return result.pose ? kExitOk : kExitNoResult;
}

socnav::SimConfigFlags flags_for_label(const std::string& label) {
  // off: no adaptation at all; i..iv: the velocity-adaptation matrix with the
  // base space adaptation always on.
  if (label == "off") return {false, false, false};
  if (label == "i") return {true, false, false};
  if (label == "ii") return {true, false, true};
  if (label == "iii") return {true, true, false};
  if (label == "iv") return {true, true, true};
  throw socnav::IoError("unknown config label: " + label);
}

int cmd_sim(const std::string& scenario_file, const std::string& config_file,
            const std::string& out_dir, const std::string& configs, unsigned seed) {
  const auto cfg = load_config_or_default(config_file);
  auto scenario = socnav::load_scenario_json(scenario_file, cfg);
  fs::create_directories(out_dir);

  std::vector<std::string> labels;
  std::stringstream ss(configs);
  std::string label;
  while (std::getline(ss, label, ',')) {
    if (!label.empty()) labels.push_back(label);
  }
  if (labels.empty()) labels = {"scenario"};

  std::vector<socnav::SummaryRow> rows;
  std::vector<std::string> outputs;
  for (const auto& l : labels) {
    if (l != "scenario") scenario.flags = flags_for_label(l);
    const auto trace = socnav::run_scenario(scenario, cfg.sim_params(), l);
    const std::string stem = (fs::path(out_dir) / (scenario.name + "_" + l)).string();
    socnav::write_trace_ndjson(trace, stem + ".ndjson");
    socnav::write_hsci_csv(trace, stem + "_hsci.csv");
    socnav::write_eval_summary_json(socnav::evaluate_sim_trace(trace, cfg.eval),
                                    stem + "_eval.json");
    outputs.push_back(stem + ".ndjson");
    outputs.push_back(stem + "_hsci.csv");
    outputs.push_back(stem + "_eval.json");
    rows.push_back(socnav::summarize_trace(trace, cfg.eval));
  }
  const std::string summary_path = (fs::path(out_dir) / "summary.csv").string();
  socnav::write_summary_csv(rows, summary_path);
  outputs.push_back(summary_path);
  write_manifest(out_dir, "sim", seed, outputs);
  return kExitOk;
}

int cmd_dataset(const std::string& dataset_file, const std::string& config_file,
                const std::string& out_dir, std::vector<double> s_r_values,
                std::vector<double> s_h_values, int workers, unsigned seed) {
  const auto cfg = load_config_or_default(config_file);
  const auto dataset = socnav::load_dataset_csv(dataset_file, cfg);
  fs::create_directories(out_dir);

  socnav::PerimeterStudyConfig study;
  study.group_model = cfg.group_model;
  study.adaptation = cfg.adaptation;
  study.approach = cfg.approach;
  study.resolution = cfg.grid_resolution;
  if (!s_r_values.empty()) study.s_r_values = s_r_values;
  if (!s_h_values.empty()) study.s_h_values = s_h_values;
  study.workers = workers;

  const auto report = socnav::compare_perimeters(dataset, study);
  const std::string csv_path = (fs::path(out_dir) / "perimeters.csv").string();
  const std::string json_path = (fs::path(out_dir) / "perimeter_summary.json").string();
  socnav::write_perimeter_csv(report, csv_path);
  socnav::write_perimeter_summary_json(report, json_path);
  write_manifest(out_dir, "dataset", seed, {csv_path, json_path});
  return report.rows.empty() && !dataset.empty() ? kExitNoResult : kExitOk;
}

int cmd_gen_dataset(const std::string& out_file, const std::string& config_file, unsigned seed,
                    int pairs, int triads, int quads, int quints) {
  const auto cfg = load_config_or_default(config_file);
  socnav::DatasetGenSpec spec;
  spec.seed = seed;
  spec.pairs_vis_a_vis = pairs / 2;
  spec.pairs_side_by_side = pairs - pairs / 2;
  spec.triads = triads;
  spec.quads = quads;
  spec.quints = quints;
  const auto dataset = socnav::generate_dataset(spec, cfg);
  socnav::write_dataset_csv(dataset, out_file);
  std::cout << "wrote " << dataset.size() << " situations to " << out_file << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socially reactive navigation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  unsigned seed = 7;
  app.add_option("--config", config_file, "Run configuration JSON");
  app.add_option("--seed", seed, "Seed recorded in manifests; used by gen-dataset");

  auto* field = app.add_subcommand("field", "Dump the social field over a bounding box");
  std::string field_scene, field_out;
  std::vector<double> field_bounds{0.0, 0.0, 10.0, 10.0};
  double field_res = 0.05;
  field->add_option("--scene", field_scene, "Scene JSON")->required();
  field->add_option("--out", field_out, "Output CSV")->required();
  field->add_option("--bounds", field_bounds, "x0,y0,x1,y1")->expected(4);
  field->add_option("--resolution", field_res, "Meters per cell");

  auto* approach = app.add_subcommand("approach", "Estimate an approach pose for a target");
  std::string approach_scene, approach_target, approach_out;
  std::vector<double> approach_robot{0.0, 0.0, 0.0};
  bool approach_adapt_space = false, approach_adapt_vel = false;
  approach->add_option("--scene", approach_scene, "Scene JSON")->required();
  approach->add_option("--target", approach_target, "person:<id> or group:<id>")->required();
  approach->add_option("--robot", approach_robot, "x,y,theta")->expected(3);
  approach->add_option("--out", approach_out, "Output JSON (stdout when absent)");
  approach->add_flag("--adapt-space", approach_adapt_space, "Apply the space adaptations first");
  approach->add_flag("--adapt-approach", approach_adapt_vel,
                     "Enable the velocity features of the search");

  auto* sim = app.add_subcommand("sim", "Run a scenario under one or more configurations");
  std::string sim_scenario, sim_out = "out", sim_configs = "scenario";
  sim->add_option("--scenario", sim_scenario, "Scenario JSON")->required();
  sim->add_option("--out", sim_out, "Output directory");
  sim->add_option("--configs", sim_configs,
                  "Comma list of off,i,ii,iii,iv (default: flags from the scenario file)");

  auto* dataset = app.add_subcommand("dataset", "Perimeter comparison over a dataset");
  std::string dataset_file, dataset_out = "out";
  std::vector<double> dataset_sr, dataset_sh;
  int workers = 1;
  dataset->add_option("--dataset", dataset_file, "Dataset CSV")->required();
  dataset->add_option("--out", dataset_out, "Output directory");
  dataset->add_option("--s-r", dataset_sr, "Robot widths to sweep");
  dataset->add_option("--s-h", dataset_sh, "Side clearances to sweep");
  dataset->add_option("--workers", workers, "Worker threads (results are order-stable)");

  auto* gen = app.add_subcommand("gen-dataset", "Generate a synthetic formation dataset");
  std::string gen_out = "dataset.csv";
  int gen_pairs = 120, gen_triads = 90, gen_quads = 60, gen_quints = 30;
  gen->add_option("--out", gen_out, "Output CSV");
  gen->add_option("--pairs", gen_pairs, "Number of two-person situations");
  gen->add_option("--triads", gen_triads, "Number of three-person rings");
  gen->add_option("--quads", gen_quads, "Number of four-person rings");
  gen->add_option("--quints", gen_quints, "Number of five-person rings");

  CLI11_PARSE(app, argc, argv);

  try {
    if (field->parsed())
      return cmd_field(field_scene, config_file, field_out, field_bounds, field_res);
    if (approach->parsed())
      return cmd_approach(approach_scene, config_file, approach_target, approach_robot,
                          approach_out, approach_adapt_space, approach_adapt_vel);
    if (sim->parsed()) return cmd_sim(sim_scenario, config_file, sim_out, sim_configs, seed);
    if (dataset->parsed())
      return cmd_dataset(dataset_file, config_file, dataset_out, dataset_sr, dataset_sh, workers,
                         seed);
    if (gen->parsed())
      return cmd_gen_dataset(gen_out, config_file, seed, gen_pairs, gen_triads, gen_quads,
                             gen_quints);
  } catch (const socnav::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInputError;
  } catch (const socnav::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}
