#pragma once

#include <string>
#include <vector>

#include "socnav/config.hpp"
#include "socnav/eval.hpp"
#include "socnav/sim.hpp"

namespace socnav {

/// Loads a scene document: persons[] with pose, velocity and optional sigma
/// overrides, groups[] as member id lists. Group geometry and default group
/// sigmas are derived from the members.
SceneState load_scene_json(const std::string& path, const RunConfig& cfg);
SceneState parse_scene(const std::string& json_text, const RunConfig& cfg);
void write_scene_json(const SceneState& scene, const std::string& path);

/// Scenario document: map (inline empty grid or pgm+meta reference), scene
/// (inline or file), robot start/limits, target, per-person scripts, flags.
Scenario load_scenario_json(const std::string& path, const RunConfig& cfg);

/// Dataset CSV with header situation_id,person_id,x,y,theta,group_id.
/// Ungrouped persons leave group_id empty.
std::vector<Situation> load_dataset_csv(const std::string& path, const RunConfig& cfg);
void write_dataset_csv(const std::vector<Situation>& dataset, const std::string& path);

struct DatasetGenSpec {
  unsigned seed = 7;
  int pairs_vis_a_vis = 60;
  int pairs_side_by_side = 60;
  int triads = 90;
  int quads = 60;
  int quints = 30;
  double radius_min = 0.55;
  double radius_max = 1.35;
  double jitter = 0.12;      // radial / angular placement noise
  double heading_jitter = 0.15;  // radians around facing-center
};

/// Synthetic formations: vis-a-vis and side-by-side pairs plus circular
/// groups of three to five members facing the center, with placement jitter.
std::vector<Situation> generate_dataset(const DatasetGenSpec& spec, const RunConfig& cfg);

}  // namespace socnav
