#pragma once

#include <string>
#include <vector>

#include "socnav/adaptation.hpp"
#include "socnav/approach.hpp"
#include "socnav/social_field.hpp"

namespace socnav {

struct HsciSample {
  double timestamp = 0.0;
  double sii = 0.0;
  double sgi = 0.0;
  double sdi = 0.0;
};

struct EvalConfig {
  double comfort_threshold = 0.14;
  double sii_sigma = 0.45;        // meters; sgi uses each group's radius
  double transient_grace = 0.0;   // breaches shorter than this are not flagged

  void validate() const;
};

/// max over persons of exp(-d^2 / (2 sii_sigma^2)) with d the robot-person
/// distance.
double compute_sii(const Pose2D& robot_pose, const SceneState& scene, const EvalConfig& cfg);

/// Same Gaussian form per group with scale = group radius.
double compute_sgi(const Pose2D& robot_pose, const SceneState& scene, const EvalConfig& cfg);

/// (1 + cos(theta_robot - (theta_target + pi))) / 2 — 1 when the robot faces
/// a person who faces it back.
double compute_sdi(const Pose2D& robot_pose, const Pose2D& target_pose);

struct HsciTracePoint {
  double t = 0.0;
  HsciSample hsci;
  Pose2D robot;
};

struct BreachInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::string index;  // "sii" or "sgi"
  bool behind = false;
  bool transient = false;  // shorter than the grace period
};

struct TraceEvalSummary {
  double max_sii = 0.0;
  double final_sii = 0.0;
  double max_sgi = 0.0;
  double final_sgi = 0.0;
  double final_sdi = 0.0;
  std::vector<BreachInterval> breaches;
};

/// Breach intervals are the maximal runs of samples above the comfort
/// threshold; an interval is flagged behind=true when the robot stayed in the
/// rear half-plane of the nearest person throughout.
TraceEvalSummary evaluate_trace(const std::vector<HsciTracePoint>& points,
                                const std::vector<SceneState>& scenes, const EvalConfig& cfg);

// ---------------------------------------------------------------------------
// Dataset-level perimeter comparison

struct Situation {
  int id = 0;
  SceneState scene;
};

struct PerimeterRow {
  int situation = 0;
  std::string group_id;
  int group_size = 0;
  double s_r = 0.0;
  double s_h = 0.0;
  double baseline = 0.0;
  double adapted = 0.0;
  bool changed = false;  // any member sigma changed by the adaptation
};

struct PerimeterAggregate {
  double s_r = 0.0;
  double s_h = 0.0;
  double baseline_total = 0.0;
  double adapted_total = 0.0;
  double pct_increase = 0.0;  // 100 * (adapted - baseline) / baseline
  // per group size (index = member count), -1 when no baseline perimeter
  std::vector<double> pct_by_size;
  std::vector<double> baseline_by_size;
  std::vector<double> adapted_by_size;
};

struct PerimeterReport {
  std::vector<PerimeterRow> rows;
  std::vector<PerimeterAggregate> aggregates;
};

struct PerimeterStudyConfig {
  GroupModel group_model;
  AdaptationConfig adaptation;  // s_h / s_r replaced per sweep point
  ApproachConfig approach;
  std::vector<double> s_r_values{0.45, 0.8};
  std::vector<double> s_h_values{0.225, 0.3, 0.375, 0.45};
  double grid_margin = 2.5;  // meters around the group bounding box
  double resolution = 0.05;
  int workers = 1;
};

/// Runs the baseline/adapted perimeter comparison over every situation and
/// sweep point. Groups are re-derived per situation; the adapted model is
/// adapt_group applied to every group.
PerimeterReport compare_perimeters(const std::vector<Situation>& dataset,
                                   const PerimeterStudyConfig& study);

void write_perimeter_csv(const PerimeterReport& report, const std::string& path);
void write_perimeter_summary_json(const PerimeterReport& report, const std::string& path);

}  // namespace socnav
