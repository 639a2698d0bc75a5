#pragma once

#include <optional>
#include <string>
#include <vector>

#include "socnav/adaptation.hpp"
#include "socnav/costmap.hpp"

namespace socnav {

struct ApproachConfig {
  double free_threshold = 100.0;     // cells below this cost are approachable
  double initial_radius_person = 1.2;
  double step = 0.1;                 // circumference expansion step, meters
  double d_a_limit = 6.0;
  double a_a_adapt = 1.5;
  double a_a_limit = 1.2;
  double v_mod = 10.0;
  double f_ifov = kPi / 2.0;         // 90 degrees
  double f_mod = 1.1;
  double max_radius = 0.5;           // max expansion beyond the initial radius
  double track_threshold = 1.0;
  int min_samples = 64;

  void validate() const;
};

struct CircumferenceSample {
  Vec2 position;
  double angle = 0.0;  // global angle on the circumference
  int index = 0;
  std::uint8_t cost = 0;
  bool free = false;
};

struct ApproachZone {
  std::vector<CircumferenceSample> samples;  // contiguous in angle (may wrap the seam)
  int zone_id = 0;

  /// Angular span covered by the zone samples, one spacing per sample.
  double arc_angle(double spacing) const { return spacing * static_cast<double>(samples.size()); }
  /// Distance between the two farthest samples (chord of the spanned arc).
  double width(double radius, double spacing) const;
};

struct ApproachPose {
  Vec2 position;
  double heading = 0.0;  // facing the target center
  double radius_used = 0.0;
  int zone_id = 0;
};

/// Evenly spaced samples on the circle; free means cost below the threshold
/// and the cell neither lethal, inscribed nor unknown. Samples outside the
/// grid are not free.
std::vector<CircumferenceSample> sample_circumference(const Costmap& map, const Vec2& center,
                                                      double radius, int n_samples,
                                                      double free_threshold);

/// Groups contiguous free samples; a run crossing the 0/2pi seam is one zone.
std::vector<ApproachZone> extract_zones(const std::vector<CircumferenceSample>& samples);

struct FovFilterResult {
  std::vector<ApproachZone> zones;
  bool fallback = false;  // no zone survived; original zones returned
};

/// Keeps samples inside the fov/2 cone of every involved person, re-splitting
/// zones as needed. An empty result falls back to the unfiltered zones.
FovFilterResult filter_fov(const std::vector<ApproachZone>& zones, const SceneState& scene,
                           const TargetRef& target, double fov);

/// Drops zones narrower than the robot lateral size.
std::vector<ApproachZone> filter_width(const std::vector<ApproachZone>& zones, double s_r,
                                       double radius, double spacing);

/// fov = f_ifov / (f_mod * approach_radius / base_radius), clamped to f_ifov.
double narrowed_fov(const ApproachConfig& cfg, double approach_radius, double base_radius);

/// step' = max(step, step * v * v_mod)
double velocity_scaled_step(const ApproachConfig& cfg, double velocity_magnitude);

/// Velocity growth of the allowed expansion, mirroring the frontal-sigma rule
/// with max_radius in place of sigma.
double expanded_radius_limit(const ApproachConfig& cfg, double velocity_magnitude,
                             double robot_distance);

struct RadiusDiagnostics {
  double radius = 0.0;
  int n_samples = 0;
  int free_samples = 0;
  int zones = 0;
  bool fov_fallback = false;
  int zones_after_fov = 0;
  int zones_after_width = 0;
};

struct ApproachResult {
  std::optional<ApproachPose> pose;
  std::vector<RadiusDiagnostics> radii;
};

/// Expanding-circumference search around the target. Radii grow from the
/// initial radius (group radius, or the person initial radius floor raised by
/// the frontal sigma for lone targets) until a zone passes the fov and width
/// filters; the free sample nearest the robot wins, with the lower angle
/// index breaking ties. velocity_features enables the velocity-scaled step,
/// the raised expansion limit and the fov narrowing. person_initial_radius,
/// when given, overrides the lone-target initial radius (the simulator passes
/// the velocity-grown frontal sigma before the target shrink).
ApproachResult estimate_approach_pose(const Costmap& map, const SceneState& scene,
                                      const TargetRef& target, const Pose2D& robot_pose,
                                      const ApproachConfig& cfg, double s_r,
                                      bool velocity_features,
                                      std::optional<double> person_initial_radius = std::nullopt);

struct TrackResult {
  bool lost = true;
  TargetRef target;
  Vec2 center;
};

/// Nearest person or group center to the previous target center, if within
/// track_threshold.
TrackResult track_target(const SceneState& scene, const Vec2& last_target_center,
                         double track_threshold);

/// Sum of arc lengths of the free zones on the group's own circumference
/// (no expansion, no filtering): the availability measure the comparative
/// dataset study aggregates.
double approach_perimeter(const Costmap& map, const SceneState& scene,
                          const std::string& group_id, const ApproachConfig& cfg);

}  // namespace socnav
