#pragma once

#include <optional>
#include <string>

#include "socnav/social_field.hpp"

namespace socnav {

struct AdaptationConfig {
  double zeta = 0.3;              // frontal shrink for approach targets, meters
  double s_h = 0.375;             // human side clearance, meters
  double s_r = 0.8;               // robot lateral size, meters
  double intimate_radius = 0.45;  // frontal sigma floor
  double half_human_width = 0.225;  // lateral sigma floor
  double orientation_diff_min = kPi / 4.0;
  double orientation_diff_max = 3.0 * kPi / 4.0;

  void validate() const;
};

struct VelocityAdaptConfig {
  double a_adapt = 1.5;  // dimensionless growth factor
  double a_limit = 1.0;  // additive growth cap, meters
  double d_limit = 6.0;  // robot distance past which the growth saturates

  void validate() const;
};

/// Frontal shrink applied to an approach target:
/// sigma_f' = min(sigma_f, max(intimate_radius, sigma_f - zeta)).
GaussianParams adapt_individual_target(const GaussianParams& params,
                                       const AdaptationConfig& cfg);

struct SideAnchors {
  Vec2 a_left;   // s_h to the person's left
  Vec2 a_right;  // s_h to the person's right
  Vec2 a_l_adj;  // left neighbor's right-side point
  Vec2 a_r_adj;  // right neighbor's left-side point
};

/// Clearance points perpendicular to each heading, at distance s_h.
SideAnchors side_anchor_points(const PersonState& person, const Pose2D& left_neighbor,
                               const Pose2D& right_neighbor, double s_h);

/// Lateral adaptation of one group member against its circular-order
/// neighbors (either may be absent, e.g. in a two-person group). Per side:
/// the robot must fit between the two people (distance >= s_r) and the
/// pairwise orientation difference must fall inside the configured gate;
/// then the personal boundary retreats to the edge of a robot centered in
/// the anchor gap, floored at half_human_width. sigma_f, sigma_r and the
/// amplitude are never touched.
GaussianParams adapt_group_member(const PersonState& person, const PersonState* left,
                                  const PersonState* right, const AdaptationConfig& cfg);

/// Applies adapt_group_member to every member of `group_id`. Group-level
/// parameters stay untouched; single-member groups come back unchanged.
SceneState adapt_group(const SceneState& scene, const std::string& group_id,
                       const AdaptationConfig& cfg);

/// Velocity-driven frontal growth (same rule for persons and groups):
/// d_mod = min(1, 2 d / d_limit) for d <= d_limit else 1,
/// sigma_f' = min(sigma_f + a_limit, sigma_f (1 + d_mod a_adapt v)).
double adapt_velocity(double sigma_f, double velocity_magnitude, double robot_distance,
                      const VelocityAdaptConfig& cfg);

struct TargetRef {
  enum class Kind { None, Person, Group };
  Kind kind = Kind::None;
  std::string id;

  static TargetRef person(std::string id) { return {Kind::Person, std::move(id)}; }
  static TargetRef group(std::string id) { return {Kind::Group, std::move(id)}; }
};

struct AdaptFlags {
  bool base = true;      // individual frontal shrink + group lateral shrink
  bool velocity = false; // velocity-driven frontal growth
};

/// Per-tick adaptation pipeline, always recomputed from the baseline scene:
/// velocity growth first, then group adaptation, then the individual frontal
/// shrink when the target is a person.
SceneState adapt_scene(const SceneState& baseline, const Pose2D& robot_pose,
                       const TargetRef& target, const AdaptFlags& flags,
                       const AdaptationConfig& cfg, const VelocityAdaptConfig& vcfg);

}  // namespace socnav
