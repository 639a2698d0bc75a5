#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameters of the four-deviation asymmetric Gaussian cost field.
/// amplitude is a cost in [0, 254]; the deviations are meters and strictly
/// positive. sigma_f points along the orientation, sigma_r against it,
/// sigma_sl to the left and sigma_sr to the right.
struct GaussianParams {
  double amplitude = 211.0;
  double sigma_f = 1.2;
  double sigma_r = 0.6;
  double sigma_sl = 0.4;
  double sigma_sr = 0.4;

  bool operator==(const GaussianParams&) const = default;
  void validate(const std::string& who) const;
};

struct PersonState {
  std::string id;
  Pose2D pose;
  Vec2 velocity;  // m/s
  GaussianParams params;

  double speed() const { return velocity.norm(); }
};

/// One F-formation. Center, radius and orientation are derived from the
/// member states; sigma_sl == sigma_sr always holds for the group Gaussian.
struct GroupState {
  std::string id;
  Vec2 center;
  double radius = 0.0;
  double orientation = 0.0;
  std::vector<std::string> members;
  GaussianParams params;

  Pose2D center_pose() const { return Pose2D{center.x, center.y, orientation}; }
};

struct SceneState {
  std::vector<PersonState> persons;
  std::vector<GroupState> groups;
  double timestamp = 0.0;

  const PersonState* find_person(const std::string& id) const;
  PersonState* find_person(const std::string& id);
  const GroupState* find_group(const std::string& id) const;

  void validate() const;
};

/// Defaults used when deriving the group Gaussian from member geometry.
struct GroupModel {
  double amplitude = 211.0;
  double sigma_ratio = 0.5;  // group sigma = sigma_ratio * radius
  double sigma_floor = 0.225;
};

/// Mean velocity vector of the group members (zero for an empty group).
Vec2 group_velocity(const SceneState& scene, const GroupState& group);

/// Recomputes center, radius, orientation and default sigmas of `group` from
/// the current member states. Orientation is the circular mean of the member
/// velocity directions; when every member is at rest it falls back to the
/// circular mean of the member body orientations.
void refresh_group_geometry(SceneState& scene, GroupState& group, const GroupModel& model);
void refresh_all_groups(SceneState& scene, const GroupModel& model);

/// Altered asymmetric Gaussian evaluated at `query` for a field centered at
/// `center`. Deviations are picked per quadrant of the wrapped bearing
/// alpha = wrap(theta - theta0): sigma_f for |alpha| < pi/2 else sigma_r, and
/// sigma_sr for alpha < 0 else sigma_sl.
double altered_asymmetric_gaussian(const Vec2& query, const Pose2D& center,
                                   const GaussianParams& params);

/// Max over the personal fields of every person; 0 for an empty scene.
double merged_personal_field(const SceneState& scene, const Vec2& query);

/// Max over the group fields of every group; 0 when there are no groups.
double merged_group_field(const SceneState& scene, const Vec2& query);

/// max(merged_personal_field, merged_group_field)
double global_field(const SceneState& scene, const Vec2& query);

}  // namespace socnav
