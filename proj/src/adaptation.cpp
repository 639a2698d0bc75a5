#include "socnav/adaptation.hpp"

#include <algorithm>
#include <cmath>

namespace socnav {

void AdaptationConfig::validate() const {
  std::string errors;
  auto bad = [&](const char* msg) {
    if (!errors.empty()) errors += "; ";
    errors += msg;
  };
  if (!(zeta >= 0.0)) bad("zeta must be >= 0");
  if (!(s_h >= half_human_width)) bad("s_h must be >= half_human_width");
  if (!(s_r > 0.0)) bad("s_r must be > 0");
  if (!(intimate_radius > 0.0)) bad("intimate_radius must be > 0");
  if (!(half_human_width > 0.0)) bad("half_human_width must be > 0");
  if (!(orientation_diff_min < orientation_diff_max))
    bad("orientation_diff_min must be < orientation_diff_max");
  if (!errors.empty()) throw ValidationError("adaptation config: " + errors);
}

void VelocityAdaptConfig::validate() const {
  if (a_adapt < 0.0 || a_limit < 0.0 || d_limit < 0.0)
    throw ValidationError("velocity config: a_adapt, a_limit and d_limit must be >= 0");
}

GaussianParams adapt_individual_target(const GaussianParams& params,
                                       const AdaptationConfig& cfg) {
  GaussianParams out = params;
  const double aux = std::max(cfg.intimate_radius, params.sigma_f - cfg.zeta);
  out.sigma_f = std::min(params.sigma_f, aux);
  return out;
}

SideAnchors side_anchor_points(const PersonState& person, const Pose2D& left_neighbor,
                               const Pose2D& right_neighbor, double s_h) {
  const Vec2 p = person.pose.position();
  const double th = person.pose.theta;
  SideAnchors a;
  a.a_left = p + s_h * unit_from_angle(th + kPi / 2.0);
  a.a_right = p + s_h * unit_from_angle(th - kPi / 2.0);
  a.a_l_adj = left_neighbor.position() + s_h * unit_from_angle(left_neighbor.theta - kPi / 2.0);
  a.a_r_adj = right_neighbor.position() + s_h * unit_from_angle(right_neighbor.theta + kPi / 2.0);
  return a;
}

namespace {

// Shrinks one lateral deviation toward the edge of a robot centered between
// the paired anchor points. A negative anchor margin means the robot is wider
// than the anchor gap and the boundary retreats inside the anchors.
double adapt_side(const PersonState& person, const PersonState& neighbor, const Vec2& a_own,
                  const Vec2& a_adj, double sigma_side, const AdaptationConfig& cfg) {
  const double d_members = distance(person.pose.position(), neighbor.pose.position());
  if (d_members < 1e-9) return sigma_side;
  if (d_members < cfg.s_r) return sigma_side;  // robot cannot slot between the two people

  const double dth = std::abs(wrap_angle(person.pose.theta - neighbor.pose.theta));
  if (!(dth > cfg.orientation_diff_min && dth < cfg.orientation_diff_max)) return sigma_side;

  const double d_anchor = distance(a_own, a_adj);
  if (d_anchor < 1e-9) return sigma_side;  // degenerate gap

  const Vec2 v_aux = (a_adj - a_own) / d_anchor;
  const Vec2 b_aux = a_own + 0.5 * (d_anchor - cfg.s_r) * v_aux;

  const Vec2 lateral = unit_from_angle(person.pose.theta + kPi / 2.0);
  const double d_aux = std::abs((b_aux - person.pose.position()).dot(lateral));

  return std::max(std::min(sigma_side, d_aux), cfg.half_human_width);
}

}  // namespace

GaussianParams adapt_group_member(const PersonState& person, const PersonState* left,
                                  const PersonState* right, const AdaptationConfig& cfg) {
  GaussianParams out = person.params;
  const Pose2D left_pose = left ? left->pose : Pose2D{};
  const Pose2D right_pose = right ? right->pose : Pose2D{};
  const SideAnchors anchors = side_anchor_points(person, left_pose, right_pose, cfg.s_h);

  if (left) out.sigma_sl = adapt_side(person, *left, anchors.a_left, anchors.a_l_adj,
                                      person.params.sigma_sl, cfg);
  if (right) out.sigma_sr = adapt_side(person, *right, anchors.a_right, anchors.a_r_adj,
                                       person.params.sigma_sr, cfg);
  return out;
}

namespace {

struct NeighborPair {
  const PersonState* left = nullptr;
  const PersonState* right = nullptr;
};

// Relative bearing from the person's heading decides the side: (0, pi) is
// left, (-pi, 0] is right.
bool is_on_left(const PersonState& person, const PersonState& other) {
  const double bearing =
      wrap_angle((other.pose.position() - person.pose.position()).angle() - person.pose.theta);
  return bearing > 0.0 && bearing < kPi;
}

}  // namespace

SceneState adapt_group(const SceneState& scene, const std::string& group_id,
                       const AdaptationConfig& cfg) {
  const GroupState* group = scene.find_group(group_id);
  if (!group) return scene;

  std::vector<const PersonState*> members;
  for (const auto& id : group->members)
    if (const PersonState* p = scene.find_person(id)) members.push_back(p);
  if (members.size() < 2) return scene;

  // Circular order by polar angle around the group center.
  std::vector<std::pair<double, const PersonState*>> ring;
  ring.reserve(members.size());
  for (const auto* p : members)
    ring.emplace_back((p->pose.position() - group->center).angle(), p);
  std::sort(ring.begin(), ring.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second->id < b.second->id);
  });

  const std::size_t n = ring.size();
  SceneState out = scene;
  for (std::size_t i = 0; i < n; ++i) {
    const PersonState* person = ring[i].second;
    NeighborPair nb;
    if (n == 2) {
      // Two-person group: a single neighbor, considered on its actual side.
      const PersonState* other = ring[(i + 1) % n].second;
      if (is_on_left(*person, *other))
        nb.left = other;
      else
        nb.right = other;
    } else {
      const PersonState* prev = ring[(i + n - 1) % n].second;
      const PersonState* next = ring[(i + 1) % n].second;
      if (is_on_left(*person, *prev)) {
        nb.left = prev;
        nb.right = next;
      } else {
        nb.left = next;
        nb.right = prev;
      }
    }
    out.find_person(person->id)->params = adapt_group_member(*person, nb.left, nb.right, cfg);
  }
  return out;
}

double adapt_velocity(double sigma_f, double velocity_magnitude, double robot_distance,
                      const VelocityAdaptConfig& cfg) {
  double d_mod = 1.0;
  if (robot_distance <= cfg.d_limit) {
    d_mod = cfg.d_limit > 0.0 ? std::min(1.0, 2.0 * robot_distance / cfg.d_limit) : 1.0;
  }
  const double grown = sigma_f * (1.0 + d_mod * cfg.a_adapt * velocity_magnitude);
  return std::min(sigma_f + cfg.a_limit, grown);
}

SceneState adapt_scene(const SceneState& baseline, const Pose2D& robot_pose,
                       const TargetRef& target, const AdaptFlags& flags,
                       const AdaptationConfig& cfg, const VelocityAdaptConfig& vcfg) {
  SceneState scene = baseline;

  if (flags.velocity) {
    for (auto& p : scene.persons) {
      const double d = distance(robot_pose.position(), p.pose.position());
      p.params.sigma_f = adapt_velocity(p.params.sigma_f, p.speed(), d, vcfg);
    }
    for (auto& g : scene.groups) {
      const double d = distance(robot_pose.position(), g.center);
      const double v = group_velocity(scene, g).norm();
      g.params.sigma_f = adapt_velocity(g.params.sigma_f, v, d, vcfg);
    }
  }

  if (flags.base) {
    for (const auto& g : baseline.groups) scene = adapt_group(scene, g.id, cfg);
    if (target.kind == TargetRef::Kind::Person) {
      if (PersonState* p = scene.find_person(target.id))
        p->params = adapt_individual_target(p->params, cfg);
    }
  }

  return scene;
}

}  // namespace socnav
