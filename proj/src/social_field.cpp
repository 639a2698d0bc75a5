#include "socnav/social_field.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace socnav {

void GaussianParams::validate(const std::string& who) const {
  std::string errors;
  auto bad = [&](const std::string& msg) {
    if (!errors.empty()) errors += "; ";
    errors += msg;
  };
  if (!(amplitude >= 0.0)) bad("amplitude must be >= 0");
  if (!(amplitude <= 254.0)) bad("amplitude must be <= 254");
  if (!(sigma_f > 0.0)) bad("sigma_f must be > 0");
  if (!(sigma_r > 0.0)) bad("sigma_r must be > 0");
  if (!(sigma_sl > 0.0)) bad("sigma_sl must be > 0");
  if (!(sigma_sr > 0.0)) bad("sigma_sr must be > 0");
  if (!errors.empty()) throw ValidationError(who + ": " + errors);
}

const PersonState* SceneState::find_person(const std::string& id) const {
  for (const auto& p : persons)
    if (p.id == id) return &p;
  return nullptr;
}

PersonState* SceneState::find_person(const std::string& id) {
  for (auto& p : persons)
    if (p.id == id) return &p;
  return nullptr;
}

const GroupState* SceneState::find_group(const std::string& id) const {
  for (const auto& g : groups)
    if (g.id == id) return &g;
  return nullptr;
}

void SceneState::validate() const {
  for (const auto& p : persons) {
    p.params.validate("person " + p.id);
    if (!std::isfinite(p.velocity.x) || !std::isfinite(p.velocity.y))
      throw ValidationError("person " + p.id + ": velocity must be finite");
  }
  std::unordered_set<std::string> grouped;
  for (const auto& g : groups) {
    g.params.validate("group " + g.id);
    if (std::abs(g.params.sigma_sl - g.params.sigma_sr) > 1e-12)
      throw ValidationError("group " + g.id + ": sigma_sl must equal sigma_sr");
    for (const auto& m : g.members) {
      if (!find_person(m))
        throw ValidationError("group " + g.id + ": member " + m + " not in scene");
      if (!grouped.insert(m).second)
        throw ValidationError("person " + m + " belongs to more than one group");
    }
  }
}

Vec2 group_velocity(const SceneState& scene, const GroupState& group) {
  Vec2 sum;
  int n = 0;
  for (const auto& id : group.members) {
    if (const PersonState* p = scene.find_person(id)) {
      sum = sum + p->velocity;
      ++n;
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : Vec2{};
}

void refresh_group_geometry(SceneState& scene, GroupState& group, const GroupModel& model) {
  std::vector<const PersonState*> members;
  for (const auto& id : group.members)
    if (const PersonState* p = scene.find_person(id)) members.push_back(p);
  if (members.empty()) return;

  Vec2 center;
  for (const auto* p : members) center = center + p->pose.position();
  center = center / static_cast<double>(members.size());

  double radius = 0.0;
  for (const auto* p : members) radius += distance(p->pose.position(), center);
  radius /= static_cast<double>(members.size());

  std::vector<double> headings;
  for (const auto* p : members)
    if (p->speed() > 1e-9) headings.push_back(p->velocity.angle());
  if (headings.empty())
    for (const auto* p : members) headings.push_back(p->pose.theta);

  group.center = center;
  group.radius = radius;
  group.orientation = circular_mean(headings);

  double sigma = std::max(model.sigma_ratio * radius, model.sigma_floor);
  group.params.amplitude = model.amplitude;
  group.params.sigma_f = sigma;
  group.params.sigma_r = sigma;
  group.params.sigma_sl = sigma;
  group.params.sigma_sr = sigma;
}

void refresh_all_groups(SceneState& scene, const GroupModel& model) {
  for (auto& g : scene.groups) refresh_group_geometry(scene, g, model);
}

double altered_asymmetric_gaussian(const Vec2& query, const Pose2D& center,
                                   const GaussianParams& params) {
  const double dx = query.x - center.x;
  const double dy = query.y - center.y;
  if (dx == 0.0 && dy == 0.0) return params.amplitude;

  const double theta = std::atan2(dy, dx);
  const double alpha = wrap_angle(theta - center.theta);
  const double sigma_x = std::abs(alpha) < kPi / 2.0 ? params.sigma_f : params.sigma_r;
  const double sigma_y = alpha < 0.0 ? params.sigma_sr : params.sigma_sl;
  const double d = std::hypot(dx, dy);

  const double fx = d * std::cos(alpha) / (2.0 * sigma_x);
  const double fy = d * std::sin(alpha) / (2.0 * sigma_y);
  return params.amplitude * std::exp(-(fx * fx + fy * fy));
}

double merged_personal_field(const SceneState& scene, const Vec2& query) {
  double best = 0.0;
  for (const auto& p : scene.persons)
    best = std::max(best, altered_asymmetric_gaussian(query, p.pose, p.params));
  return best;
}

double merged_group_field(const SceneState& scene, const Vec2& query) {
  double best = 0.0;
  for (const auto& g : scene.groups)
    best = std::max(best, altered_asymmetric_gaussian(query, g.center_pose(), g.params));
  return best;
}

double global_field(const SceneState& scene, const Vec2& query) {
  return std::max(merged_personal_field(scene, query), merged_group_field(scene, query));
}

}  // namespace socnav
