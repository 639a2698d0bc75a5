#include "socnav/approach.hpp"

#include <algorithm>
#include <cmath>

namespace socnav {

void ApproachConfig::validate() const {
  std::string errors;
  auto bad = [&](const char* msg) {
    if (!errors.empty()) errors += "; ";
    errors += msg;
  };
  if (!(free_threshold > 0.0)) bad("free_threshold must be > 0");
  if (!(initial_radius_person > 0.0)) bad("initial_radius_person must be > 0");
  if (!(step > 0.0)) bad("step must be > 0");
  if (!(f_mod > 0.0)) bad("f_mod must be > 0");
  if (!(f_ifov > 0.0)) bad("f_ifov must be > 0");
  if (!(max_radius >= 0.0)) bad("max_radius must be >= 0");
  if (!(track_threshold > 0.0)) bad("track_threshold must be > 0");
  if (min_samples < 4) bad("min_samples must be >= 4");
  if (d_a_limit < 0.0 || a_a_adapt < 0.0 || a_a_limit < 0.0 || v_mod < 0.0)
    bad("velocity terms must be >= 0");
  if (!errors.empty()) throw ValidationError("approach config: " + errors);
}

double ApproachZone::width(double radius, double spacing) const {
  if (samples.size() < 2) return 0.0;
  const double span = spacing * static_cast<double>(samples.size() - 1);
  return 2.0 * radius * std::sin(std::min(span, kPi) / 2.0);
}

std::vector<CircumferenceSample> sample_circumference(const Costmap& map, const Vec2& center,
                                                      double radius, int n_samples,
                                                      double free_threshold) {
  std::vector<CircumferenceSample> samples;
  samples.reserve(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double angle = 2.0 * kPi * k / n_samples;
    CircumferenceSample s;
    s.index = k;
    s.angle = angle;
    s.position = center + radius * unit_from_angle(angle);
    s.cost = map.cost_at(s.position);
    s.free = s.cost < free_threshold && s.cost < kCostInscribed;
    samples.push_back(s);
  }
  return samples;
}

std::vector<ApproachZone> extract_zones(const std::vector<CircumferenceSample>& samples) {
  std::vector<ApproachZone> zones;
  const int n = static_cast<int>(samples.size());
  if (n == 0) return zones;

  int start = -1;
  for (int k = 0; k < n; ++k) {
    if (samples[k].free) {
      if (start < 0) start = k;
    } else if (start >= 0) {
      ApproachZone z;
      z.zone_id = static_cast<int>(zones.size());
      z.samples.assign(samples.begin() + start, samples.begin() + k);
      zones.push_back(std::move(z));
      start = -1;
    }
  }
  if (start >= 0) {
    ApproachZone z;
    z.samples.assign(samples.begin() + start, samples.end());
    // A trailing run merges with a leading one across the angular seam.
    if (!zones.empty() && samples.front().free && zones.front().samples.front().index == 0 &&
        start != 0) {
      z.samples.insert(z.samples.end(), zones.front().samples.begin(),
                       zones.front().samples.end());
      zones.erase(zones.begin());
    }
    z.zone_id = 0;
    zones.insert(zones.begin(), std::move(z));
    for (std::size_t i = 0; i < zones.size(); ++i) zones[i].zone_id = static_cast<int>(i);
  }
  return zones;
}

namespace {

std::vector<const PersonState*> involved_people(const SceneState& scene, const TargetRef& target) {
  std::vector<const PersonState*> people;
  if (target.kind == TargetRef::Kind::Person) {
    if (const PersonState* p = scene.find_person(target.id)) people.push_back(p);
  } else if (target.kind == TargetRef::Kind::Group) {
    if (const GroupState* g = scene.find_group(target.id))
      for (const auto& id : g->members)
        if (const PersonState* p = scene.find_person(id)) people.push_back(p);
  }
  return people;
}

bool in_everyones_fov(const Vec2& point, const std::vector<const PersonState*>& people,
                      double fov) {
  for (const auto* p : people) {
    const double bearing = (point - p->pose.position()).angle();
    if (std::abs(wrap_angle(bearing - p->pose.theta)) > fov / 2.0) return false;
  }
  return true;
}

}  // namespace

FovFilterResult filter_fov(const std::vector<ApproachZone>& zones, const SceneState& scene,
                           const TargetRef& target, double fov) {
  const auto people = involved_people(scene, target);
  FovFilterResult result;
  for (const auto& zone : zones) {
    ApproachZone current;
    auto flush = [&]() {
      if (!current.samples.empty()) {
        current.zone_id = static_cast<int>(result.zones.size());
        result.zones.push_back(std::move(current));
        current = ApproachZone{};
      }
    };
    for (const auto& s : zone.samples) {
      if (in_everyones_fov(s.position, people, fov))
        current.samples.push_back(s);
      else
        flush();
    }
    flush();
  }
  if (result.zones.empty()) {
    result.zones = zones;
    result.fallback = true;
  }
  return result;
}

std::vector<ApproachZone> filter_width(const std::vector<ApproachZone>& zones, double s_r,
                                       double radius, double spacing) {
  std::vector<ApproachZone> keep;
  for (const auto& z : zones)
    if (z.width(radius, spacing) >= s_r) keep.push_back(z);
  return keep;
}

double narrowed_fov(const ApproachConfig& cfg, double approach_radius, double base_radius) {
  if (base_radius <= 0.0 || approach_radius <= 0.0) return cfg.f_ifov;
  const double fov = cfg.f_ifov / (cfg.f_mod * approach_radius / base_radius);
  return std::min(fov, cfg.f_ifov);
}

double velocity_scaled_step(const ApproachConfig& cfg, double velocity_magnitude) {
  return std::max(cfg.step, cfg.step * velocity_magnitude * cfg.v_mod);
}

double expanded_radius_limit(const ApproachConfig& cfg, double velocity_magnitude,
                             double robot_distance) {
  double d_mod = 1.0;
  if (robot_distance <= cfg.d_a_limit) {
    d_mod = cfg.d_a_limit > 0.0 ? std::min(1.0, 2.0 * robot_distance / cfg.d_a_limit) : 1.0;
  }
  const double grown = cfg.max_radius * (1.0 + d_mod * cfg.a_a_adapt * velocity_magnitude);
  return std::min(cfg.max_radius + cfg.a_a_limit, grown);
}

namespace {

struct TargetInfo {
  Vec2 center;
  double initial_radius = 0.0;
  double velocity = 0.0;
  bool valid = false;
};

TargetInfo resolve_target(const SceneState& scene, const TargetRef& target,
                          const ApproachConfig& cfg) {
  TargetInfo info;
  if (target.kind == TargetRef::Kind::Person) {
    const PersonState* p = scene.find_person(target.id);
    if (!p) return info;
    info.center = p->pose.position();
    // Searching inside the (possibly velocity-grown) frontal space is futile,
    // so the configured floor is raised to the current frontal sigma.
    info.initial_radius = std::max(cfg.initial_radius_person, p->params.sigma_f);
    info.velocity = p->speed();
    info.valid = true;
  } else if (target.kind == TargetRef::Kind::Group) {
    const GroupState* g = scene.find_group(target.id);
    if (!g) return info;
    info.center = g->center;
    info.initial_radius = std::max(g->radius, 1e-6);
    info.velocity = group_velocity(scene, *g).norm();
    info.valid = true;
  }
  return info;
}

}  // namespace

ApproachResult estimate_approach_pose(const Costmap& map, const SceneState& scene,
                                      const TargetRef& target, const Pose2D& robot_pose,
                                      const ApproachConfig& cfg, double s_r,
                                      bool velocity_features,
                                      std::optional<double> person_initial_radius) {
  ApproachResult result;
  TargetInfo info = resolve_target(scene, target, cfg);
  if (!info.valid) return result;
  if (target.kind == TargetRef::Kind::Person && person_initial_radius)
    info.initial_radius = std::max(*person_initial_radius, cfg.initial_radius_person);

  const double v = velocity_features ? info.velocity : 0.0;
  const double robot_distance = distance(robot_pose.position(), info.center);
  const double step = velocity_features ? velocity_scaled_step(cfg, v) : cfg.step;
  const double expansion =
      velocity_features ? expanded_radius_limit(cfg, v, robot_distance) : cfg.max_radius;
  const double radius_cap = info.initial_radius + expansion;

  for (double radius = info.initial_radius; radius <= radius_cap + 1e-9; radius += step) {
    const int n = std::max(cfg.min_samples,
                           static_cast<int>(std::ceil(2.0 * kPi * radius / map.spec().resolution)));
    const double spacing = 2.0 * kPi / n;

    RadiusDiagnostics diag;
    diag.radius = radius;
    diag.n_samples = n;

    const auto samples = sample_circumference(map, info.center, radius, n, cfg.free_threshold);
    for (const auto& s : samples) diag.free_samples += s.free ? 1 : 0;

    auto zones = extract_zones(samples);
    diag.zones = static_cast<int>(zones.size());

    const double fov =
        velocity_features ? narrowed_fov(cfg, radius, info.initial_radius) : cfg.f_ifov;
    FovFilterResult fov_result = filter_fov(zones, scene, target, fov);
    diag.fov_fallback = fov_result.fallback;
    diag.zones_after_fov = static_cast<int>(fov_result.zones.size());

    const auto valid = filter_width(fov_result.zones, s_r, radius, spacing);
    diag.zones_after_width = static_cast<int>(valid.size());
    result.radii.push_back(diag);

    if (valid.empty()) continue;

    const CircumferenceSample* best = nullptr;
    int best_zone = 0;
    double best_dist = 0.0;
    for (const auto& zone : valid) {
      for (const auto& s : zone.samples) {
        const double d = distance(s.position, robot_pose.position());
        if (!best || d < best_dist - 1e-12 ||
            (std::abs(d - best_dist) <= 1e-12 && s.index < best->index)) {
          best = &s;
          best_zone = zone.zone_id;
          best_dist = d;
        }
      }
    }
    ApproachPose pose;
    pose.position = best->position;
    pose.heading = (info.center - best->position).angle();
    pose.radius_used = radius;
    pose.zone_id = best_zone;
    result.pose = pose;
    return result;
  }
  return result;
}

TrackResult track_target(const SceneState& scene, const Vec2& last_target_center,
                         double track_threshold) {
  TrackResult result;
  double best = track_threshold;
  for (const auto& g : scene.groups) {
    const double d = distance(g.center, last_target_center);
    if (d <= best) {
      best = d;
      result.lost = false;
      result.target = TargetRef::group(g.id);
      result.center = g.center;
    }
  }
  for (const auto& p : scene.persons) {
    const double d = distance(p.pose.position(), last_target_center);
    if (d < best) {
      best = d;
      result.lost = false;
      result.target = TargetRef::person(p.id);
      result.center = p.pose.position();
    }
  }
  return result;
}

double approach_perimeter(const Costmap& map, const SceneState& scene,
                          const std::string& group_id, const ApproachConfig& cfg) {
  const GroupState* group = scene.find_group(group_id);
  if (!group || group->radius <= 0.0) return 0.0;

  const double radius = group->radius;
  const int n = std::max(cfg.min_samples,
                         static_cast<int>(std::ceil(2.0 * kPi * radius / map.spec().resolution)));
  const double spacing = 2.0 * kPi / n;

  const auto samples = sample_circumference(map, group->center, radius, n, cfg.free_threshold);

  double arc = 0.0;
  for (const auto& z : extract_zones(samples)) arc += z.arc_angle(spacing) * radius;
  return arc;
}

}  // namespace socnav
