#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "socnav/adaptation.hpp"

using namespace socnav;

namespace {

PersonState make_member(const std::string& id, double x, double y, double theta,
                        double sigma_side = 0.4) {
  PersonState p;
  p.id = id;
  p.pose = make_pose(x, y, theta);
  p.params = GaussianParams{211.0, 1.2, 0.6, sigma_side, sigma_side};
  return p;
}

// Four people equidistant on a ring, all facing the center.
SceneState ring_scene(double radius, double sigma_side = 0.4) {
  SceneState scene;
  GroupState group;
  group.id = "g0";
  for (int k = 0; k < 4; ++k) {
    const double ang = k * kPi / 2.0;
    auto p = make_member("p" + std::to_string(k), radius * std::cos(ang), radius * std::sin(ang),
                         wrap_angle(ang + kPi), sigma_side);
    group.members.push_back(p.id);
    scene.persons.push_back(std::move(p));
  }
  group.center = {0.0, 0.0};
  group.radius = radius;
  group.params = GaussianParams{211.0, radius / 2.0, radius / 2.0, radius / 2.0, radius / 2.0};
  scene.groups.push_back(std::move(group));
  return scene;
}

}  // namespace

TEST_CASE("individual frontal shrink") {
  AdaptationConfig cfg;
  GaussianParams params;
  SUBCASE("plain shrink by zeta") {
    params.sigma_f = 1.2;
    CHECK(adapt_individual_target(params, cfg).sigma_f == doctest::Approx(0.9).epsilon(1e-12));
  }
  SUBCASE("intimate floor binds") {
    params.sigma_f = 0.5;
    CHECK(adapt_individual_target(params, cfg).sigma_f == doctest::Approx(0.45).epsilon(1e-12));
  }
  SUBCASE("never increases") {
    params.sigma_f = 0.4;
    CHECK(adapt_individual_target(params, cfg).sigma_f == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("only sigma_f changes") {
    params.sigma_f = 1.2;
    const auto out = adapt_individual_target(params, cfg);
    CHECK(out.sigma_r == params.sigma_r);
    CHECK(out.sigma_sl == params.sigma_sl);
    CHECK(out.sigma_sr == params.sigma_sr);
    CHECK(out.amplitude == params.amplitude);
  }
}

TEST_CASE("side anchor points") {
  const Pose2D neighbor = make_pose(0.0, 0.0, 0.0);
  SUBCASE("facing +x") {
    const auto p = make_member("p", 0.0, 0.0, 0.0);
    const auto a = side_anchor_points(p, neighbor, neighbor, 0.375);
    CHECK(a.a_left.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.a_left.y == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(a.a_right.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.a_right.y == doctest::Approx(-0.375).epsilon(1e-12));
  }
  SUBCASE("facing +y puts the left anchor at -x") {
    const auto p = make_member("p", 0.0, 0.0, kPi / 2.0);
    const auto a = side_anchor_points(p, neighbor, neighbor, 0.375);
    CHECK(a.a_left.x == doctest::Approx(-0.375).epsilon(1e-12));
    CHECK(a.a_left.y == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("zero clearance collapses onto the people") {
    const auto p = make_member("p", 1.0, 2.0, 0.3);
    const auto left = make_pose(4.0, 5.0, 1.0);
    const auto right = make_pose(-2.0, 0.5, -1.0);
    const auto a = side_anchor_points(p, left, right, 0.0);
    CHECK(a.a_left.x == doctest::Approx(1.0));
    CHECK(a.a_left.y == doctest::Approx(2.0));
    CHECK(a.a_l_adj.x == doctest::Approx(4.0));
    CHECK(a.a_r_adj.x == doctest::Approx(-2.0));
  }
}

TEST_CASE("group member lateral adaptation") {
  AdaptationConfig cfg;  // s_h 0.375, s_r 0.8

  SUBCASE("side-by-side pair two meters apart") {
    // Orientation difference 0 sits outside the default gate; the example
    // exercises the anchor arithmetic, so the gate is opened for it.
    cfg.orientation_diff_min = -0.01;
    auto a = make_member("a", 0.0, 0.0, 0.0, 1.0);
    auto b = make_member("b", 0.0, 2.0, 0.0, 1.0);
    const auto out = adapt_group_member(a, &b, nullptr, cfg);
    // Anchor gap 2.0 - 0.75 = 1.25; the boundary lands s_h + 0.225 = 0.6.
    CHECK(out.sigma_sl == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(out.sigma_sr == a.params.sigma_sr);  // no right neighbor
    CHECK(out.sigma_f == a.params.sigma_f);
    CHECK(out.sigma_r == a.params.sigma_r);
  }

  SUBCASE("pair 1.5 m apart stays unchanged at default gate") {
    auto a = make_member("a", 0.0, 0.0, 0.0, 1.0);
    auto b = make_member("b", 0.0, 1.5, 0.0, 1.0);
    const auto out = adapt_group_member(a, &b, nullptr, cfg);
    CHECK(out == a.params);
  }

  SUBCASE("tiny projected distance floors at half the human width") {
    cfg.orientation_diff_min = -0.01;
    // Neighbor close enough that the centered robot edge retreats inside the
    // lateral floor.
    auto a = make_member("a", 0.0, 0.0, 0.0, 1.0);
    auto b = make_member("b", 0.0, 0.85, 0.0, 1.0);
    const auto out = adapt_group_member(a, &b, nullptr, cfg);
    CHECK(out.sigma_sl == doctest::Approx(0.225).epsilon(1e-12));
  }
}

TEST_CASE("ring adaptation matches the worked geometry") {
  AdaptationConfig cfg;

  SUBCASE("radius 0.75: all lateral sigmas shrink to the centered-robot edge") {
    const auto scene = ring_scene(0.75);
    const auto adapted = adapt_group(scene, "g0", cfg);
    // anchor gap (0.75 - 0.375) sqrt(2), margin is negative, boundary at
    // 0.375 - (s_r - gap)/2 projected = 0.27965...
    const double expected = 0.375 + 0.5 * ((0.75 - 0.375) * std::sqrt(2.0) - 0.8) / std::sqrt(2.0);
    for (const auto& p : adapted.persons) {
      CHECK(p.params.sigma_sl == doctest::Approx(expected).epsilon(1e-9));
      CHECK(p.params.sigma_sr == doctest::Approx(expected).epsilon(1e-9));
      CHECK(p.params.sigma_f == 1.2);
      CHECK(p.params.sigma_r == 0.6);
    }
    CHECK(expected < 0.4);
  }

  SUBCASE("radius 0.5: members too close, nothing changes") {
    const auto scene = ring_scene(0.5);
    const auto adapted = adapt_group(scene, "g0", cfg);
    for (std::size_t i = 0; i < scene.persons.size(); ++i)
      CHECK(adapted.persons[i].params == scene.persons[i].params);
  }

  SUBCASE("radius 1.0: projected boundary exceeds the sigma, nothing changes") {
    const auto scene = ring_scene(1.0);
    const auto adapted = adapt_group(scene, "g0", cfg);
    for (std::size_t i = 0; i < scene.persons.size(); ++i)
      CHECK(adapted.persons[i].params == scene.persons[i].params);
  }

  SUBCASE("single-member group is untouched") {
    SceneState scene;
    scene.persons.push_back(make_member("a", 0.0, 0.0, 0.0));
    GroupState g;
    g.id = "g0";
    g.members = {"a"};
    scene.groups.push_back(g);
    const auto adapted = adapt_group(scene, "g0", cfg);
    CHECK(adapted.persons[0].params == scene.persons[0].params);
  }

  SUBCASE("two-member group adapts the shared side only") {
    // L-shaped pair looking at a common focal point; orientations are 90
    // degrees apart so the gate passes.
    SceneState scene;
    auto a = make_member("a", 0.0, 0.0, kPi / 4.0, 1.0);
    auto b = make_member("b", 1.2, 0.0, 3.0 * kPi / 4.0, 1.0);
    GroupState g;
    g.id = "g0";
    g.members = {"a", "b"};
    g.center = {0.6, 0.0};
    scene.persons = {a, b};
    scene.groups.push_back(g);
    const auto adapted = adapt_group(scene, "g0", cfg);
    const auto& pa = adapted.find_person("a")->params;
    CHECK(pa.sigma_sr < 1.0);          // partner sits on a's right
    CHECK(pa.sigma_sl == 1.0);         // off side untouched
    const auto& pb = adapted.find_person("b")->params;
    CHECK(pb.sigma_sl < 1.0);          // and on b's left
    CHECK(pb.sigma_sr == 1.0);
  }
}

TEST_CASE("velocity adaptation arithmetic") {
  VelocityAdaptConfig cfg;  // a_adapt 1.5, a_limit 1.0, d_limit 6.0
  SUBCASE("at rest nothing changes") {
    CHECK(adapt_velocity(0.8, 0.0, 100.0, cfg) == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("far away, unit speed: additive cap binds") {
    cfg.a_adapt = 1.5;
    cfg.a_limit = 1.0;
    CHECK(adapt_velocity(1.0, 1.0, 100.0, cfg) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("quarter distance halves the modulation") {
    CHECK(adapt_velocity(1.0, 1.0, cfg.d_limit / 4.0, cfg) ==
          doctest::Approx(1.75).epsilon(1e-12));
  }
}

TEST_CASE("adaptation monotonicity and floors over random draws") {
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> sigma(0.05, 3.0);
  std::uniform_real_distribution<double> speed(0.0, 3.0);
  std::uniform_real_distribution<double> dist(0.0, 12.0);
  AdaptationConfig acfg;
  VelocityAdaptConfig vcfg;

  for (int trial = 0; trial < 10000; ++trial) {
    GaussianParams params{211.0, sigma(rng), sigma(rng), sigma(rng), sigma(rng)};
    const auto shrunk = adapt_individual_target(params, acfg);
    CHECK(shrunk.sigma_f <= params.sigma_f);
    if (shrunk.sigma_f < params.sigma_f) CHECK(shrunk.sigma_f >= acfg.intimate_radius);

    const double v = speed(rng);
    const double d = dist(rng);
    const double grown = adapt_velocity(params.sigma_f, v, d, vcfg);
    CHECK(grown >= params.sigma_f);
    CHECK(grown <= params.sigma_f + vcfg.a_limit + 1e-12);

    // Monotone in v and in d up to the saturation distance.
    const double grown_faster = adapt_velocity(params.sigma_f, v + 0.3, d, vcfg);
    CHECK(grown_faster >= grown - 1e-12);
    if (d + 0.5 <= vcfg.d_limit) {
      const double grown_farther = adapt_velocity(params.sigma_f, v, d + 0.5, vcfg);
      CHECK(grown_farther >= grown - 1e-12);
    }
  }
}

TEST_CASE("group adaptation never increases sigma, is idempotent, dominates pointwise") {
  std::mt19937 rng(131);
  std::uniform_real_distribution<double> radius(0.45, 1.4);
  std::uniform_real_distribution<double> side(0.25, 1.2);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  AdaptationConfig cfg;

  for (int trial = 0; trial < 60; ++trial) {
    auto scene = ring_scene(radius(rng), side(rng));
    const double ox = coord(rng), oy = coord(rng);
    for (auto& p : scene.persons) {
      p.pose.x += ox;
      p.pose.y += oy;
    }
    scene.groups[0].center = {ox, oy};

    const auto once = adapt_group(scene, "g0", cfg);
    for (std::size_t i = 0; i < scene.persons.size(); ++i) {
      CHECK(once.persons[i].params.sigma_sl <= scene.persons[i].params.sigma_sl);
      CHECK(once.persons[i].params.sigma_sr <= scene.persons[i].params.sigma_sr);
      CHECK(once.persons[i].params.sigma_sl >= cfg.half_human_width - 1e-12);
    }

    const auto twice = adapt_group(once, "g0", cfg);
    for (std::size_t i = 0; i < scene.persons.size(); ++i)
      CHECK(twice.persons[i].params == once.persons[i].params);

    for (int q = 0; q < 25; ++q) {
      const Vec2 query{coord(rng) * 2.0, coord(rng) * 2.0};
      CHECK(global_field(once, query) <= global_field(scene, query) + 1e-12);
    }
  }
}

TEST_CASE("adaptation pipeline order") {
  AdaptationConfig acfg;
  VelocityAdaptConfig vcfg;
  SceneState scene;
  auto p = make_member("walker", 0.0, 0.0, 0.0);
  p.velocity = {1.5, 0.0};
  scene.persons.push_back(p);

  const Pose2D robot = make_pose(10.0, 0.0, kPi);

  SUBCASE("velocity then target shrink") {
    const auto adapted = adapt_scene(scene, robot, TargetRef::person("walker"), {true, true},
                                     acfg, vcfg);
    // 1.2 grows to min(2.2, 1.2 * 3.25) = 2.2, then shrinks by zeta.
    CHECK(adapted.persons[0].params.sigma_f == doctest::Approx(1.9).epsilon(1e-12));
  }
  SUBCASE("base off leaves the shrink out") {
    const auto adapted = adapt_scene(scene, robot, TargetRef::person("walker"), {false, true},
                                     acfg, vcfg);
    CHECK(adapted.persons[0].params.sigma_f == doctest::Approx(2.2).epsilon(1e-12));
  }
  SUBCASE("all off returns the baseline") {
    const auto adapted = adapt_scene(scene, robot, TargetRef::person("walker"), {false, false},
                                     acfg, vcfg);
    CHECK(adapted.persons[0].params == scene.persons[0].params);
  }
}
