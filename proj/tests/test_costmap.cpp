#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "socnav/costmap.hpp"

using namespace socnav;

namespace {

GridSpec grid(int w, int h, double res = 0.05, Vec2 origin = {0.0, 0.0}) {
  GridSpec spec;
  spec.origin = origin;
  spec.resolution = res;
  spec.width = w;
  spec.height = h;
  return spec;
}

PersonState person_at(double x, double y, double theta, const GaussianParams& params) {
  PersonState p;
  p.id = "p";
  p.pose = make_pose(x, y, theta);
  p.params = params;
  return p;
}

// Independent per-cell recomputation of the full stack.
Costmap brute_force_compose(const Costmap& static_map, const std::vector<Vec2>& obstacles,
                            const SceneState& scene, const CostmapParams& params) {
  const GridSpec& spec = static_map.spec();
  Costmap out = static_map;

  for (const auto& p : obstacles)
    if (auto cell = spec.world_to_cell(p)) out.at(cell->i, cell->j) = kCostLethal;

  for (int j = 0; j < spec.height; ++j)
    for (int i = 0; i < spec.width; ++i) {
      if (out.at(i, j) != kCostLethal) continue;
      for (const auto& person : scene.persons)
        if (distance(spec.cell_center(i, j), person.pose.position()) <= params.clearing_radius) {
          out.at(i, j) = 0;
          break;
        }
    }

  // Inflation against the post-clean lethal set, brute min-distance over
  // integer cell deltas.
  std::vector<CellIndex> lethal;
  for (int j = 0; j < spec.height; ++j)
    for (int i = 0; i < spec.width; ++i)
      if (out.at(i, j) == kCostLethal) lethal.push_back({i, j});
  for (int j = 0; j < spec.height; ++j)
    for (int i = 0; i < spec.width; ++i) {
      std::uint8_t& cell = out.at(i, j);
      if (cell == kCostLethal || cell == kCostUnknown || lethal.empty()) continue;
      double best_sq = 1e18;
      for (const auto& c : lethal) {
        const double di = i - c.i;
        const double dj = j - c.j;
        best_sq = std::min(best_sq, di * di + dj * dj);
      }
      const double best = spec.resolution * std::sqrt(best_sq);
      std::uint8_t inflated;
      if (best <= params.inscribed_radius)
        inflated = kCostInscribed;
      else
        inflated = static_cast<std::uint8_t>(std::min(
            std::lround(252.0 * std::exp(-params.decay_rate * (best - params.inscribed_radius))),
            252L));
      cell = std::max(cell, inflated);
    }

  // Adaptive layer: rounded max field with snapped centers.
  SceneState snapped = scene;
  for (auto& p : snapped.persons) {
    const Vec2 c = spec.snap_to_cell_center(p.pose.position());
    p.pose.x = c.x;
    p.pose.y = c.y;
  }
  for (auto& g : snapped.groups) g.center = spec.snap_to_cell_center(g.center);
  for (int j = 0; j < spec.height; ++j)
    for (int i = 0; i < spec.width; ++i) {
      std::uint8_t& cell = out.at(i, j);
      if (cell == kCostUnknown) continue;
      const long v = std::lround(global_field(snapped, spec.cell_center(i, j)));
      cell = static_cast<std::uint8_t>(std::max<long>(cell, std::min(v, 254L)));
    }
  return out;
}

}  // namespace

TEST_CASE("obstacle marking") {
  auto map = make_empty_map(grid(10, 10));
  SUBCASE("empty list leaves the map alone") {
    const auto out = mark_obstacles(map, {});
    CHECK(out == map);
  }
  SUBCASE("a point in the first cell") {
    const std::vector<Vec2> pts{{0.01, 0.01}};
    const auto out = mark_obstacles(map, pts);
    CHECK(out.at(0, 0) == kCostLethal);
  }
  SUBCASE("out-of-bounds points are ignored") {
    const std::vector<Vec2> pts{{-1.0, 0.2}, {0.2, 99.0}};
    const auto out = mark_obstacles(map, pts);
    CHECK(out == map);
  }
}

TEST_CASE("clean people resets nearby lethal cells only") {
  auto map = make_empty_map(grid(20, 20));
  SceneState scene;
  scene.persons.push_back(person_at(0.525, 0.525, 0.0, GaussianParams{}));

  const std::vector<Vec2> pts{{0.525, 0.525}, {0.925, 0.525}};
  map = mark_obstacles(map, pts);

  SUBCASE("no people leaves the map alone") {
    const auto out = clean_people(map, SceneState{}, 0.45);
    CHECK(out == map);
  }
  SUBCASE("cell under the person clears, distant wall cell stays") {
    const auto out = clean_people(map, scene, 0.3);
    CHECK(out.cost_at({0.525, 0.525}) == 0);
    CHECK(out.cost_at({0.925, 0.525}) == kCostLethal);
  }
}

TEST_CASE("inflation closed form") {
  // decay 2.5 and inscribed 0.4 put the e^-1 ring exactly 16 cells out.
  auto map = make_empty_map(grid(40, 3));
  map.at(0, 1) = kCostLethal;
  const auto out = inflate(map, 0.4, 2.5);
  CHECK(out.at(0, 1) == kCostLethal);
  CHECK(out.at(1, 1) == kCostInscribed);                       // d = 0.05
  CHECK(out.at(8, 1) == kCostInscribed);                       // d = 0.40
  CHECK(out.at(16, 1) == std::lround(252.0 / std::exp(1.0)));  // d = 0.8 -> 93
  const auto untouched = inflate(make_empty_map(grid(8, 8)), 0.4, 2.5);
  CHECK(untouched == make_empty_map(grid(8, 8)));
}

TEST_CASE("adaptive layer basics") {
  auto map = make_empty_map(grid(60, 60));
  SUBCASE("empty scene: unchanged") {
    CHECK(apply_adaptive_layer(map, SceneState{}) == map);
  }
  SUBCASE("amplitude lands at the person's cell, far cells untouched") {
    SceneState scene;
    scene.persons.push_back(
        person_at(1.525, 1.525, 0.0, GaussianParams{211.0, 0.3, 0.3, 0.3, 0.3}));
    const auto out = apply_adaptive_layer(map, scene);
    CHECK(out.cost_at({1.525, 1.525}) == 211);
    CHECK(out.cost_at({2.975, 0.025}) == 0);
  }
  SUBCASE("never lowers a cell") {
    auto prefilled = map;
    prefilled.at(30, 30) = 80;
    SceneState scene;
    scene.persons.push_back(
        person_at(1.525, 1.525, 0.0, GaussianParams{60.0, 2.0, 2.0, 2.0, 2.0}));
    const auto out = apply_adaptive_layer(prefilled, scene);
    CHECK(out.at(30, 30) >= 80);
  }
}

TEST_CASE("static map rasterization with a golden corridor") {
  // 10x10 corridor: full walls on the two long sides, one gray unknown pixel.
  const char* pgm_path = "corridor_test.pgm";
  const char* meta_path = "corridor_test.json";
  {
    std::ofstream pgm(pgm_path);
    pgm << "P2\n# corridor fixture\n10 10\n255\n";
    for (int row = 0; row < 10; ++row) {
      for (int col = 0; col < 10; ++col) {
        int px = 255;
        if (row == 0 || row == 9) px = 0;
        if (row == 4 && col == 9) px = 128;
        pgm << px << (col + 1 < 10 ? ' ' : '\n');
      }
    }
    std::ofstream meta(meta_path);
    meta << "{\"origin\": [0, 0], \"resolution\": 0.1}\n";
  }
  const auto map = rasterize_static(pgm_path, meta_path);
  CHECK(map.spec().width == 10);
  CHECK(map.spec().height == 10);
  // Image row 0 is the top of the map: j = height-1.
  for (int i = 0; i < 10; ++i) {
    CHECK(map.at(i, 9) == kCostLethal);
    CHECK(map.at(i, 0) == kCostLethal);
    CHECK(map.at(i, 5) == (i == 9 ? kCostUnknown : 0));
  }
  std::remove(pgm_path);
  std::remove(meta_path);

  CHECK_THROWS_AS(rasterize_static("missing.pgm", "missing.json"), IoError);
}

TEST_CASE("compose equals brute-force per-cell recomputation") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> coord(0.3, 4.7);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> sigma(0.15, 0.9);
  std::uniform_int_distribution<int> count(0, 3);

  CostmapParams params;
  for (int trial = 0; trial < 6; ++trial) {
    auto static_map = make_empty_map(grid(100, 100));
    std::vector<Vec2> obstacles;
    for (int k = 0; k < count(rng) + 1; ++k) obstacles.push_back({coord(rng), coord(rng)});

    SceneState scene;
    for (int k = 0; k < count(rng); ++k) {
      GaussianParams gp{211.0, sigma(rng), sigma(rng), sigma(rng), sigma(rng)};
      scene.persons.push_back(person_at(coord(rng), coord(rng), angle(rng), gp));
    }
    if (count(rng) > 1) {
      GroupState g;
      g.id = "g0";
      g.center = {coord(rng), coord(rng)};
      g.radius = 0.6;
      g.orientation = angle(rng);
      const double s = sigma(rng);
      g.params = GaussianParams{211.0, s, s, s, s};
      scene.groups.push_back(g);
    }

    const auto fast = compose(static_map, obstacles, scene, params);
    const auto oracle = brute_force_compose(static_map, obstacles, scene, params);
    REQUIRE(fast.cells().size() == oracle.cells().size());
    CHECK(fast == oracle);
  }
}

TEST_CASE("person standing on a marked obstacle shows gaussian cost, not a lethal ring") {
  auto static_map = make_empty_map(grid(20, 20));
  SceneState scene;
  const Vec2 c{0.525, 0.525};
  scene.persons.push_back(person_at(c.x, c.y, 0.0, GaussianParams{211.0, 0.4, 0.4, 0.4, 0.4}));
  const std::vector<Vec2> obstacles{c};
  CostmapParams params;
  const auto out = compose(static_map, obstacles, scene, params);
  CHECK(out.cost_at(c) == 211);  // gaussian amplitude, not 254
  // Neighborhood carries decayed gaussian, not the inscribed plateau.
  CHECK(out.cost_at({c.x + 0.3, c.y}) < kCostInscribed);
}

TEST_CASE("sub-cell motion leaves the composed grid unchanged") {
  auto static_map = make_empty_map(grid(80, 80));
  CostmapParams params;
  SceneState scene;
  scene.persons.push_back(person_at(2.025, 2.025, 0.7, GaussianParams{211.0, 0.8, 0.5, 0.4, 0.4}));

  const auto before = compose(static_map, {}, scene, params);
  scene.persons[0].pose.x += 0.02;
  scene.persons[0].pose.y -= 0.015;
  const auto after = compose(static_map, {}, scene, params);
  CHECK(before == after);
}

TEST_CASE("shrinking any sigma never raises a cell") {
  auto static_map = make_empty_map(grid(80, 80));
  CostmapParams params;
  SceneState scene;
  scene.persons.push_back(person_at(2.025, 2.025, 0.4, GaussianParams{211.0, 1.0, 0.6, 0.5, 0.5}));
  const auto before = compose(static_map, {}, scene, params);
  scene.persons[0].params.sigma_sl = 0.3;
  scene.persons[0].params.sigma_f = 0.8;
  const auto after = compose(static_map, {}, scene, params);
  for (std::size_t k = 0; k < before.cells().size(); ++k)
    CHECK(after.cells()[k] <= before.cells()[k]);
}

TEST_CASE("binary P5 maps load the same as P2") {
  const char* meta_path = "p5_test.json";
  {
    std::ofstream meta(meta_path);
    meta << "{\"origin\": [0, 0], \"resolution\": 0.1}\n";
  }
  {
    std::ofstream pgm("p5_test.pgm", std::ios::binary);
    pgm << "P5\n4 2\n255\n";
    const unsigned char pixels[] = {0, 255, 128, 255, 255, 0, 255, 210};
    pgm.write(reinterpret_cast<const char*>(pixels), sizeof(pixels));
  }
  const auto map = rasterize_static("p5_test.pgm", meta_path);
  // Image row 0 is the top (j = 1).
  CHECK(map.at(0, 1) == kCostLethal);
  CHECK(map.at(1, 1) == 0);
  CHECK(map.at(2, 1) == kCostUnknown);
  CHECK(map.at(1, 0) == kCostLethal);
  CHECK(map.at(3, 0) == 0);
  std::remove("p5_test.pgm");
  std::remove(meta_path);
}

TEST_CASE("csv dump is row-major top-down") {
  auto map = make_empty_map(grid(3, 2, 0.1));
  map.at(0, 0) = 7;
  map.at(2, 1) = kCostLethal;
  write_costmap_csv(map, "csv_test.csv");
  std::ifstream in("csv_test.csv");
  std::string top, bottom;
  std::getline(in, top);
  std::getline(in, bottom);
  CHECK(top == "0,0,254");
  CHECK(bottom == "7,0,0");
  std::remove("csv_test.csv");
}

TEST_CASE("binary round trip preserves the grid") {
  auto map = make_empty_map(grid(33, 17, 0.1, {1.0, -2.0}));
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> value(0, 254);
  for (int j = 0; j < 17; ++j)
    for (int i = 0; i < 33; ++i) map.at(i, j) = static_cast<std::uint8_t>(value(rng));
  write_costmap_binary(map, "roundtrip_test.bin");
  const auto back = read_costmap_binary("roundtrip_test.bin");
  CHECK(back.spec().width == 33);
  CHECK(back.spec().height == 17);
  CHECK(back.cells() == map.cells());
  std::remove("roundtrip_test.bin");
}
