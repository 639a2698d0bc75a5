#include "socnav/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace socnav {

void GridSpec::validate() const {
  if (!(resolution > 0.0)) throw ValidationError("grid: resolution must be > 0");
  if (width <= 0 || height <= 0) throw ValidationError("grid: width and height must be > 0");
}

std::optional<CellIndex> GridSpec::world_to_cell(const Vec2& p) const {
  const int i = static_cast<int>(std::floor((p.x - origin.x) / resolution));
  const int j = static_cast<int>(std::floor((p.y - origin.y) / resolution));
  if (!in_bounds(i, j)) return std::nullopt;
  return CellIndex{i, j};
}

Vec2 GridSpec::snap_to_cell_center(const Vec2& p) const {
  const double i = std::floor((p.x - origin.x) / resolution);
  const double j = std::floor((p.y - origin.y) / resolution);
  return {origin.x + (i + 0.5) * resolution, origin.y + (j + 0.5) * resolution};
}

std::uint8_t Costmap::cost_at(const Vec2& p) const {
  const auto cell = spec_.world_to_cell(p);
  if (!cell) return kCostUnknown;
  return at(cell->i, cell->j);
}

Costmap make_empty_map(const GridSpec& spec) {
  spec.validate();
  return Costmap(spec, 0);
}

namespace {

int read_pgm_token(std::istream& in) {
  // Skips whitespace and '#' comment lines.
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

}  // namespace

Costmap rasterize_static(const std::string& pgm_path, const std::string& meta_path) {
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw IoError("cannot open map metadata: " + meta_path);
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed map metadata " + meta_path + ": " + e.what());
  }
  if (!meta.contains("origin") || !meta.contains("resolution"))
    throw IoError("map metadata must define origin and resolution: " + meta_path);

  std::ifstream in(pgm_path, std::ios::binary);
  if (!in) throw IoError("cannot open map image: " + pgm_path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw IoError("unsupported PGM magic in " + pgm_path);

  const int width = read_pgm_token(in);
  const int height = read_pgm_token(in);
  const int maxval = read_pgm_token(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
    throw IoError("malformed PGM header in " + pgm_path);

  std::vector<int> pixels(static_cast<std::size_t>(width) * height);
  if (magic == "P2") {
    for (auto& px : pixels) {
      px = read_pgm_token(in);
      if (px < 0) throw IoError("truncated PGM data in " + pgm_path);
    }
  } else {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(pixels.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw IoError("truncated PGM data in " + pgm_path);
    for (std::size_t k = 0; k < raw.size(); ++k) pixels[k] = raw[k];
  }

  GridSpec spec;
  spec.origin = {meta["origin"][0].get<double>(), meta["origin"][1].get<double>()};
  spec.resolution = meta["resolution"].get<double>();
  spec.width = width;
  spec.height = height;
  spec.validate();

  Costmap map(spec, 0);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      // Image row 0 is the top of the map.
      const int px = pixels[static_cast<std::size_t>(height - 1 - j) * width + i];
      std::uint8_t cost = 0;
      if (px <= 50)
        cost = kCostLethal;
      else if (px < 200)
        cost = kCostUnknown;
      map.at(i, j) = cost;
    }
  }
  return map;
}

Costmap mark_obstacles(Costmap map, std::span<const Vec2> points) {
  for (const auto& p : points) {
    if (auto cell = map.spec().world_to_cell(p)) map.at(cell->i, cell->j) = kCostLethal;
  }
  return map;
}

Costmap clean_people(Costmap map, const SceneState& scene, double clearing_radius) {
  if (scene.persons.empty()) return map;
  const GridSpec& spec = map.spec();
  const double r2 = clearing_radius * clearing_radius;
  for (const auto& person : scene.persons) {
    const Vec2 c = person.pose.position();
    const int i0 = static_cast<int>(std::floor((c.x - clearing_radius - spec.origin.x) / spec.resolution));
    const int i1 = static_cast<int>(std::ceil((c.x + clearing_radius - spec.origin.x) / spec.resolution));
    const int j0 = static_cast<int>(std::floor((c.y - clearing_radius - spec.origin.y) / spec.resolution));
    const int j1 = static_cast<int>(std::ceil((c.y + clearing_radius - spec.origin.y) / spec.resolution));
    for (int j = std::max(0, j0); j <= std::min(spec.height - 1, j1); ++j) {
      for (int i = std::max(0, i0); i <= std::min(spec.width - 1, i1); ++i) {
        if (map.at(i, j) != kCostLethal) continue;
        if ((spec.cell_center(i, j) - c).norm_sq() <= r2) map.at(i, j) = 0;
      }
    }
  }
  return map;
}

std::vector<double> squared_distance_to_lethal(const Costmap& map) {
  // Felzenszwalb & Huttenlocher two-pass exact EDT on the lethal mask.
  const int w = map.spec().width;
  const int h = map.spec().height;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> dist(static_cast<std::size_t>(w) * h, kInf);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      if (map.at(i, j) == kCostLethal) dist[static_cast<std::size_t>(j) * w + i] = 0.0;

  const auto transform_1d = [](const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
      if (f[q] == kInf) continue;
      if (f[v[0]] == kInf) {
        v[0] = q;
        continue;
      }
      double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      while (s <= z[k]) {
        --k;
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
      if (f[v[0]] == kInf) {
        d[q] = kInf;
        continue;
      }
      while (z[k + 1] < q) ++k;
      const double dq = q - v[k];
      d[q] = dq * dq + f[v[k]];
    }
  };

  std::vector<double> col_in(h), col_out(h);
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < h; ++j) col_in[j] = dist[static_cast<std::size_t>(j) * w + i];
    transform_1d(col_in, col_out);
    for (int j = 0; j < h; ++j) dist[static_cast<std::size_t>(j) * w + i] = col_out[j];
  }
  std::vector<double> row_in(w), row_out(w);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) row_in[i] = dist[static_cast<std::size_t>(j) * w + i];
    transform_1d(row_in, row_out);
    for (int i = 0; i < w; ++i) dist[static_cast<std::size_t>(j) * w + i] = row_out[i];
  }
  return dist;
}

Costmap inflate(Costmap map, double inscribed_radius, double decay_rate) {
  const std::vector<double> sq = squared_distance_to_lethal(map);
  const GridSpec& spec = map.spec();
  const double res = spec.resolution;

  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) {
      const double s = sq[static_cast<std::size_t>(j) * spec.width + i];
      if (!std::isfinite(s)) continue;
      std::uint8_t& cell = map.at(i, j);
      if (cell == kCostUnknown || cell == kCostLethal) continue;
      const double d = res * std::sqrt(s);
      std::uint8_t inflated;
      if (d <= inscribed_radius) {
        inflated = kCostInscribed;
      } else {
        const long v = std::lround(252.0 * std::exp(-decay_rate * (d - inscribed_radius)));
        inflated = static_cast<std::uint8_t>(std::min(v, 252L));
      }
      cell = std::max(cell, inflated);
    }
  }
  return map;
}

namespace {

// Paints one snapped Gaussian source into the grid; cells outside the radius
// where the contribution rounds to zero are skipped.
void paint_source(Costmap& map, const Pose2D& center, const GaussianParams& params) {
  if (params.amplitude < 0.5) return;
  const GridSpec& spec = map.spec();
  const Vec2 snapped = spec.snap_to_cell_center(center.position());
  const Pose2D src{snapped.x, snapped.y, center.theta};

  const double sigma_max = std::max(std::max(params.sigma_f, params.sigma_r),
                                    std::max(params.sigma_sl, params.sigma_sr));
  const double support = 2.0 * sigma_max * std::sqrt(std::log(2.0 * params.amplitude));

  const int i0 = static_cast<int>(std::floor((snapped.x - support - spec.origin.x) / spec.resolution));
  const int i1 = static_cast<int>(std::ceil((snapped.x + support - spec.origin.x) / spec.resolution));
  const int j0 = static_cast<int>(std::floor((snapped.y - support - spec.origin.y) / spec.resolution));
  const int j1 = static_cast<int>(std::ceil((snapped.y + support - spec.origin.y) / spec.resolution));

  for (int j = std::max(0, j0); j <= std::min(spec.height - 1, j1); ++j) {
    for (int i = std::max(0, i0); i <= std::min(spec.width - 1, i1); ++i) {
      std::uint8_t& cell = map.at(i, j);
      if (cell == kCostUnknown) continue;
      const double value = altered_asymmetric_gaussian(spec.cell_center(i, j), src, params);
      const long rounded = std::lround(value);
      if (rounded <= 0) continue;
      const std::uint8_t cost = static_cast<std::uint8_t>(std::min(rounded, 254L));
      cell = std::max(cell, cost);
    }
  }
}

}  // namespace

Costmap apply_adaptive_layer(Costmap map, const SceneState& scene) {
  for (const auto& p : scene.persons) paint_source(map, p.pose, p.params);
  for (const auto& g : scene.groups) paint_source(map, g.center_pose(), g.params);
  return map;
}

Costmap compose(const Costmap& static_map, std::span<const Vec2> obstacles,
                const SceneState& scene, const CostmapParams& params) {
  Costmap map = mark_obstacles(static_map, obstacles);
  map = clean_people(std::move(map), scene, params.clearing_radius);
  map = inflate(std::move(map), params.inscribed_radius, params.decay_rate);
  map = apply_adaptive_layer(std::move(map), scene);
  return map;
}

void write_costmap_csv(const Costmap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const GridSpec& spec = map.spec();
  for (int j = spec.height - 1; j >= 0; --j) {
    for (int i = 0; i < spec.width; ++i) {
      out << static_cast<int>(map.at(i, j));
      if (i + 1 < spec.width) out << ',';
    }
    out << '\n';
  }
}

void write_costmap_binary(const Costmap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  const std::uint32_t w = static_cast<std::uint32_t>(map.spec().width);
  const std::uint32_t h = static_cast<std::uint32_t>(map.spec().height);
  const float res = static_cast<float>(map.spec().resolution);
  const std::uint32_t reserved = 0;
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&res), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  out.write(reinterpret_cast<const char*>(map.cells().data()),
            static_cast<std::streamsize>(map.cells().size()));
}

Costmap read_costmap_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::uint32_t w = 0, h = 0, reserved = 0;
  float res = 0.0f;
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&res), 4);
  in.read(reinterpret_cast<char*>(&reserved), 4);
  if (!in || w == 0 || h == 0) throw IoError("malformed costmap header: " + path);
  GridSpec spec;
  spec.resolution = res;
  spec.width = static_cast<int>(w);
  spec.height = static_cast<int>(h);
  Costmap map(spec, 0);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(cells.data()), static_cast<std::streamsize>(cells.size()));
  if (in.gcount() != static_cast<std::streamsize>(cells.size()))
    throw IoError("truncated costmap data: " + path);
  for (int j = 0; j < spec.height; ++j)
    for (int i = 0; i < spec.width; ++i) map.at(i, j) = cells[static_cast<std::size_t>(j) * w + i];
  return map;
}

}  // namespace socnav
