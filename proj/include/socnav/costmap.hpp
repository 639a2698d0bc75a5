#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socnav/social_field.hpp"

namespace socnav {

inline constexpr std::uint8_t kCostLethal = 254;
inline constexpr std::uint8_t kCostInscribed = 253;
inline constexpr std::uint8_t kCostUnknown = 255;  // sentinel, excluded from planning

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct CellIndex {
  int i = 0;  // column
  int j = 0;  // row
};

struct GridSpec {
  Vec2 origin;              // world position of the grid's lower-left corner
  double resolution = 0.05; // meters per cell
  int width = 0;
  int height = 0;

  void validate() const;
  bool operator==(const GridSpec&) const = default;
  bool in_bounds(int i, int j) const { return i >= 0 && i < width && j >= 0 && j < height; }
  Vec2 cell_center(int i, int j) const {
    return {origin.x + (i + 0.5) * resolution, origin.y + (j + 0.5) * resolution};
  }
  std::optional<CellIndex> world_to_cell(const Vec2& p) const;
  /// Center of the cell containing p, without bounds clamping.
  Vec2 snap_to_cell_center(const Vec2& p) const;
};

class Costmap {
 public:
  Costmap() = default;
  Costmap(GridSpec spec, std::uint8_t fill = 0)
      : spec_(spec),
        cells_(static_cast<std::size_t>(spec.width) * spec.height, fill) {}

  const GridSpec& spec() const { return spec_; }
  std::uint8_t at(int i, int j) const { return cells_[idx(i, j)]; }
  std::uint8_t& at(int i, int j) { return cells_[idx(i, j)]; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  /// Cost at a world point; unknown for out-of-grid queries.
  std::uint8_t cost_at(const Vec2& p) const;

  bool operator==(const Costmap&) const = default;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * spec_.width + i; }
  GridSpec spec_;
  std::vector<std::uint8_t> cells_;
};

struct CostmapParams {
  double clearing_radius = 0.45;
  double inscribed_radius = 0.4;
  double decay_rate = 3.0;  // 1/m
};

Costmap make_empty_map(const GridSpec& spec);

/// Loads a P2/P5 portable graymap plus a JSON metadata file holding
/// {"origin": [x, y], "resolution": r}. Pixels <= 50 become lethal,
/// >= 200 free, anything in between unknown. Row 0 of the image is the top
/// of the map (largest y).
Costmap rasterize_static(const std::string& pgm_path, const std::string& meta_path);

/// Each in-bounds point's cell goes lethal; out-of-bounds points are ignored.
Costmap mark_obstacles(Costmap map, std::span<const Vec2> points);

/// Lethal cells within clearing_radius of any person center reset to 0.
/// Bodies are not re-marked lethal so the Gaussian decay stays intact.
Costmap clean_people(Costmap map, const SceneState& scene, double clearing_radius);

/// Exponential-decay inflation from lethal cells, max-combined:
/// d <= inscribed_radius -> 253, else round(252 exp(-decay (d - inscribed))).
/// Unknown cells are neither sources nor targets.
Costmap inflate(Costmap map, double inscribed_radius, double decay_rate);

/// Max-combines the rounded social field into the grid. Person and group
/// centers are snapped to cell centers so sub-cell motion cannot change the
/// output; only cells whose contribution rounds to a nonzero cost are visited.
Costmap apply_adaptive_layer(Costmap map, const SceneState& scene);

/// Full stack in fixed order: static -> obstacles -> clean people ->
/// inflation -> adaptive.
Costmap compose(const Costmap& static_map, std::span<const Vec2> obstacles,
                const SceneState& scene, const CostmapParams& params);

/// Exact squared euclidean distance transform (cell units^2) of the lethal
/// mask; kUnknown cells are treated as empty space.
std::vector<double> squared_distance_to_lethal(const Costmap& map);

void write_costmap_csv(const Costmap& map, const std::string& path);

/// Compact binary form: 16-byte little-endian header (width u32, height u32,
/// resolution f32, reserved u32) followed by row-major u8 cells.
void write_costmap_binary(const Costmap& map, const std::string& path);
Costmap read_costmap_binary(const std::string& path);

}  // namespace socnav
