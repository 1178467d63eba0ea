/*
 * Copyright 2026 The bemlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bemlab/common.hpp"
#include "bemlab/weather.hpp"

namespace bemlab {

inline constexpr double kFloorHeight = 3.0;

enum class ShapeClass : std::uint8_t { box, random, representative };
std::string_view to_string(ShapeClass s);
ShapeClass parse_shape_class(std::string_view s);

/// Closed parameter interval used by the design sampler.
struct Range {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

namespace ranges {
inline constexpr Range u_wall{0.15, 0.6};
inline constexpr Range u_win{0.8, 2.8};
inline constexpr Range u_roof{0.12, 0.5};
inline constexpr Range u_floor{0.2, 0.8};
inline constexpr Range shgc{0.4, 0.7};
inline constexpr Range ach{0.2, 1.0};
inline constexpr Range q_int{3.0, 8.0};
inline constexpr Range tau{0.0, 6.0};
inline constexpr Range wwr{0.1, 0.6};
inline constexpr Range box_side{10.0, 40.0};
inline constexpr int max_floors = 6;
}  // namespace ranges

struct WallElement {
  int element_id = 0;
  Orientation orientation = Orientation::N;
  double wall_area = 0.0;    // opaque, m²
  double window_area = 0.0;  // glazed, m²

  double gross_area() const { return wall_area + window_area; }
  friend bool operator==(const WallElement&, const WallElement&) = default;
};

struct ZoneSpec {
  int zone_id = 0;
  int floor_index = 0;
  double floor_area = 0.0;
  double volume = 0.0;
  std::vector<WallElement> walls;
  double roof_area_share = 0.0;
  double ground_area_share = 0.0;
  int roof_element_id = -1;    // -1 when the zone has no exposed roof
  int ground_element_id = -1;  // -1 unless this is the ground zone

  bool has_roof() const { return roof_area_share > 0.0; }
  bool has_ground() const { return ground_area_share > 0.0; }
  friend bool operator==(const ZoneSpec&, const ZoneSpec&) = default;
};

struct BuildingDesign {
  std::int64_t building_id = 0;
  ShapeClass shape_class = ShapeClass::box;
  std::string archetype;  // "box", "random", "L", "U", "T", "courtyard"
  std::vector<ZoneSpec> zones;
  double u_wall = 0.0;
  double u_win = 0.0;
  double u_roof = 0.0;
  double u_floor = 0.0;
  double shgc = 0.0;
  double ach = 0.0;
  double q_int = 0.0;  // W/m²
  double tau = 0.0;    // h
  std::array<double, 4> wwr{};

  std::size_t wall_count() const;
  std::size_t roof_segment_count() const;
  double footprint_area() const;
  friend bool operator==(const BuildingDesign&, const BuildingDesign&) = default;
};

// ---------------------------------------------------------------------------
// Rectilinear footprint geometry.
// ---------------------------------------------------------------------------

struct Rect {
  double x0, y0, x1, y1;
};

struct FacadeSegment {
  Orientation orientation;
  double length;
};

/// Union of axis-aligned rectangles evaluated on the compressed coordinate
/// grid they induce. North is +y.
class Footprint {
 public:
  explicit Footprint(std::vector<Rect> rects);

  double area() const;
  /// 4-connected union (touching corners do not connect).
  bool connected() const;
  /// Boundary edges, maximal collinear runs with one facing each.
  std::vector<FacadeSegment> facade() const;
  double perimeter() const;
  bool empty() const { return rects_.empty(); }

 private:
  bool covered(std::size_t i, std::size_t j) const { return cells_[j * nx_ + i] != 0; }
  std::vector<Rect> rects_;
  std::vector<double> xs_, ys_;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// A building mass: a footprint rectangle extruded over `floors` storeys.
struct Wing {
  Rect rect;
  int floors;
};

/// Envelope physics parameters are drawn from `rng` in a fixed order.
struct EnvelopeParams {
  double u_wall, u_win, u_roof, u_floor, shgc, ach, q_int, tau;
  std::array<double, 4> wwr;
};
EnvelopeParams sample_envelope(Rng& rng);

/// Stacks wings into one zone per floor, decomposing each floor's footprint
/// into façade elements, exposed roof segments and the ground slab.
BuildingDesign assemble_design(std::int64_t building_id, ShapeClass shape, std::string archetype,
                               std::span<const Wing> wings, const EnvelopeParams& env);

BuildingDesign sample_box(std::uint64_t seed, std::int64_t building_id = 0);
BuildingDesign sample_random(std::uint64_t seed, std::int64_t building_id = 0);
BuildingDesign sample_representative(std::uint64_t seed, std::int64_t building_id = 0);
/// Representative sampler pinned to one archetype ("L", "U", "T", "courtyard").
BuildingDesign sample_archetype(std::string_view archetype, std::uint64_t seed, std::int64_t building_id = 0);
BuildingDesign sample_design(ShapeClass shape, std::uint64_t seed, std::int64_t building_id = 0);

/// Per-building seed, independent of generation order.
std::uint64_t building_seed(std::uint64_t master_seed, std::string_view split, std::int64_t building_id);

// ---------------------------------------------------------------------------
// Monolithic parameterization.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMonolithicStaticCount = 18;

struct MonolithicFeatures {
  std::array<double, kMonolithicStaticCount> values{};
  static const std::vector<std::string>& names();
  friend bool operator==(const MonolithicFeatures&, const MonolithicFeatures&) = default;
};

/// Aggregates are order-free: permuting zones or walls yields a bitwise
/// identical vector.
MonolithicFeatures monolithic_features(const BuildingDesign& design);

/// Checks the documented design invariants; throws ArgumentError on violation.
void validate_design(const BuildingDesign& design);

// ---------------------------------------------------------------------------
// Persistence: buildings_, zones_ and elements_ files of one split.
// ---------------------------------------------------------------------------

void write_designs(const std::filesystem::path& dir, std::string_view split, std::span<const BuildingDesign> designs);
std::vector<BuildingDesign> read_designs(const std::filesystem::path& dir, std::string_view split);

/// Streams designs to the three split files one building at a time.
class DesignWriter {
 public:
  DesignWriter(const std::filesystem::path& dir, std::string_view split);
  ~DesignWriter();
  DesignWriter(const DesignWriter&) = delete;
  DesignWriter& operator=(const DesignWriter&) = delete;
  void add(const BuildingDesign& design);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bemlab
