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

#include "bemlab/buildgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "bemlab/csv.hpp"

namespace bemlab {

std::string_view to_string(ShapeClass s) {
  switch (s) {
    case ShapeClass::box: return "box";
    case ShapeClass::random: return "random";
    case ShapeClass::representative: return "representative";
  }
  return "?";
}

ShapeClass parse_shape_class(std::string_view s) {
  if (s == "box") return ShapeClass::box;
  if (s == "random") return ShapeClass::random;
  if (s == "representative") return ShapeClass::representative;
  throw ArgumentError("unknown shape class '" + std::string(s) + "'");
}

std::size_t BuildingDesign::wall_count() const {
  std::size_t n = 0;
  for (const auto& z : zones) n += z.walls.size();
  return n;
}

std::size_t BuildingDesign::roof_segment_count() const {
  return static_cast<std::size_t>(std::count_if(zones.begin(), zones.end(), [](const ZoneSpec& z) { return z.has_roof(); }));
}

double BuildingDesign::footprint_area() const {
  std::vector<double> g;
  for (const auto& z : zones) g.push_back(z.ground_area_share);
  return ordered_sum(std::move(g));
}

// ---------------------------------------------------------------------------
// Footprint
// ---------------------------------------------------------------------------

Footprint::Footprint(std::vector<Rect> rects) : rects_(std::move(rects)) {
  for (const auto& r : rects_) {
    if (!(r.x1 > r.x0 && r.y1 > r.y0)) throw ArgumentError("Footprint: degenerate rectangle");
    xs_.push_back(r.x0);
    xs_.push_back(r.x1);
    ys_.push_back(r.y0);
    ys_.push_back(r.y1);
  }
  std::sort(xs_.begin(), xs_.end());
  xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
  std::sort(ys_.begin(), ys_.end());
  ys_.erase(std::unique(ys_.begin(), ys_.end()), ys_.end());
  nx_ = xs_.empty() ? 0 : xs_.size() - 1;
  ny_ = ys_.empty() ? 0 : ys_.size() - 1;
  cells_.assign(nx_ * ny_, 0);
  for (std::size_t j = 0; j < ny_; ++j) {
    const double cy = 0.5 * (ys_[j] + ys_[j + 1]);
    for (std::size_t i = 0; i < nx_; ++i) {
      const double cx = 0.5 * (xs_[i] + xs_[i + 1]);
      for (const auto& r : rects_) {
        if (cx > r.x0 && cx < r.x1 && cy > r.y0 && cy < r.y1) {
          cells_[j * nx_ + i] = 1;
          break;
        }
      }
    }
  }
}

double Footprint::area() const {
  double a = 0.0;
  for (std::size_t j = 0; j < ny_; ++j)
    for (std::size_t i = 0; i < nx_; ++i)
      if (covered(i, j)) a += (xs_[i + 1] - xs_[i]) * (ys_[j + 1] - ys_[j]);
  return a;
}

bool Footprint::connected() const {
  std::size_t total = std::count(cells_.begin(), cells_.end(), std::uint8_t{1});
  if (total == 0) return false;
  std::vector<std::uint8_t> seen(cells_.size(), 0);
  std::queue<std::size_t> q;
  const auto first = static_cast<std::size_t>(std::find(cells_.begin(), cells_.end(), 1) - cells_.begin());
  q.push(first);
  seen[first] = 1;
  std::size_t visited = 0;
  while (!q.empty()) {
    const auto c = q.front();
    q.pop();
    ++visited;
    const std::size_t i = c % nx_, j = c / nx_;
    auto visit = [&](std::size_t ni, std::size_t nj) {
      const auto k = nj * nx_ + ni;
      if (cells_[k] && !seen[k]) {
        seen[k] = 1;
        q.push(k);
      }
    };
    if (i > 0) visit(i - 1, j);
    if (i + 1 < nx_) visit(i + 1, j);
    if (j > 0) visit(i, j - 1);
    if (j + 1 < ny_) visit(i, j + 1);
  }
  return visited == total;
}

std::vector<FacadeSegment> Footprint::facade() const {
  std::vector<FacadeSegment> out;
  // 0 = no edge, otherwise the façade orientation + 1.
  auto flush_run = [&](int facing, double start, double end) {
    if (facing != 0) out.push_back({static_cast<Orientation>(facing - 1), end - start});
  };
  // Horizontal grid lines: north/south façades.
  for (std::size_t j = 0; j <= ny_; ++j) {
    int run = 0;
    double run_start = 0.0;
    for (std::size_t i = 0; i < nx_; ++i) {
      const bool below = j > 0 && covered(i, j - 1);
      const bool above = j < ny_ && covered(i, j);
      int facing = 0;
      if (below && !above) facing = 1 + static_cast<int>(Orientation::N);
      if (above && !below) facing = 1 + static_cast<int>(Orientation::S);
      if (facing != run) {
        flush_run(run, run_start, xs_[i]);
        run = facing;
        run_start = xs_[i];
      }
    }
    flush_run(run, run_start, xs_[nx_]);
  }
  // Vertical grid lines: east/west façades.
  for (std::size_t i = 0; i <= nx_; ++i) {
    int run = 0;
    double run_start = 0.0;
    for (std::size_t j = 0; j < ny_; ++j) {
      const bool left = i > 0 && covered(i - 1, j);
      const bool right = i < nx_ && covered(i, j);
      int facing = 0;
      if (left && !right) facing = 1 + static_cast<int>(Orientation::E);
      if (right && !left) facing = 1 + static_cast<int>(Orientation::W);
      if (facing != run) {
        flush_run(run, run_start, ys_[j]);
        run = facing;
        run_start = ys_[j];
      }
    }
    flush_run(run, run_start, ys_[ny_]);
  }
  return out;
}

double Footprint::perimeter() const {
  double p = 0.0;
  for (const auto& s : facade()) p += s.length;
  return p;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

EnvelopeParams sample_envelope(Rng& rng) {
  EnvelopeParams e{};
  e.u_wall = rng.uniform(ranges::u_wall.lo, ranges::u_wall.hi);
  e.u_win = rng.uniform(ranges::u_win.lo, ranges::u_win.hi);
  e.u_roof = rng.uniform(ranges::u_roof.lo, ranges::u_roof.hi);
  e.u_floor = rng.uniform(ranges::u_floor.lo, ranges::u_floor.hi);
  e.shgc = rng.uniform(ranges::shgc.lo, ranges::shgc.hi);
  e.ach = rng.uniform(ranges::ach.lo, ranges::ach.hi);
  e.q_int = rng.uniform(ranges::q_int.lo, ranges::q_int.hi);
  e.tau = rng.uniform(ranges::tau.lo, ranges::tau.hi);
  for (auto& w : e.wwr) w = rng.uniform(ranges::wwr.lo, ranges::wwr.hi);
  return e;
}

BuildingDesign assemble_design(std::int64_t building_id, ShapeClass shape, std::string archetype,
                               std::span<const Wing> wings, const EnvelopeParams& env) {
  if (wings.empty()) throw ArgumentError("assemble_design: no wings");
  int n_floors = 0;
  for (const auto& w : wings) {
    if (w.floors < 1) throw ArgumentError("assemble_design: wing without floors");
    n_floors = std::max(n_floors, w.floors);
  }

  BuildingDesign d;
  d.building_id = building_id;
  d.shape_class = shape;
  d.archetype = std::move(archetype);
  d.u_wall = env.u_wall;
  d.u_win = env.u_win;
  d.u_roof = env.u_roof;
  d.u_floor = env.u_floor;
  d.shgc = env.shgc;
  d.ach = env.ach;
  d.q_int = env.q_int;
  d.tau = env.tau;
  d.wwr = env.wwr;

  std::vector<Footprint> levels;
  levels.reserve(static_cast<std::size_t>(n_floors));
  for (int k = 0; k < n_floors; ++k) {
    std::vector<Rect> rects;
    for (const auto& w : wings)
      if (w.floors > k) rects.push_back(w.rect);
    levels.emplace_back(std::move(rects));
  }

  int next_id = 0;
  std::vector<double> areas;
  for (int k = 0; k < n_floors; ++k) {
    ZoneSpec z;
    z.zone_id = k;
    z.floor_index = k;
    z.floor_area = levels[static_cast<std::size_t>(k)].area();
    z.volume = z.floor_area * kFloorHeight;
    for (const auto& seg : levels[static_cast<std::size_t>(k)].facade()) {
      const double gross = seg.length * kFloorHeight;
      WallElement w;
      w.element_id = next_id++;
      w.orientation = seg.orientation;
      w.window_area = env.wwr[index_of(seg.orientation)] * gross;
      w.wall_area = gross - w.window_area;
      z.walls.push_back(w);
    }
    areas.push_back(z.floor_area);
    d.zones.push_back(std::move(z));
  }
  for (int k = 0; k < n_floors; ++k) {
    const double above = k + 1 < n_floors ? areas[static_cast<std::size_t>(k + 1)] : 0.0;
    double share = areas[static_cast<std::size_t>(k)] - above;
    if (std::abs(share) <= 1e-9 * areas[static_cast<std::size_t>(k)]) share = 0.0;
    auto& z = d.zones[static_cast<std::size_t>(k)];
    z.roof_area_share = share;
    if (share > 0.0) z.roof_element_id = next_id++;
  }
  d.zones.front().ground_area_share = areas.front();
  d.zones.front().ground_element_id = next_id++;
  return d;
}

std::uint64_t building_seed(std::uint64_t master_seed, std::string_view split, std::int64_t building_id) {
  return derive_seed(master_seed, hash_string(split), static_cast<std::uint64_t>(building_id));
}

BuildingDesign sample_box(std::uint64_t seed, std::int64_t building_id) {
  Rng rng(derive_seed(seed, hash_string("box")));
  const double length = rng.uniform(ranges::box_side.lo, ranges::box_side.hi);
  const double width = rng.uniform(ranges::box_side.lo, ranges::box_side.hi);
  const int floors = static_cast<int>(rng.uniform_int(1, ranges::max_floors));
  const auto env = sample_envelope(rng);
  const Wing wing{{0.0, 0.0, length, width}, floors};
  return assemble_design(building_id, ShapeClass::box, "box", std::span(&wing, 1), env);
}

BuildingDesign sample_random(std::uint64_t seed, std::int64_t building_id) {
  Rng rng(derive_seed(seed, hash_string("random")));
  std::vector<Rect> rects;
  for (;;) {
    rects.clear();
    const auto n = rng.uniform_int(2, 4);
    for (std::int64_t k = 0; k < n; ++k) {
      const double w = rng.uniform(8.0, 25.0);
      const double h = rng.uniform(8.0, 25.0);
      const double x0 = rng.uniform(0.0, 25.0);
      const double y0 = rng.uniform(0.0, 25.0);
      rects.push_back({x0, y0, x0 + w, y0 + h});
    }
    const Footprint fp(rects);
    if (!fp.connected()) continue;
    const auto walls = fp.facade().size();
    if (walls < 4 || walls > 12) continue;
    break;
  }
  const int floors = static_cast<int>(rng.uniform_int(1, ranges::max_floors));
  const auto env = sample_envelope(rng);
  std::vector<Wing> wings;
  for (const auto& r : rects) wings.push_back({r, floors});
  return assemble_design(building_id, ShapeClass::random, "random", wings, env);
}

namespace {

std::vector<Wing> archetype_wings(std::string_view archetype, Rng& rng) {
  auto floors = [&](int lo, int hi) { return static_cast<int>(rng.uniform_int(lo, hi)); };
  if (archetype == "L") {
    const double a = rng.uniform(20.0, 45.0), d1 = rng.uniform(8.0, 16.0);
    const double b = rng.uniform(20.0, 45.0), d2 = rng.uniform(8.0, 16.0);
    return {{{0.0, 0.0, a, d1}, floors(1, 6)}, {{0.0, 0.0, d2, b}, floors(1, 6)}};
  }
  if (archetype == "U") {
    const double a = rng.uniform(30.0, 50.0), d1 = rng.uniform(8.0, 14.0);
    const double d2 = rng.uniform(8.0, 12.0), b = rng.uniform(d1 + 8.0, 40.0);
    // Arms never lower than the base keeps every storey a U or a pair of bars.
    const int base = floors(1, 5);
    const int arms = floors(base, 6);
    return {{{0.0, 0.0, a, d1}, base}, {{0.0, 0.0, d2, b}, arms}, {{a - d2, 0.0, a, b}, arms}};
  }
  if (archetype == "T") {
    const double a = rng.uniform(25.0, 45.0), d1 = rng.uniform(8.0, 14.0);
    const double d2 = rng.uniform(8.0, 14.0), b = rng.uniform(12.0, 35.0);
    const double c = 0.5 * (a - d2);
    return {{{0.0, b, a, b + d1}, floors(1, 6)}, {{c, 0.0, c + d2, b}, floors(1, 6)}};
  }
  if (archetype == "courtyard") {
    const double a = rng.uniform(30.0, 50.0), c = rng.uniform(30.0, 50.0), d = rng.uniform(8.0, 12.0);
    const int ns = floors(1, 6), ew = floors(1, 6);
    return {{{0.0, 0.0, a, d}, ns},
            {{0.0, c - d, a, c}, ns},
            {{0.0, d, d, c - d}, ew},
            {{a - d, d, a, c - d}, ew}};
  }
  throw ArgumentError("unknown archetype '" + std::string(archetype) + "'");
}

constexpr std::array<std::string_view, 4> kArchetypes = {"L", "U", "T", "courtyard"};

}  // namespace

BuildingDesign sample_archetype(std::string_view archetype, std::uint64_t seed, std::int64_t building_id) {
  Rng rng(derive_seed(seed, hash_string("archetype"), hash_string(archetype)));
  const auto wings = archetype_wings(archetype, rng);
  const auto env = sample_envelope(rng);
  return assemble_design(building_id, ShapeClass::representative, std::string(archetype), wings, env);
}

BuildingDesign sample_representative(std::uint64_t seed, std::int64_t building_id) {
  Rng rng(derive_seed(seed, hash_string("representative")));
  const auto pick = kArchetypes[static_cast<std::size_t>(rng.uniform_int(0, 3))];
  return sample_archetype(pick, rng.next_u64(), building_id);
}

BuildingDesign sample_design(ShapeClass shape, std::uint64_t seed, std::int64_t building_id) {
  switch (shape) {
    case ShapeClass::box: return sample_box(seed, building_id);
    case ShapeClass::random: return sample_random(seed, building_id);
    case ShapeClass::representative: return sample_representative(seed, building_id);
  }
  throw ArgumentError("sample_design: bad shape class");
}

// ---------------------------------------------------------------------------
// Monolithic features
// ---------------------------------------------------------------------------

const std::vector<std::string>& MonolithicFeatures::names() {
  static const std::vector<std::string> n = {
      "total_floor_area", "total_volume",  "n_zones",    "total_wall_area", "window_area_n", "window_area_e",
      "window_area_s",    "window_area_w", "roof_area",  "ground_area",     "u_wall",        "u_win",
      "u_roof",           "u_floor",       "shgc",       "ach",             "q_int",         "tau"};
  return n;
}

MonolithicFeatures monolithic_features(const BuildingDesign& d) {
  std::vector<double> floor_area, volume, wall_area, roof, ground;
  std::array<std::vector<double>, 4> window;
  for (const auto& z : d.zones) {
    floor_area.push_back(z.floor_area);
    volume.push_back(z.volume);
    roof.push_back(z.roof_area_share);
    ground.push_back(z.ground_area_share);
    for (const auto& w : z.walls) {
      wall_area.push_back(w.wall_area);
      window[index_of(w.orientation)].push_back(w.window_area);
    }
  }
  MonolithicFeatures f;
  auto& v = f.values;
  v[0] = ordered_sum(std::move(floor_area));
  v[1] = ordered_sum(std::move(volume));
  v[2] = static_cast<double>(d.zones.size());
  v[3] = ordered_sum(std::move(wall_area));
  for (std::size_t o = 0; o < 4; ++o) v[4 + o] = ordered_sum(std::move(window[o]));
  v[8] = ordered_sum(std::move(roof));
  v[9] = ordered_sum(std::move(ground));
  v[10] = d.u_wall;
  v[11] = d.u_win;
  v[12] = d.u_roof;
  v[13] = d.u_floor;
  v[14] = d.shgc;
  v[15] = d.ach;
  v[16] = d.q_int;
  v[17] = d.tau;
  return f;
}

void validate_design(const BuildingDesign& d) {
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) throw ArgumentError("building " + std::to_string(d.building_id) + ": " + what);
  };
  check(!d.zones.empty(), "no zones");
  check(ranges::u_wall.contains(d.u_wall), "u_wall out of range");
  check(ranges::u_win.contains(d.u_win), "u_win out of range");
  check(ranges::u_roof.contains(d.u_roof), "u_roof out of range");
  check(ranges::u_floor.contains(d.u_floor), "u_floor out of range");
  check(ranges::shgc.contains(d.shgc), "shgc out of range");
  check(ranges::ach.contains(d.ach), "ach out of range");
  check(ranges::q_int.contains(d.q_int), "q_int out of range");
  check(ranges::tau.contains(d.tau), "tau out of range");
  for (double w : d.wwr) check(ranges::wwr.contains(w), "wwr out of range");
  double roof = 0.0, ground = 0.0;
  for (const auto& z : d.zones) {
    check(!z.walls.empty(), "zone without walls");
    check(std::abs(z.volume - z.floor_area * kFloorHeight) <= 1e-9 * z.volume, "volume != floor_area * 3");
    roof += z.roof_area_share;
    ground += z.ground_area_share;
    for (const auto& w : z.walls) {
      check(w.wall_area > 0.0 && w.window_area >= 0.0, "bad wall element areas");
      const double ratio = w.window_area / w.gross_area();
      check(ratio >= ranges::wwr.lo - 1e-12 && ratio <= ranges::wwr.hi + 1e-12, "window ratio out of range");
    }
  }
  check(std::abs(roof - ground) <= 1e-9 * std::max(1.0, ground), "roof and ground areas differ");
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> building_columns() {
  std::vector<std::string> c = {"building_id", "shape_class", "archetype", "u_wall", "u_win", "u_roof", "u_floor",
                                "shgc",        "ach",         "q_int",     "tau",    "wwr_n", "wwr_e",  "wwr_s",
                                "wwr_w"};
  for (const auto& n : MonolithicFeatures::names()) c.push_back(n);
  return c;
}

const std::vector<std::string> kZoneColumns = {"building_id", "zone_id",         "floor_index",      "floor_area",
                                               "volume",      "roof_area_share", "ground_area_share"};
const std::vector<std::string> kElementColumns = {"building_id", "element_id",  "zone_id",     "kind",
                                                  "orientation", "wall_area",   "window_area", "area"};

std::filesystem::path split_file(const std::filesystem::path& dir, std::string_view stem, std::string_view split) {
  return dir / (std::string(stem) + "_" + std::string(split) + ".csv");
}

}  // namespace

struct DesignWriter::Impl {
  csv::Writer buildings, zones, elements;
  std::string line;
  Impl(const std::filesystem::path& dir, std::string_view split)
      : buildings(split_file(dir, "buildings", split)),
        zones(split_file(dir, "zones", split)),
        elements(split_file(dir, "elements", split)) {
    buildings.write_header(building_columns());
    zones.write_header(kZoneColumns);
    elements.write_header(kElementColumns);
  }
};

DesignWriter::DesignWriter(const std::filesystem::path& dir, std::string_view split)
    : impl_(std::make_unique<Impl>(dir, split)) {}
DesignWriter::~DesignWriter() = default;

void DesignWriter::add(const BuildingDesign& d) {
  auto& line = impl_->line;
  auto sep = [&] { line.push_back(','); };
  line.clear();
  append_int(line, d.building_id);
  sep();
  line += to_string(d.shape_class);
  sep();
  line += d.archetype;
  for (double v : {d.u_wall, d.u_win, d.u_roof, d.u_floor, d.shgc, d.ach, d.q_int, d.tau}) {
    sep();
    append_exact(line, v);
  }
  for (double v : d.wwr) {
    sep();
    append_exact(line, v);
  }
  for (double v : monolithic_features(d).values) {
    sep();
    append_exact(line, v);
  }
  impl_->buildings.write_line(line);

  for (const auto& z : d.zones) {
    line.clear();
    append_int(line, d.building_id);
    sep();
    append_int(line, z.zone_id);
    sep();
    append_int(line, z.floor_index);
    for (double v : {z.floor_area, z.volume, z.roof_area_share, z.ground_area_share}) {
      sep();
      append_exact(line, v);
    }
    impl_->zones.write_line(line);
  }
  auto element = [&](int id, int zone, std::string_view kind, std::string_view orient, double wall, double window,
                     double area) {
    line.clear();
    append_int(line, d.building_id);
    sep();
    append_int(line, id);
    sep();
    append_int(line, zone);
    sep();
    line += kind;
    sep();
    line += orient;
    for (double v : {wall, window, area}) {
      sep();
      append_exact(line, v);
    }
    impl_->elements.write_line(line);
  };
  for (const auto& z : d.zones)
    for (const auto& w : z.walls)
      element(w.element_id, z.zone_id, "wall", to_string(w.orientation), w.wall_area, w.window_area, w.gross_area());
  for (const auto& z : d.zones)
    if (z.has_roof()) element(z.roof_element_id, z.zone_id, "roof", "-", 0.0, 0.0, z.roof_area_share);
  for (const auto& z : d.zones)
    if (z.has_ground()) element(z.ground_element_id, z.zone_id, "floor", "-", 0.0, 0.0, z.ground_area_share);
}

void DesignWriter::close() {
  impl_->buildings.close();
  impl_->zones.close();
  impl_->elements.close();
}

void write_designs(const std::filesystem::path& dir, std::string_view split, std::span<const BuildingDesign> designs) {
  DesignWriter w(dir, split);
  for (const auto& d : designs) w.add(d);
  w.close();
}

std::vector<BuildingDesign> read_designs(const std::filesystem::path& dir, std::string_view split) {
  std::vector<BuildingDesign> designs;
  std::map<std::int64_t, std::size_t> index;
  {
    csv::Reader in(split_file(dir, "buildings", split), building_columns());
    while (in.next_row()) {
      BuildingDesign d;
      d.building_id = in.integer(0);
      try {
        d.shape_class = parse_shape_class(in.text(1));
      } catch (const ArgumentError& e) {
        in.fail(1, e.what());
      }
      d.archetype = std::string(in.text(2));
      d.u_wall = in.number(3);
      d.u_win = in.number(4);
      d.u_roof = in.number(5);
      d.u_floor = in.number(6);
      d.shgc = in.number(7);
      d.ach = in.number(8);
      d.q_int = in.number(9);
      d.tau = in.number(10);
      for (std::size_t o = 0; o < 4; ++o) d.wwr[o] = in.number(11 + o);
      for (std::size_t k = 0; k < kMonolithicStaticCount; ++k) in.number(15 + k);
      if (!index.emplace(d.building_id, designs.size()).second) in.fail(0, "duplicate building_id");
      designs.push_back(std::move(d));
    }
  }
  auto lookup = [&](const csv::Reader& in) -> BuildingDesign& {
    const auto it = index.find(in.integer(0));
    if (it == index.end()) in.fail(0, "unknown building_id");
    return designs[it->second];
  };
  {
    csv::Reader in(split_file(dir, "zones", split), kZoneColumns);
    while (in.next_row()) {
      auto& d = lookup(in);
      ZoneSpec z;
      z.zone_id = static_cast<int>(in.integer(1));
      if (z.zone_id != static_cast<int>(d.zones.size())) in.fail(1, "zones out of order");
      z.floor_index = static_cast<int>(in.integer(2));
      z.floor_area = in.number(3);
      z.volume = in.number(4);
      z.roof_area_share = in.number(5);
      z.ground_area_share = in.number(6);
      d.zones.push_back(std::move(z));
    }
  }
  {
    csv::Reader in(split_file(dir, "elements", split), kElementColumns);
    while (in.next_row()) {
      auto& d = lookup(in);
      const int id = static_cast<int>(in.integer(1));
      const auto zone = in.integer(2);
      if (zone < 0 || zone >= static_cast<std::int64_t>(d.zones.size())) in.fail(2, "unknown zone_id");
      auto& z = d.zones[static_cast<std::size_t>(zone)];
      const auto kind = in.text(3);
      if (kind == "wall") {
        WallElement w;
        w.element_id = id;
        try {
          w.orientation = parse_orientation(in.text(4));
        } catch (const ArgumentError& e) {
          in.fail(4, e.what());
        }
        w.wall_area = in.number(5);
        w.window_area = in.number(6);
        z.walls.push_back(w);
      } else if (kind == "roof") {
        z.roof_element_id = id;
      } else if (kind == "floor") {
        z.ground_element_id = id;
      } else {
        in.fail(3, "unknown element kind '" + std::string(kind) + "'");
      }
    }
  }
  return designs;
}

}  // namespace bemlab
