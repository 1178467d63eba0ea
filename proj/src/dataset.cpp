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

#include "bemlab/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "bemlab/csv.hpp"
#include "json.hpp"

namespace bemlab {

using json = nlohmann::json;

std::string_view to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::wall_window: return "wall_window";
    case ComponentKind::roof: return "roof";
    case ComponentKind::ground_floor: return "ground_floor";
    case ComponentKind::infiltration: return "infiltration";
    case ComponentKind::zone: return "zone";
    case ComponentKind::building_monolithic: return "building_monolithic";
  }
  return "?";
}

ComponentKind parse_component_kind(std::string_view s) {
  for (auto k : kAllKinds)
    if (to_string(k) == s) return k;
  throw ArgumentError("unknown component kind '" + std::string(s) + "'");
}

const std::vector<std::string>& feature_names(ComponentKind k) {
  static const std::vector<std::string> wall = {"wall_area", "window_area", "u_wall",   "u_win",
                                                "shgc",      "orient_N",    "orient_E", "orient_S",
                                                "orient_W",  "t_out",       "i_orient", "hour_of_day"};
  static const std::vector<std::string> roof = {"area", "u_roof", "t_out"};
  static const std::vector<std::string> ground = {"area", "u_floor"};
  static const std::vector<std::string> infiltration = {"ach", "volume", "t_out"};
  static const std::vector<std::string> zone = {"env_flow_sum", "infiltration_flow", "gain_now", "tau",
                                                "hour_of_day"};
  static const std::vector<std::string> building = [] {
    auto n = MonolithicFeatures::names();
    for (const char* extra : {"t_out", "i_n", "i_e", "i_s", "i_w", "hour_of_day", "occupancy"}) n.emplace_back(extra);
    return n;
  }();
  switch (k) {
    case ComponentKind::wall_window: return wall;
    case ComponentKind::roof: return roof;
    case ComponentKind::ground_floor: return ground;
    case ComponentKind::infiltration: return infiltration;
    case ComponentKind::zone: return zone;
    case ComponentKind::building_monolithic: return building;
  }
  throw ArgumentError("feature_names: bad kind");
}

const std::vector<std::size_t>& hourly_features(ComponentKind k) {
  static const std::array<std::vector<std::size_t>, 6> cols = [] {
    std::array<std::vector<std::size_t>, 6> out;
    const std::vector<std::string> hourly = {"t_out", "i_orient", "i_n",        "i_e",       "i_s",
                                             "i_w",   "hour_of_day", "occupancy", "gain_now", "env_flow_sum",
                                             "infiltration_flow"};
    for (auto kind : kAllKinds) {
      const auto& names = feature_names(kind);
      for (std::size_t f = 0; f < names.size(); ++f)
        if (std::find(hourly.begin(), hourly.end(), names[f]) != hourly.end())
          out[static_cast<std::size_t>(kind)].push_back(f);
    }
    return out;
  }();
  return cols.at(static_cast<std::size_t>(k));
}

ComponentTable::ComponentTable(ComponentKind k) : kind(k), feature_names(bemlab::feature_names(k)) {
  features.reset(feature_names.size());
}

void ComponentTable::reserve(std::size_t n) {
  building_id.reserve(n);
  element_id.reserve(n);
  hour_index.reserve(n);
  features.reserve_rows(n);
  labels.reserve(n);
}

void ComponentTable::add_row(std::int64_t building, std::int32_t element, int hour, std::span<const double> x,
                             double label) {
  building_id.push_back(building);
  element_id.push_back(element);
  hour_index.push_back(static_cast<std::int16_t>(hour));
  features.push_row(x);
  labels.push_back(label);
}

void ComponentTable::append(const ComponentTable& other) {
  if (other.kind != kind) throw ArgumentError("ComponentTable::append: kind mismatch");
  reserve(size() + other.size());
  for (std::size_t i = 0; i < other.size(); ++i)
    add_row(other.building_id[i], other.element_id[i], other.hour_index[i], other.features.row(i), other.labels[i]);
}

ComponentTable ComponentTable::subset(std::span<const std::size_t> indices) const {
  ComponentTable out(kind);
  out.reserve(indices.size());
  for (auto i : indices) {
    if (i >= size()) throw ArgumentError("ComponentTable::subset: index out of range");
    out.add_row(building_id[i], element_id[i], hour_index[i], features.row(i), labels[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Row construction
// ---------------------------------------------------------------------------

TableSet building_rows(const BuildingDesign& d, const WeatherSeries& weather) {
  return building_rows(d, weather, physics::simulate(d, weather));
}

TableSet building_rows(const BuildingDesign& d, const WeatherSeries& weather, const physics::SimulatedBuilding& sim) {
  TableSet out;
  for (auto k : kAllKinds) out.emplace(k, ComponentTable(k));
  const std::size_t hours = weather.size();
  auto& walls = out.at(ComponentKind::wall_window);
  auto& roofs = out.at(ComponentKind::roof);
  auto& grounds = out.at(ComponentKind::ground_floor);
  auto& infil = out.at(ComponentKind::infiltration);
  auto& zones = out.at(ComponentKind::zone);
  auto& building = out.at(ComponentKind::building_monolithic);
  walls.reserve(d.wall_count() * hours);
  zones.reserve(d.zones.size() * hours);
  infil.reserve(d.zones.size() * hours);

  for (std::size_t zi = 0; zi < d.zones.size(); ++zi) {
    const auto& z = d.zones[zi];
    const auto& zs = sim.zones[zi];
    for (std::size_t wi = 0; wi < z.walls.size(); ++wi) {
      const auto& w = z.walls[wi];
      std::array<double, 12> x{};
      x[0] = w.wall_area;
      x[1] = w.window_area;
      x[2] = d.u_wall;
      x[3] = d.u_win;
      x[4] = d.shgc;
      x[5 + index_of(w.orientation)] = 1.0;
      for (std::size_t t = 0; t < hours; ++t) {
        x[9] = weather[t].t_out;
        x[10] = weather[t].irradiance(w.orientation);
        x[11] = weather[t].hour_of_day;
        walls.add_row(d.building_id, w.element_id, static_cast<int>(t), x, zs.wall_flows[wi][t]);
      }
    }
  }
  for (std::size_t zi = 0; zi < d.zones.size(); ++zi) {
    const auto& z = d.zones[zi];
    if (!z.has_roof()) continue;
    for (std::size_t t = 0; t < hours; ++t) {
      const std::array<double, 3> x = {z.roof_area_share, d.u_roof, weather[t].t_out};
      roofs.add_row(d.building_id, z.roof_element_id, static_cast<int>(t), x, sim.zones[zi].roof_flow[t]);
    }
  }
  for (std::size_t zi = 0; zi < d.zones.size(); ++zi) {
    const auto& z = d.zones[zi];
    if (!z.has_ground()) continue;
    for (std::size_t t = 0; t < hours; ++t) {
      const std::array<double, 2> x = {z.ground_area_share, d.u_floor};
      grounds.add_row(d.building_id, z.ground_element_id, static_cast<int>(t), x, sim.zones[zi].floor_flow[t]);
    }
  }
  for (std::size_t zi = 0; zi < d.zones.size(); ++zi) {
    const auto& z = d.zones[zi];
    const auto& zs = sim.zones[zi];
    for (std::size_t t = 0; t < hours; ++t) {
      const std::array<double, 3> xi = {d.ach, z.volume, weather[t].t_out};
      infil.add_row(d.building_id, z.zone_id, static_cast<int>(t), xi, zs.infiltration[t]);
      const std::array<double, 5> xz = {zs.envelope[t], zs.infiltration[t], zs.gain[t], d.tau,
                                        static_cast<double>(weather[t].hour_of_day)};
      zones.add_row(d.building_id, z.zone_id, static_cast<int>(t), xz, zs.load[t]);
    }
  }
  const auto mono = monolithic_features(d);
  std::array<double, kMonolithicStaticCount + 7> x{};
  std::copy(mono.values.begin(), mono.values.end(), x.begin());
  for (std::size_t t = 0; t < hours; ++t) {
    const auto& wh = weather[t];
    auto* tail = x.data() + kMonolithicStaticCount;
    tail[0] = wh.t_out;
    for (std::size_t o = 0; o < 4; ++o) tail[1 + o] = wh.i_by_orientation[o];
    tail[5] = wh.hour_of_day;
    tail[6] = physics::occupancy(wh.hour_of_day);
    building.add_row(d.building_id, -1, static_cast<int>(t), x, sim.building_load[t]);
  }
  return out;
}

TableSet build_tables(std::span<const BuildingDesign> designs, const WeatherSeries& weather) {
  TableSet out;
  for (auto k : kAllKinds) out.emplace(k, ComponentTable(k));
  for (const auto& d : designs) {
    const auto rows = building_rows(d, weather);
    for (auto k : kAllKinds) out.at(k).append(rows.at(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Masking
// ---------------------------------------------------------------------------

std::string_view to_string(MaskMode m) { return m == MaskMode::independent ? "independent" : "consistent"; }

MaskMode parse_mask_mode(std::string_view s) {
  if (s == "independent") return MaskMode::independent;
  if (s == "consistent") return MaskMode::consistent;
  throw ArgumentError("unknown masking mode '" + std::string(s) + "'");
}

std::size_t masked_size(std::size_t n, double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ArgumentError("masking rate must lie in (0, 1]");
  if (n == 0) throw ArgumentError("cannot mask an empty table");
  const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) throw ArgumentError("sample_indices: k > n");
  std::vector<std::size_t> out;
  if (k == n) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  // Floyd's algorithm: k draws, no O(n) state.
  Rng rng(seed);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(k * 2);
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(j)));
    const auto pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

KeySet sample_keys(std::span<const std::int64_t> building_ids, double rate, std::uint64_t seed) {
  const std::size_t n = building_ids.size() * static_cast<std::size_t>(kHours);
  const auto idx = sample_indices(n, masked_size(n, rate), seed);
  KeySet keys;
  keys.reserve(idx.size() * 2);
  for (auto i : idx) keys.insert(pack_key(building_ids[i / kHours], static_cast<int>(i % kHours)));
  return keys;
}

ComponentTable filter_by_keys(const ComponentTable& table, const KeySet& keys) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (keys.contains(pack_key(table.building_id[i], table.hour_index[i]))) keep.push_back(i);
  return table.subset(keep);
}

namespace {
std::vector<std::int64_t> distinct_buildings(const ComponentTable& t) {
  std::vector<std::int64_t> ids(t.building_id.begin(), t.building_id.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}
}  // namespace

ComponentTable mask(const ComponentTable& table, double rate, std::uint64_t seed, MaskMode mode) {
  if (table.empty()) throw ArgumentError("cannot mask an empty table");
  if (mode == MaskMode::independent) return table.subset(sample_indices(table.size(), masked_size(table.size(), rate), seed));
  return filter_by_keys(table, sample_keys(distinct_buildings(table), rate, seed));
}

std::uint64_t table_mask_seed(std::uint64_t seed, double rate, ComponentKind kind) {
  return derive_seed(seed, hash_string("mask"), std::bit_cast<std::uint64_t>(rate), hash_string(to_string(kind)));
}

std::uint64_t key_mask_seed(std::uint64_t seed, double rate) {
  return derive_seed(seed, hash_string("mask-keys"), std::bit_cast<std::uint64_t>(rate));
}

TableSet mask_tables(const TableSet& tables, double rate, std::uint64_t seed, MaskMode mode) {
  TableSet out;
  if (mode == MaskMode::independent) {
    for (const auto& [kind, table] : tables) out.emplace(kind, mask(table, rate, table_mask_seed(seed, rate, kind), mode));
    return out;
  }
  const auto it = tables.find(ComponentKind::building_monolithic);
  if (it == tables.end()) throw ArgumentError("consistent masking needs the building table");
  const auto keys = sample_keys(distinct_buildings(it->second), rate, key_mask_seed(seed, rate));
  for (const auto& [kind, table] : tables) out.emplace(kind, filter_by_keys(table, keys));
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

ShapeClass split_shape(std::string_view split) {
  if (split == "train_box" || split == "test_box") return ShapeClass::box;
  if (split == "test_random") return ShapeClass::random;
  if (split == "test_representative") return ShapeClass::representative;
  throw ArgumentError("unknown split '" + std::string(split) + "'");
}

std::string test_split_name(ShapeClass shape) { return "test_" + std::string(to_string(shape)); }

std::vector<std::string> table_columns(ComponentKind kind) {
  std::vector<std::string> c = {"building_id", "element_id", "hour_index"};
  for (const auto& n : feature_names(kind)) c.push_back(n);
  c.emplace_back("label");
  return c;
}

std::filesystem::path table_path(const std::filesystem::path& dir, ComponentKind kind, std::string_view split) {
  return dir / (std::string(to_string(kind)) + "_" + std::string(split) + ".csv");
}

namespace {

void format_row(std::string& line, const ComponentTable& t, std::size_t i) {
  line.clear();
  append_int(line, t.building_id[i]);
  line.push_back(',');
  append_int(line, t.element_id[i]);
  line.push_back(',');
  append_int(line, t.hour_index[i]);
  for (double v : t.features.row(i)) {
    line.push_back(',');
    append_fixed(line, v, 6);
  }
  line.push_back(',');
  append_fixed(line, t.labels[i], 6);
}

void parse_row(const csv::Reader& in, ComponentTable& out, std::vector<double>& x) {
  const std::size_t f = out.feature_names.size();
  const auto hour = in.integer(2);
  if (hour < 0 || hour >= kHours) in.fail(2, "hour_index out of range");
  for (std::size_t c = 0; c < f; ++c) x[c] = in.number(3 + c);
  out.add_row(in.integer(0), static_cast<std::int32_t>(in.integer(1)), static_cast<int>(hour), x, in.number(3 + f));
}

/// Cheap prefix parse of "building_id,element_id,hour_index," for key filtering.
bool line_key(std::string_view line, std::int64_t& building, int& hour) {
  const char* p = line.data();
  const char* end = p + line.size();
  auto r1 = std::from_chars(p, end, building);
  if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ',') return false;
  const char* q = static_cast<const char*>(std::memchr(r1.ptr + 1, ',', static_cast<std::size_t>(end - r1.ptr - 1)));
  if (!q) return false;
  auto r2 = std::from_chars(q + 1, end, hour);
  return r2.ec == std::errc();
}

}  // namespace

void write_table(const ComponentTable& table, const std::filesystem::path& path) {
  csv::Writer out(path);
  out.write_header(table_columns(table.kind));
  std::string line;
  for (std::size_t i = 0; i < table.size(); ++i) {
    format_row(line, table, i);
    out.write_line(line);
  }
  out.close();
}

ComponentTable read_table(const std::filesystem::path& path, ComponentKind kind) {
  csv::Reader in(path, table_columns(kind));
  ComponentTable out(kind);
  std::vector<double> x(out.feature_names.size());
  while (in.next_row()) parse_row(in, out, x);
  return out;
}

ComponentTable read_table_rows(const std::filesystem::path& path, ComponentKind kind,
                               std::span<const std::size_t> indices) {
  csv::Reader in(path, table_columns(kind));
  ComponentTable out(kind);
  out.reserve(indices.size());
  std::vector<double> x(out.feature_names.size());
  std::size_t row = 0;
  for (auto target : indices) {
    if (target < row) throw ArgumentError("read_table_rows: indices must be ascending and distinct");
    while (row < target) {
      if (!in.skip_row()) throw ParseError(path.string() + ": fewer rows than requested index");
      ++row;
    }
    if (!in.next_row()) throw ParseError(path.string() + ": fewer rows than requested index");
    ++row;
    parse_row(in, out, x);
  }
  return out;
}

ComponentTable read_table_keys(const std::filesystem::path& path, ComponentKind kind, const KeySet& keys) {
  ComponentTable out(kind);
  std::vector<double> x(out.feature_names.size());
  // Filter on the raw line prefix and only fully parse the survivors.
  std::vector<std::uint64_t> lines;
  {
    std::ifstream probe(path);
    if (!probe) throw ParseError(path.string() + ": missing or unreadable file");
    std::string line;
    std::getline(probe, line);
    std::uint64_t row = 0;
    while (std::getline(probe, line)) {
      std::int64_t b = 0;
      int h = 0;
      if (line.empty()) continue;
      if (!line_key(line, b, h)) throw ParseError(path.string() + ": line " + std::to_string(row + 2) + ": bad key prefix");
      if (keys.contains(pack_key(b, h))) lines.push_back(row);
      ++row;
    }
  }
  std::vector<std::size_t> idx(lines.begin(), lines.end());
  return read_table_rows(path, kind, idx);
}

void write_tables(const std::filesystem::path& dir, std::string_view split, const TableSet& tables) {
  for (const auto& [kind, table] : tables) write_table(table, table_path(dir, kind, split));
}

TableSet read_tables(const std::filesystem::path& dir, std::string_view split) {
  TableSet out;
  for (auto k : kAllKinds) out.emplace(k, read_table(table_path(dir, k, split), k));
  return out;
}

struct TableWriter::Impl {
  std::map<ComponentKind, std::unique_ptr<csv::Writer>> writers;
  std::string line;
};

TableWriter::TableWriter(const std::filesystem::path& dir, std::string_view split) : impl_(std::make_unique<Impl>()) {
  for (auto k : kAllKinds) {
    auto w = std::make_unique<csv::Writer>(table_path(dir, k, split));
    w->write_header(table_columns(k));
    impl_->writers.emplace(k, std::move(w));
  }
}

TableWriter::~TableWriter() = default;

void TableWriter::add(const TableSet& rows) {
  for (const auto& [kind, table] : rows) {
    auto& w = *impl_->writers.at(kind);
    for (std::size_t i = 0; i < table.size(); ++i) {
      format_row(impl_->line, table, i);
      w.write_line(impl_->line);
    }
  }
}

void TableWriter::close() {
  for (auto& [kind, w] : impl_->writers) w->close();
}

std::map<ComponentKind, std::uint64_t> TableWriter::row_counts() const {
  std::map<ComponentKind, std::uint64_t> out;
  for (const auto& [kind, w] : impl_->writers) out[kind] = w->lines_written() - 1;
  return out;
}

// ---------------------------------------------------------------------------
// Manifest and generation
// ---------------------------------------------------------------------------

std::int64_t GenConfig::scaled_train() const {
  return std::max<std::int64_t>(1, std::llround(static_cast<double>(train_buildings) * scale));
}
std::int64_t GenConfig::scaled_test() const {
  return std::max<std::int64_t>(1, std::llround(static_cast<double>(test_buildings) * scale));
}

const SplitInfo& DatasetManifest::split(std::string_view name) const {
  const auto it = splits.find(std::string(name));
  if (it == splits.end()) throw ArgumentError("dataset has no split '" + std::string(name) + "'");
  return it->second;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& dir) {
  json j;
  j["generator_version"] = m.generator_version;
  j["master_seed"] = m.master_seed;
  j["weather_seed"] = m.weather_seed;
  j["train_buildings"] = m.train_buildings;
  j["test_buildings"] = m.test_buildings;
  j["scale"] = m.scale;
  j["complete"] = m.complete;
  j["building_seed"] = "derive_seed(master_seed, hash(split), building_id)";
  json splits = json::object();
  for (const auto& [name, s] : m.splits) {
    json js;
    js["shape_class"] = std::string(to_string(s.shape));
    js["n_buildings"] = s.n_buildings;
    json rows = json::object();
    for (const auto& [k, n] : s.rows) rows[std::string(to_string(k))] = n;
    js["rows"] = rows;
    splits[name] = js;
  }
  j["splits"] = splits;
  const auto tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, dir / "manifest.json");
}

DatasetManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": missing manifest");
  json j;
  try {
    in >> j;
    DatasetManifest m;
    m.generator_version = j.at("generator_version").get<std::uint64_t>();
    if (m.generator_version != kGeneratorVersion)
      throw ParseError(path.string() + ": generator version " + std::to_string(m.generator_version) +
                       " does not match " + std::to_string(kGeneratorVersion));
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.weather_seed = j.at("weather_seed").get<std::uint64_t>();
    m.train_buildings = j.at("train_buildings").get<std::int64_t>();
    m.test_buildings = j.at("test_buildings").get<std::int64_t>();
    m.scale = j.at("scale").get<double>();
    m.complete = j.at("complete").get<bool>();
    for (const auto& [name, js] : j.at("splits").items()) {
      SplitInfo s;
      s.name = name;
      s.shape = parse_shape_class(js.at("shape_class").get<std::string>());
      s.n_buildings = js.at("n_buildings").get<std::int64_t>();
      for (const auto& [k, n] : js.at("rows").items()) s.rows[parse_component_kind(k)] = n.get<std::uint64_t>();
      m.splits.emplace(name, std::move(s));
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

DatasetManifest generate_dataset(const std::filesystem::path& dir, const GenConfig& config) {
  namespace fs = std::filesystem;
  if (!(config.scale > 0.0)) throw ArgumentError("scale must be positive");
  if (fs::exists(dir) && !fs::is_empty(dir) && !config.force)
    throw ArgumentError("output directory " + dir.string() + " is not empty (use --force)");
  if (fs::exists(dir) && config.force) {
    for (const auto& entry : fs::directory_iterator(dir)) fs::remove_all(entry.path());
  }
  fs::create_directories(dir);

  DatasetManifest m;
  m.master_seed = config.master_seed;
  m.weather_seed = derive_seed(config.master_seed, hash_string("weather-series"));
  m.train_buildings = config.scaled_train();
  m.test_buildings = config.scaled_test();
  m.scale = config.scale;
  m.complete = false;
  write_manifest(m, dir);

  const auto weather = generate_weather(m.weather_seed);
  write_weather(weather, dir / "weather.csv");

  for (auto split : kSplits) {
    SplitInfo info;
    info.name = std::string(split);
    info.shape = split_shape(split);
    info.n_buildings = split == "train_box" ? m.train_buildings : m.test_buildings;
    DesignWriter designs(dir, split);
    TableWriter tables(dir, split);
    for (std::int64_t b = 0; b < info.n_buildings; ++b) {
      const auto d = sample_design(info.shape, building_seed(config.master_seed, split, b), b);
      designs.add(d);
      tables.add(building_rows(d, weather));
    }
    designs.close();
    tables.close();
    info.rows = tables.row_counts();
    m.splits.emplace(info.name, std::move(info));
    write_manifest(m, dir);
  }
  m.complete = true;
  write_manifest(m, dir);
  return m;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  DatasetManifest m = dataset.manifest;
  write_weather(dataset.weather, dir / "weather.csv");
  for (const auto& [name, split] : dataset.splits) {
    write_designs(dir, name, split.designs);
    write_tables(dir, name, split.tables);
    auto& info = m.splits[name];
    info.name = name;
    info.shape = split_shape(name);
    info.n_buildings = static_cast<std::int64_t>(split.designs.size());
    for (const auto& [k, t] : split.tables) info.rows[k] = t.size();
  }
  m.complete = true;
  write_manifest(m, dir);
}

Dataset read_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.manifest = read_manifest(dir);
  ds.weather = read_weather(dir / "weather.csv");
  ds.weather.seed = ds.manifest.weather_seed;
  for (const auto& [name, info] : ds.manifest.splits) {
    SplitData s;
    s.designs = read_designs(dir, name);
    s.tables = read_tables(dir, name);
    ds.splits.emplace(name, std::move(s));
  }
  return ds;
}

}  // namespace bemlab
