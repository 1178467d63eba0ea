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
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bemlab/buildgen.hpp"
#include "bemlab/common.hpp"
#include "bemlab/physics.hpp"
#include "bemlab/weather.hpp"

namespace bemlab {

enum class ComponentKind : std::uint8_t { wall_window, roof, ground_floor, infiltration, zone, building_monolithic };

inline constexpr std::array<ComponentKind, 6> kAllKinds = {
    ComponentKind::wall_window,  ComponentKind::roof, ComponentKind::ground_floor,
    ComponentKind::infiltration, ComponentKind::zone, ComponentKind::building_monolithic};

/// The five kinds that make up a component model set.
inline constexpr std::array<ComponentKind, 5> kComponentKinds = {ComponentKind::wall_window, ComponentKind::roof,
                                                                 ComponentKind::ground_floor,
                                                                 ComponentKind::infiltration, ComponentKind::zone};

std::string_view to_string(ComponentKind k);
ComponentKind parse_component_kind(std::string_view s);
const std::vector<std::string>& feature_names(ComponentKind k);
/// Columns of a kind's schema that change from hour to hour.
const std::vector<std::size_t>& hourly_features(ComponentKind k);

/// Long-format labeled rows of one component kind.
struct ComponentTable {
  ComponentKind kind = ComponentKind::wall_window;
  std::vector<std::string> feature_names;
  std::vector<std::int64_t> building_id;
  std::vector<std::int32_t> element_id;
  std::vector<std::int16_t> hour_index;
  Matrix features;
  std::vector<double> labels;

  ComponentTable() = default;
  explicit ComponentTable(ComponentKind k);

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  void reserve(std::size_t n);
  void add_row(std::int64_t building, std::int32_t element, int hour, std::span<const double> x, double label);
  void append(const ComponentTable& other);
  /// Rows at the given ascending indices.
  ComponentTable subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const ComponentTable&, const ComponentTable&) = default;
};

using TableSet = std::map<ComponentKind, ComponentTable>;

/// Builds the labeled rows of every kind for one simulated building. Rows are
/// ordered element-major (element, then hour).
TableSet building_rows(const BuildingDesign& design, const WeatherSeries& weather);
TableSet building_rows(const BuildingDesign& design, const WeatherSeries& weather,
                       const physics::SimulatedBuilding& sim);
TableSet build_tables(std::span<const BuildingDesign> designs, const WeatherSeries& weather);

// ---------------------------------------------------------------------------
// Masking
// ---------------------------------------------------------------------------

enum class MaskMode : std::uint8_t { independent, consistent };
std::string_view to_string(MaskMode m);
MaskMode parse_mask_mode(std::string_view s);

/// max(1, round(rate · n)); rate must lie in (0, 1].
std::size_t masked_size(std::size_t n, double rate);
/// Sorted uniform sample of `k` distinct indices from [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

constexpr std::uint64_t pack_key(std::int64_t building, int hour) {
  return (static_cast<std::uint64_t>(building) << 16) | static_cast<std::uint64_t>(hour);
}
using KeySet = std::unordered_set<std::uint64_t>;

/// Draws a shared (building_id, hour_index) key set of size masked_size(n, rate)
/// from the building-hour universe.
KeySet sample_keys(std::span<const std::int64_t> building_ids, double rate, std::uint64_t seed);

ComponentTable mask(const ComponentTable& table, double rate, std::uint64_t seed, MaskMode mode);
ComponentTable filter_by_keys(const ComponentTable& table, const KeySet& keys);

/// Seed used for one kind's draw in independent mode.
std::uint64_t table_mask_seed(std::uint64_t seed, double rate, ComponentKind kind);
/// Seed used for the shared key draw in consistent mode.
std::uint64_t key_mask_seed(std::uint64_t seed, double rate);

/// Masks every table. Independent mode draws per kind with table_mask_seed;
/// consistent mode draws one key set from the building universe of `tables`.
TableSet mask_tables(const TableSet& tables, double rate, std::uint64_t seed, MaskMode mode);

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline const std::array<std::string_view, 4> kSplits = {"train_box", "test_box", "test_random",
                                                        "test_representative"};
ShapeClass split_shape(std::string_view split);
std::string test_split_name(ShapeClass shape);

std::vector<std::string> table_columns(ComponentKind kind);
std::filesystem::path table_path(const std::filesystem::path& dir, ComponentKind kind, std::string_view split);

void write_table(const ComponentTable& table, const std::filesystem::path& path);
ComponentTable read_table(const std::filesystem::path& path, ComponentKind kind);
/// Parses only the rows at the given ascending 0-based indices.
ComponentTable read_table_rows(const std::filesystem::path& path, ComponentKind kind,
                               std::span<const std::size_t> indices);
/// Parses only the rows whose (building_id, hour_index) is in `keys`.
ComponentTable read_table_keys(const std::filesystem::path& path, ComponentKind kind, const KeySet& keys);

void write_tables(const std::filesystem::path& dir, std::string_view split, const TableSet& tables);
TableSet read_tables(const std::filesystem::path& dir, std::string_view split);

/// Appends per-building rows to the six table files of one split.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& dir, std::string_view split);
  ~TableWriter();
  TableWriter(const TableWriter&) = delete;
  TableWriter& operator=(const TableWriter&) = delete;
  void add(const TableSet& rows);
  void close();
  std::map<ComponentKind, std::uint64_t> row_counts() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Dataset generation
// ---------------------------------------------------------------------------

struct GenConfig {
  std::uint64_t master_seed = 0;
  std::int64_t train_buildings = 5000;
  std::int64_t test_buildings = 1000;
  double scale = 1.0;
  bool force = false;

  std::int64_t scaled_train() const;
  std::int64_t scaled_test() const;
};

struct SplitInfo {
  std::string name;
  ShapeClass shape = ShapeClass::box;
  std::int64_t n_buildings = 0;
  std::map<ComponentKind, std::uint64_t> rows;
};

struct DatasetManifest {
  std::uint64_t generator_version = kGeneratorVersion;
  std::uint64_t master_seed = 0;
  std::uint64_t weather_seed = 0;
  std::int64_t train_buildings = 0;
  std::int64_t test_buildings = 0;
  double scale = 1.0;
  bool complete = false;
  std::map<std::string, SplitInfo> splits;

  const SplitInfo& split(std::string_view name) const;
};

void write_manifest(const DatasetManifest& m, const std::filesystem::path& dir);
DatasetManifest read_manifest(const std::filesystem::path& dir);

/// Weather, four splits of designs and tables, and manifest.json. Refuses a
/// non-empty `dir` unless `config.force` is set.
DatasetManifest generate_dataset(const std::filesystem::path& dir, const GenConfig& config);

/// In-memory view of one split: its designs and all tables.
struct SplitData {
  std::vector<BuildingDesign> designs;
  TableSet tables;
};
struct Dataset {
  DatasetManifest manifest;
  WeatherSeries weather;
  std::map<std::string, SplitData> splits;
};
/// Writes weather, designs, tables and a manifest whose row counts are taken
/// from the tables themselves.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace bemlab
