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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "test_util.hpp"

namespace bemlab {
namespace {

using testing_util::TempDir;

std::size_t column(ComponentKind k, const std::string& name) {
  const auto& n = feature_names(k);
  return static_cast<std::size_t>(std::find(n.begin(), n.end(), name) - n.begin());
}

TEST(Schema, ColumnCounts) {
  EXPECT_EQ(feature_names(ComponentKind::wall_window).size(), 12u);
  EXPECT_EQ(feature_names(ComponentKind::roof).size(), 3u);
  EXPECT_EQ(feature_names(ComponentKind::ground_floor).size(), 2u);
  EXPECT_EQ(feature_names(ComponentKind::infiltration).size(), 3u);
  EXPECT_EQ(feature_names(ComponentKind::zone).size(), 5u);
  EXPECT_EQ(feature_names(ComponentKind::building_monolithic).size(), kMonolithicStaticCount + 7);
}

TEST(Schema, HourlyColumns) {
  EXPECT_EQ(hourly_features(ComponentKind::wall_window), (std::vector<std::size_t>{9, 10, 11}));
  EXPECT_EQ(hourly_features(ComponentKind::roof), (std::vector<std::size_t>{2}));
  EXPECT_TRUE(hourly_features(ComponentKind::ground_floor).empty());
  EXPECT_EQ(hourly_features(ComponentKind::building_monolithic).size(), 7u);
  EXPECT_EQ(hourly_features(ComponentKind::building_monolithic).front(), kMonolithicStaticCount);
}

TEST(Schema, KindNamesRoundTrip) {
  for (auto k : kAllKinds) EXPECT_EQ(parse_component_kind(to_string(k)), k);
  EXPECT_THROW(parse_component_kind("chimney"), ArgumentError);
}

TEST(BuildingRows, BoxCardinality) {
  const auto w = generate_weather(0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto d = sample_box(s, static_cast<std::int64_t>(s));
    const auto rows = building_rows(d, w);
    EXPECT_EQ(rows.at(ComponentKind::wall_window).size(), d.zones.size() * 4 * 312);
    EXPECT_EQ(rows.at(ComponentKind::zone).size(), d.zones.size() * 312);
    EXPECT_EQ(rows.at(ComponentKind::infiltration).size(), d.zones.size() * 312);
    EXPECT_EQ(rows.at(ComponentKind::roof).size(), 312u);
    EXPECT_EQ(rows.at(ComponentKind::ground_floor).size(), 312u);
    EXPECT_EQ(rows.at(ComponentKind::building_monolithic).size(), 312u);
  }
}

TEST(BuildingRows, SingleZone) {
  const Wing wing{{0, 0, 15, 15}, 1};
  const EnvelopeParams env{0.3, 1.2, 0.2, 0.5, 0.5, 0.5, 5.0, 2.0, {0.2, 0.3, 0.4, 0.5}};
  const auto d = assemble_design(3, ShapeClass::box, "box", std::span(&wing, 1), env);
  const auto rows = building_rows(d, generate_weather(0));
  EXPECT_EQ(rows.at(ComponentKind::zone).size(), 312u);
}

TEST(BuildingRows, LabelsMatchHeatBalance) {
  const auto w = generate_weather(2);
  for (std::uint64_t s = 0; s < 12; ++s) {
    const auto d = sample_design(static_cast<ShapeClass>(s % 3), s, static_cast<std::int64_t>(s));
    const auto rows = building_rows(d, w);
    const auto truth = oracle::building_truth(d, w);
    const auto& b = rows.at(ComponentKind::building_monolithic);
    for (std::size_t t = 0; t < 312; ++t) {
      EXPECT_EQ(b.hour_index[t], static_cast<std::int16_t>(t));
      EXPECT_EQ(b.element_id[t], -1);
      EXPECT_NEAR(b.labels[t], truth[t], 1e-9 * std::max(1.0, truth[t]));
    }

    // Zone rows carry the true component flows as features.
    const auto& z = rows.at(ComponentKind::zone);
    for (std::size_t i = 0; i < z.size(); i += 17) {
      const auto& zone = *std::find_if(d.zones.begin(), d.zones.end(),
                                       [&](const ZoneSpec& q) { return q.zone_id == z.element_id[i]; });
      const auto zt = oracle::zone_truth(zone, d, w);
      const auto t = static_cast<std::size_t>(z.hour_index[i]);
      double env = zt.roof[t] + zt.ground[t];
      for (const auto& wall : zt.walls) env += wall[t];
      EXPECT_NEAR(z.features(i, 0), env, 1e-9 * std::max(1.0, std::abs(env)));
      EXPECT_NEAR(z.features(i, 1), zt.infiltration[t], 1e-9 * std::max(1.0, zt.infiltration[t]));
      EXPECT_NEAR(z.labels[i], zt.load[t], 1e-9 * std::max(1.0, zt.load[t]));
      EXPECT_EQ(z.features(i, column(ComponentKind::zone, "tau")), d.tau);
    }
  }
}

TEST(BuildingRows, ElementMajorOrder) {
  const auto rows = building_rows(sample_random(4, 9), generate_weather(0));
  const auto& t = rows.at(ComponentKind::wall_window);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t.building_id[i], 9);
    EXPECT_EQ(t.hour_index[i], static_cast<std::int16_t>(i % 312));
    if (i % 312 != 0) EXPECT_EQ(t.element_id[i], t.element_id[i - 1]);
  }
}

TEST(BuildTables, BuildingTableOneRowPerBuildingHour) {
  std::vector<BuildingDesign> designs;
  for (std::int64_t b = 0; b < 10; ++b) designs.push_back(sample_box(static_cast<std::uint64_t>(b), b));
  const auto tables = build_tables(designs, generate_weather(0));
  EXPECT_EQ(tables.at(ComponentKind::building_monolithic).size(), 10u * 312u);
}

TEST(Masking, DefaultRowBudgets) {
  const std::size_t n = 1'560'000;
  EXPECT_EQ(masked_size(n, 0.01), 15'600u);
  EXPECT_EQ(masked_size(n, 0.001), 1'560u);
  EXPECT_EQ(masked_size(n, 0.0005), 780u);
  EXPECT_EQ(masked_size(n, 0.00025), 390u);
  EXPECT_EQ(masked_size(n, 0.000125), 195u);
  EXPECT_EQ(masked_size(10, 0.000125), 1u);
  EXPECT_EQ(masked_size(n, 1.0), n);
  EXPECT_THROW(masked_size(n, 0.0), ArgumentError);
  EXPECT_THROW(masked_size(n, 1.5), ArgumentError);
  EXPECT_THROW(masked_size(n, -0.1), ArgumentError);
}

TEST(Masking, SampleIndices) {
  const auto a = sample_indices(100000, 500, 7);
  ASSERT_EQ(a.size(), 500u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 500u);
  EXPECT_LT(a.back(), 100000u);
  EXPECT_EQ(a, sample_indices(100000, 500, 7));
  EXPECT_NE(a, sample_indices(100000, 500, 8));
  EXPECT_EQ(sample_indices(5, 5, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_THROW(sample_indices(5, 6, 1), ArgumentError);
}

TEST(Masking, SampleIndicesIsRoughlyUniform) {
  // 2000 draws of 10 from 100: each index expected 200 times, sd about 13.4.
  std::vector<int> hits(100, 0);
  for (std::uint64_t s = 0; s < 2000; ++s)
    for (auto i : sample_indices(100, 10, s)) ++hits[i];
  for (int h : hits) {
    EXPECT_GT(h, 130);
    EXPECT_LT(h, 270);
  }
}

class MaskedTables : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::vector<BuildingDesign> designs;
    for (std::int64_t b = 0; b < 20; ++b) designs.push_back(sample_box(static_cast<std::uint64_t>(b), b));
    tables_ = new TableSet(build_tables(designs, generate_weather(0)));
  }
  static void TearDownTestSuite() {
    delete tables_;
    tables_ = nullptr;
  }
  static TableSet* tables_;
};
TableSet* MaskedTables::tables_ = nullptr;

TEST_F(MaskedTables, FullRateIsIdentity) {
  for (auto mode : {MaskMode::independent, MaskMode::consistent}) {
    const auto m = mask_tables(*tables_, 1.0, 3, mode);
    for (auto k : kAllKinds) EXPECT_EQ(m.at(k), tables_->at(k));
  }
}

TEST_F(MaskedTables, IndependentSizes) {
  const auto m = mask_tables(*tables_, 0.01, 3, MaskMode::independent);
  for (auto k : kAllKinds) EXPECT_EQ(m.at(k).size(), masked_size(tables_->at(k).size(), 0.01));
  EXPECT_EQ(m, mask_tables(*tables_, 0.01, 3, MaskMode::independent));
  EXPECT_NE(m, mask_tables(*tables_, 0.01, 4, MaskMode::independent));
}

TEST_F(MaskedTables, ConsistentModeSharesKeys) {
  const auto m = mask_tables(*tables_, 0.01, 3, MaskMode::consistent);
  const auto& b = m.at(ComponentKind::building_monolithic);
  EXPECT_EQ(b.size(), masked_size(tables_->at(ComponentKind::building_monolithic).size(), 0.01));
  std::set<std::uint64_t> keys;
  for (std::size_t i = 0; i < b.size(); ++i) keys.insert(pack_key(b.building_id[i], b.hour_index[i]));
  for (auto k : kComponentKinds) {
    const auto& t = m.at(k);
    EXPECT_FALSE(t.empty());
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_TRUE(keys.contains(pack_key(t.building_id[i], t.hour_index[i])));
    // Every full-table row with a selected key survives.
    std::size_t expected = 0;
    const auto& full = tables_->at(k);
    for (std::size_t i = 0; i < full.size(); ++i) expected += keys.contains(pack_key(full.building_id[i], full.hour_index[i]));
    EXPECT_EQ(t.size(), expected);
  }
}

TEST_F(MaskedTables, MaskModesParse) {
  EXPECT_EQ(parse_mask_mode("independent"), MaskMode::independent);
  EXPECT_EQ(parse_mask_mode("consistent"), MaskMode::consistent);
  EXPECT_THROW(parse_mask_mode("random"), ArgumentError);
}

TEST_F(MaskedTables, FileRoundTrip) {
  TempDir dir("tables");
  for (auto k : kAllKinds) {
    const auto& t = tables_->at(k);
    const auto p = dir / (std::string(to_string(k)) + ".csv");
    write_table(t, p);
    const auto r = read_table(p, k);
    ASSERT_EQ(r.size(), t.size());
    EXPECT_EQ(r.building_id, t.building_id);
    EXPECT_EQ(r.element_id, t.element_id);
    EXPECT_EQ(r.hour_index, t.hour_index);
    EXPECT_EQ(r.feature_names, t.feature_names);
    for (std::size_t i = 0; i < t.size(); i += 7) {
      EXPECT_NEAR(r.labels[i], t.labels[i], 5e-7);
      for (std::size_t c = 0; c < t.features.cols(); ++c) EXPECT_NEAR(r.features(i, c), t.features(i, c), 5e-7);
    }
    // A second write of the parsed table is byte-identical.
    const auto p2 = dir / (std::string(to_string(k)) + "-again.csv");
    write_table(r, p2);
    EXPECT_EQ(testing_util::slurp(p), testing_util::slurp(p2));
  }
}

TEST_F(MaskedTables, PartialReadsMatchFullRead) {
  TempDir dir("tables");
  const auto& t = tables_->at(ComponentKind::wall_window);
  const auto p = dir / "walls.csv";
  write_table(t, p);
  const auto full = read_table(p, ComponentKind::wall_window);
  const auto idx = sample_indices(full.size(), 300, 5);
  EXPECT_EQ(read_table_rows(p, ComponentKind::wall_window, idx), full.subset(idx));
  const auto keys = sample_keys(tables_->at(ComponentKind::building_monolithic).building_id, 0.05, 9);
  EXPECT_EQ(read_table_keys(p, ComponentKind::wall_window, keys), filter_by_keys(full, keys));
}

TEST_F(MaskedTables, CorruptCellIsNamed) {
  TempDir dir("tables");
  const auto p = dir / "roof_train_box.csv";
  write_table(tables_->at(ComponentKind::roof), p);
  auto text = testing_util::slurp(p);
  // Row 2 (line 3), column u_roof: the 5th field.
  std::size_t pos = text.find('\n', text.find('\n') + 1) + 1;
  for (int i = 0; i < 4; ++i) pos = text.find(',', pos) + 1;
  text.replace(pos, text.find(',', pos) - pos, "abc");
  testing_util::spit(p, text);
  try {
    read_table(p, ComponentKind::roof);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("roof_train_box.csv"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("u_roof"), std::string::npos) << msg;
  }
}

TEST_F(MaskedTables, HeaderMismatchAndMissingFile) {
  TempDir dir("tables");
  const auto p = dir / "roof.csv";
  write_table(tables_->at(ComponentKind::roof), p);
  EXPECT_THROW(read_table(p, ComponentKind::ground_floor), ParseError);
  EXPECT_THROW(read_table(dir / "nope.csv", ComponentKind::roof), ParseError);
}

TEST(Generate, ScaleFlag) {
  GenConfig c;
  c.scale = 0.1;
  EXPECT_EQ(c.scaled_train(), 500);
  EXPECT_EQ(c.scaled_test(), 100);
  EXPECT_EQ(GenConfig{}.scaled_train() * 312, 1'560'000);
}

TEST(Generate, SmallDatasetIsDeterministic) {
  TempDir a("gen"), b("gen");
  GenConfig c;
  c.train_buildings = 6;
  c.test_buildings = 3;
  c.master_seed = 11;
  const auto ma = generate_dataset(a.path(), c);
  generate_dataset(b.path(), c);
  EXPECT_TRUE(ma.complete);
  EXPECT_EQ(ma.split("train_box").n_buildings, 6);
  EXPECT_EQ(ma.split("test_random").n_buildings, 3);
  EXPECT_EQ(ma.split("train_box").rows.at(ComponentKind::building_monolithic), 6u * 312u);
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto name = entry.path().filename();
    EXPECT_EQ(testing_util::slurp(entry.path()), testing_util::slurp(b.path() / name)) << name;
  }
  const auto m = read_manifest(a.path());
  EXPECT_EQ(m.weather_seed, ma.weather_seed);
  EXPECT_EQ(m.split("test_representative").rows, ma.split("test_representative").rows);

  // Row counts in the manifest agree with the files.
  const auto random = read_tables(a.path(), "test_random");
  for (auto k : kAllKinds) EXPECT_EQ(random.at(k).size(), ma.split("test_random").rows.at(k));
}

TEST(Generate, RefusesNonEmptyDirectory) {
  TempDir dir("gen");
  testing_util::spit(dir / "stray.txt", "x");
  GenConfig c;
  c.train_buildings = 2;
  c.test_buildings = 1;
  EXPECT_THROW(generate_dataset(dir.path(), c), ArgumentError);
  c.force = true;
  EXPECT_NO_THROW(generate_dataset(dir.path(), c));
  EXPECT_FALSE(std::filesystem::exists(dir / "stray.txt"));
}

TEST(Generate, VersionMismatchIsRejected) {
  TempDir dir("gen");
  GenConfig c;
  c.train_buildings = 2;
  c.test_buildings = 1;
  generate_dataset(dir.path(), c);
  auto text = testing_util::slurp(dir / "manifest.json");
  const auto pos = text.find("\"generator_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 22, "\"generator_version\": 9");
  testing_util::spit(dir / "manifest.json", text);
  EXPECT_THROW(read_manifest(dir.path()), ParseError);
}

TEST(Generate, DatasetRoundTrip) {
  TempDir dir("gen");
  GenConfig c;
  c.train_buildings = 3;
  c.test_buildings = 2;
  generate_dataset(dir.path(), c);
  const auto d = read_dataset(dir.path());
  EXPECT_EQ(d.weather.size(), 312u);
  EXPECT_EQ(d.splits.size(), 4u);
  EXPECT_EQ(d.splits.at("train_box").designs.size(), 3u);
  EXPECT_EQ(d.splits.at("test_representative").designs.front().shape_class, ShapeClass::representative);
}

}  // namespace
}  // namespace bemlab
