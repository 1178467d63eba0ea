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

#include "bemlab/cbml.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"

namespace bemlab::cbml {
namespace {

gbdt::Hyperparams quick() {
  gbdt::Hyperparams h;
  h.max_rounds = 400;
  h.patience = 50;
  return h;
}

class Fixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    weather_ = new WeatherSeries(generate_weather(0));
    std::vector<BuildingDesign> designs;
    for (std::int64_t b = 0; b < 4; ++b) designs.push_back(sample_box(static_cast<std::uint64_t>(b) + 50, b));
    tables_ = new TableSet(build_tables(designs, *weather_));
    set_ = new ComponentModelSet(train_cbml(*tables_, quick(), 1));
  }
  static void TearDownTestSuite() {
    delete set_;
    delete tables_;
    delete weather_;
  }
  static WeatherSeries* weather_;
  static TableSet* tables_;
  static ComponentModelSet* set_;
};
WeatherSeries* Fixture::weather_ = nullptr;
TableSet* Fixture::tables_ = nullptr;
ComponentModelSet* Fixture::set_ = nullptr;

TEST_F(Fixture, FullDataComponentsFitTheirTables) {
  for (auto k : kComponentKinds) {
    const auto& t = tables_->at(k);
    const auto pred = set_->at(k).predict(t);
    if (k == ComponentKind::ground_floor) {
      // One constant flow per building: four distinct labels.
      EXPECT_GE(oracle::r2(t.labels, pred), 0.9) << to_string(k);
    } else {
      EXPECT_GE(oracle::r2(t.labels, pred), 0.95) << to_string(k);
    }
  }
}

TEST_F(Fixture, SetIsDeterministic) {
  const auto again = train_cbml(*tables_, quick(), 1);
  for (auto k : kComponentKinds) {
    const auto& a = dynamic_cast<const GbdtComponent&>(set_->at(k)).model();
    const auto& b = dynamic_cast<const GbdtComponent&>(again.at(k)).model();
    EXPECT_EQ(gbdt::serialize(a), gbdt::serialize(b)) << to_string(k);
  }
}

TEST_F(Fixture, PerKindSeedsDiffer) {
  const auto& a = dynamic_cast<const GbdtComponent&>(set_->at(ComponentKind::roof)).model();
  const auto& b = dynamic_cast<const GbdtComponent&>(set_->at(ComponentKind::infiltration)).model();
  EXPECT_NE(a.seed, b.seed);
}

TEST_F(Fixture, OneRowWallTableTrains) {
  auto masked = *tables_;
  auto& walls = masked.at(ComponentKind::wall_window);
  const std::size_t first = 0;
  walls = walls.subset(std::span(&first, 1));
  ComponentModelSet s;
  ASSERT_NO_THROW(s = train_cbml(masked, quick(), 2));
  const auto pred = s.at(ComponentKind::wall_window).predict(tables_->at(ComponentKind::wall_window));
  for (double v : pred) EXPECT_DOUBLE_EQ(v, walls.labels.front());
}

TEST_F(Fixture, EmptyTableNamesKind) {
  auto masked = *tables_;
  masked.at(ComponentKind::infiltration) = ComponentTable(ComponentKind::infiltration);
  try {
    train_cbml(masked, quick(), 2);
    FAIL() << "expected an error";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("infiltration"), std::string::npos) << e.what();
  }
}

TEST_F(Fixture, SchemaIsLocked) {
  const auto& roof = tables_->at(ComponentKind::roof);
  auto model = gbdt::train(roof.features, roof.labels, quick(), 0, {"a", "b", "c"});
  EXPECT_THROW(GbdtComponent(ComponentKind::roof, model), ArgumentError);
  EXPECT_THROW(set_->at(ComponentKind::wall_window).predict(roof), ArgumentError);
  ComponentTable bad = roof;
  bad.kind = ComponentKind::wall_window;
  EXPECT_THROW(set_->at(ComponentKind::wall_window).predict(bad), ArgumentError);
}

TEST_F(Fixture, ComposedOutputIsNonNegative) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto d = sample_design(static_cast<ShapeClass>(s % 3), s + 900);
    const auto out = predict_building_cbml(*set_, d, *weather_);
    ASSERT_EQ(out.size(), 312u);
    for (double v : out) EXPECT_GE(v, 0.0);
  }
}

TEST_F(Fixture, AblationIsIsolated) {
  const auto d = sample_box(77);
  const auto rows = building_rows(d, *weather_);
  const auto before = compose(*set_, d, rows);
  const auto mean = ablate_component(*set_, ComponentKind::wall_window, AblationStrategy::mean, 5);
  EXPECT_EQ(mean.ablation, "wall_window:mean");
  for (auto k : kComponentKinds)
    if (k != ComponentKind::wall_window) EXPECT_EQ(mean.models.at(k), set_->models.at(k));
  const auto ablated = compose(mean, d, rows);
  for (double v : ablated.building) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
  const double m = set_->stats.at(ComponentKind::wall_window).mean;
  for (double v : ablated.component.at(ComponentKind::wall_window)) EXPECT_EQ(v, m);
  // The original set is untouched.
  EXPECT_EQ(compose(*set_, d, rows).building, before.building);

  const auto noisy1 = ablate_component(*set_, ComponentKind::wall_window, AblationStrategy::noise, 5);
  const auto noisy2 = ablate_component(*set_, ComponentKind::wall_window, AblationStrategy::noise, 5);
  const auto noisy3 = ablate_component(*set_, ComponentKind::wall_window, AblationStrategy::noise, 6);
  const auto a = compose(noisy1, d, rows).component.at(ComponentKind::wall_window);
  EXPECT_EQ(a, compose(noisy2, d, rows).component.at(ComponentKind::wall_window));
  EXPECT_NE(a, compose(noisy3, d, rows).component.at(ComponentKind::wall_window));
  EXPECT_NE(a, before.component.at(ComponentKind::wall_window));
  EXPECT_THROW(parse_ablation_strategy("zero"), ArgumentError);
}

TEST_F(Fixture, ModelDirectoryRoundTrip) {
  testing_util::TempDir dir("models");
  save_model_set(dir / "cbml", *set_, {{"rate", "1"}});
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "cbml")) files += e.path().extension() == ".model";
  EXPECT_EQ(files, 5);
  const auto loaded = load_model_directory(dir / "cbml");
  EXPECT_EQ(loaded.architecture, "cbml");
  EXPECT_EQ(loaded.info.at("rate"), "1");
  const auto d = sample_random(4);
  EXPECT_EQ(predict_building_cbml(loaded.set, d, *weather_), predict_building_cbml(*set_, d, *weather_));

  const auto mono = train_monolithic(tables_->at(ComponentKind::building_monolithic), quick(), 3);
  save_monolithic(dir / "mono", mono, {});
  const auto lm = load_model_directory(dir / "mono");
  ASSERT_TRUE(lm.monolithic.has_value());
  EXPECT_EQ(*lm.monolithic, mono);
  EXPECT_LE(lm.monolithic->best_rounds, 5000);

  EXPECT_THROW(load_model_directory(dir / "nowhere"), LoadError);
  EXPECT_THROW(save_model_set(dir / "bad", ablate_component(*set_, ComponentKind::roof, AblationStrategy::mean, 1), {}),
               ArgumentError);
}

TEST_F(Fixture, MonolithicModel) {
  const auto& b = tables_->at(ComponentKind::building_monolithic);
  const auto m = train_monolithic(b, quick(), 3);
  EXPECT_GE(oracle::r2(b.labels, predict_monolithic(m, b)), 0.9);
  EXPECT_EQ(gbdt::serialize(m), gbdt::serialize(train_monolithic(b, quick(), 3)));
  const auto d = sample_representative(3);
  const auto p = predict_monolithic(m, d, *weather_);
  EXPECT_EQ(p, predict_monolithic(m, d, *weather_));
  for (double v : p) EXPECT_GE(v, 0.0);
  EXPECT_THROW(train_monolithic(ComponentTable(ComponentKind::building_monolithic), quick(), 0), ArgumentError);
  EXPECT_THROW(train_monolithic(tables_->at(ComponentKind::roof), quick(), 0), ArgumentError);

  const auto idx = sample_indices(b.size(), 195, 1);
  EXPECT_NO_THROW(train_monolithic(b.subset(idx), quick(), 0));

  const auto flat = gbdt::constant_model(1234.0, b.features.cols(), b.feature_names);
  for (double v : predict_monolithic(flat, d, *weather_)) EXPECT_EQ(v, 1234.0);
}

TEST(Composition, PhysicsStandInsReproduceOracle) {
  const auto w = generate_weather(3);
  const auto set = physics_oracle_set();
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto d = sample_design(static_cast<ShapeClass>(s % 3), s + 7);
    if (s % 2 == 0) d.tau = 0.0;
    const auto rows = building_rows(d, w);
    const auto out = compose(set, d, rows);
    const auto truth = oracle::building_truth(d, w);
    for (std::size_t t = 0; t < 312; ++t)
      ASSERT_NEAR(out.building[t], truth[t], 1e-9 * std::max(1.0, truth[t])) << "design " << s << " hour " << t;
    for (auto k : {ComponentKind::wall_window, ComponentKind::roof, ComponentKind::ground_floor,
                   ComponentKind::infiltration}) {
      const auto& labels = rows.at(k).labels;
      const auto& pred = out.component.at(k);
      for (std::size_t i = 0; i < labels.size(); ++i)
        ASSERT_NEAR(pred[i], labels[i], 1e-9 * std::max(1.0, std::abs(labels[i])));
    }
  }
}

TEST(Composition, SingleZoneAndClamp) {
  const auto w = generate_weather(1);
  const Wing wing{{0, 0, 20, 20}, 1};
  const EnvelopeParams env{0.3, 1.2, 0.2, 0.5, 0.5, 0.5, 5.0, 0.0, {0.2, 0.3, 0.4, 0.5}};
  const auto d = assemble_design(0, ShapeClass::box, "box", std::span(&wing, 1), env);
  auto set = physics_oracle_set();
  const auto rows = building_rows(d, w);
  const auto out = compose(set, d, rows);
  ASSERT_EQ(out.zones.size(), 1u);
  EXPECT_EQ(out.building, out.zones.front());

  set.models[ComponentKind::zone] = std::make_shared<ConstantComponent>(ComponentKind::zone, -50.0);
  for (double v : compose(set, d, rows).building) EXPECT_EQ(v, 0.0);
}

TEST(Composition, MissingComponentIsRejected) {
  auto set = physics_oracle_set();
  set.models.erase(ComponentKind::roof);
  const auto d = sample_box(1);
  EXPECT_THROW(compose(set, d, building_rows(d, generate_weather(0))), ArgumentError);
}

}  // namespace
}  // namespace bemlab::cbml
