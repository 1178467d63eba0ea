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

#include "bemlab/physics.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"

namespace bemlab::physics {
namespace {

BuildingDesign one_zone_design() {
  const Wing w{{0, 0, 12, 8}, 1};
  const EnvelopeParams env{0.3, 1.2, 0.2, 0.5, 0.5, 0.5, 5.0, 0.0, {0.2, 0.3, 0.4, 0.5}};
  return assemble_design(0, ShapeClass::box, "box", std::span(&w, 1), env);
}

WeatherSeries flat_weather(double t_out, double i_horiz) {
  WeatherSeries w;
  for (int t = 0; t < kHours; ++t) w.hours.push_back(make_hour(t, t_out, i_horiz));
  return w;
}

TEST(Flows, WallWindow) {
  auto d = one_zone_design();
  d.u_wall = 0.3;
  d.u_win = 1.2;
  d.shgc = 0.5;
  const WallElement south{0, Orientation::S, 10.0, 5.0};
  EXPECT_NEAR(wall_window_flow(south, d, make_hour(0, 0.0, 0.0)), 180.0, 1e-12);
  const auto sunny = make_hour(12, 0.0, 125.0);  // i_S = 200
  EXPECT_NEAR(wall_window_flow(south, d, sunny), -320.0, 1e-12);
  EXPECT_EQ(wall_window_flow(south, d, make_hour(0, 20.0, 0.0)), 0.0);
}

TEST(Flows, Roof) {
  auto d = one_zone_design();
  d.u_roof = 0.2;
  EXPECT_NEAR(roof_flow(100.0, d, make_hour(0, -5.0, 0.0)), 500.0, 1e-12);
  EXPECT_EQ(roof_flow(100.0, d, make_hour(0, 20.0, 0.0)), 0.0);
  EXPECT_NEAR(roof_flow(200.0, d, make_hour(0, -5.0, 0.0)), 2.0 * roof_flow(100.0, d, make_hour(0, -5.0, 0.0)), 1e-12);
}

TEST(Flows, Floor) {
  auto d = one_zone_design();
  d.u_floor = 0.5;
  EXPECT_NEAR(floor_flow(200.0, d), 1200.0, 1e-12);
  d.u_floor = 0.0;
  EXPECT_EQ(floor_flow(200.0, d), 0.0);
}

TEST(Flows, Infiltration) {
  auto d = one_zone_design();
  d.ach = 0.5;
  ZoneSpec z = d.zones.front();
  z.volume = 300.0;
  EXPECT_NEAR(infiltration_flow(z, d, make_hour(0, -5.0, 0.0)), 1275.0, 1e-9);
  EXPECT_EQ(infiltration_flow(z, d, make_hour(0, 20.0, 0.0)), 0.0);
  d.ach = 0.0;
  EXPECT_EQ(infiltration_flow(z, d, make_hour(0, -5.0, 0.0)), 0.0);
}

TEST(Flows, FloorFlowIgnoresWeather) {
  const auto d = one_zone_design();
  const auto sim = simulate_zone(d.zones.front(), d, generate_weather(2));
  ASSERT_EQ(sim.floor_flow.size(), 312u);
  for (double v : sim.floor_flow) EXPECT_EQ(v, sim.floor_flow.front());
}

TEST(Occupancy, Schedule) {
  EXPECT_EQ(occupancy(6), 0.3);
  EXPECT_EQ(occupancy(7), 1.0);
  EXPECT_EQ(occupancy(18), 1.0);
  EXPECT_EQ(occupancy(19), 0.3);
  EXPECT_EQ(occupancy(0), 0.3);
}

TEST(Smoothing, TauZeroIsIdentity) {
  const std::vector<double> d = {3.0, 0.0, 7.5, 1.0, 0.0};
  EXPECT_EQ(smooth_load(d, 0.0), d);
}

TEST(Smoothing, StepResponse) {
  std::vector<double> d(10, 0.0);
  d[0] = 1000.0;
  const auto h = smooth_load(d, 6.0);
  EXPECT_NEAR(h[0], 1000.0, 1e-12);
  EXPECT_NEAR(h[1], 857.142857142857, 1e-9);
  EXPECT_NEAR(h[2], 1000.0 * (6.0 / 7.0) * (6.0 / 7.0), 1e-9);
}

TEST(Zone, GainsAboveLossesClipToZero) {
  auto d = one_zone_design();
  d.q_int = 1e6;
  const auto sim = simulate_zone(d.zones.front(), d, generate_weather(0));
  for (double v : sim.demand) EXPECT_EQ(v, 0.0);
  for (double v : sim.load) EXPECT_EQ(v, 0.0);
}

TEST(Zone, ReductionWithoutGainsOrLag) {
  auto d = one_zone_design();
  d.q_int = 0.0;
  d.tau = 0.0;
  const auto w = generate_weather(4);
  const auto sim = simulate_zone(d.zones.front(), d, w);
  for (std::size_t t = 0; t < w.size(); ++t) {
    double flows = sim.infiltration[t];
    for (const auto& wall : sim.wall_flows) flows += wall[t];
    flows += sim.roof_flow[t] + sim.floor_flow[t];
    EXPECT_NEAR(sim.load[t], std::max(0.0, flows), 1e-9);
  }
}

TEST(Building, SumOfZones) {
  const auto w = generate_weather(1);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto d = sample_design(static_cast<ShapeClass>(s % 3), s);
    const auto b = simulate(d, w);
    for (std::size_t t = 0; t < w.size(); ++t) {
      double sum = 0.0;
      for (const auto& z : b.zones) {
        EXPECT_GE(z.load[t], 0.0);
        sum += z.load[t];
      }
      EXPECT_EQ(b.building_load[t], sum);
    }
  }
}

TEST(Building, MatchesIndependentHeatBalance) {
  const auto w = generate_weather(9);
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto d = sample_design(static_cast<ShapeClass>(s % 3), s + 100);
    const auto b = simulate(d, w);
    for (std::size_t zi = 0; zi < d.zones.size(); ++zi) {
      const auto truth = oracle::zone_truth(d.zones[zi], d, w);
      for (std::size_t t = 0; t < w.size(); ++t) {
        ASSERT_NEAR(b.zones[zi].load[t], truth.load[t], 1e-9 * std::max(1.0, truth.load[t]));
        ASSERT_NEAR(b.zones[zi].infiltration[t], truth.infiltration[t], 1e-9 * std::max(1.0, truth.infiltration[t]));
        for (std::size_t k = 0; k < d.zones[zi].walls.size(); ++k)
          ASSERT_NEAR(b.zones[zi].wall_flows[k][t], truth.walls[k][t], 1e-9 * std::max(1.0, std::abs(truth.walls[k][t])));
      }
    }
  }
}

TEST(Building, DoublingGeometryDoublesFlows) {
  const auto w = generate_weather(6);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto d = sample_design(static_cast<ShapeClass>(s % 3), s);
    d.q_int = 0.0;
    auto big = d;
    for (auto& z : big.zones) {
      z.floor_area *= 2.0;
      z.volume *= 2.0;
      z.roof_area_share *= 2.0;
      z.ground_area_share *= 2.0;
      for (auto& e : z.walls) {
        e.wall_area *= 2.0;
        e.window_area *= 2.0;
      }
    }
    const auto a = simulate(d, w);
    const auto b = simulate(big, w);
    for (std::size_t zi = 0; zi < d.zones.size(); ++zi) {
      const auto& za = a.zones[zi];
      const auto& zb = b.zones[zi];
      for (std::size_t t = 0; t < w.size(); ++t) {
        const double tol = 1e-9 * std::max(1.0, std::abs(za.envelope[t]));
        EXPECT_NEAR(zb.envelope[t], 2.0 * za.envelope[t], tol);
        EXPECT_NEAR(zb.infiltration[t], 2.0 * za.infiltration[t], 1e-9 * std::max(1.0, za.infiltration[t]));
        EXPECT_NEAR(zb.load[t], 2.0 * za.load[t], 1e-9 * std::max(1.0, za.load[t]));
        for (std::size_t k = 0; k < za.wall_flows.size(); ++k)
          EXPECT_NEAR(zb.wall_flows[k][t], 2.0 * za.wall_flows[k][t], 1e-9 * std::max(1.0, std::abs(za.wall_flows[k][t])));
      }
    }
  }
}

TEST(Building, ColdFlatWeatherIsSteady) {
  auto d = one_zone_design();
  d.tau = 3.0;
  const auto sim = simulate(d, flat_weather(-10.0, 0.0));
  // Occupancy still changes the gains, so only the envelope is constant.
  for (double v : sim.zones.front().envelope) EXPECT_EQ(v, sim.zones.front().envelope.front());
}

}  // namespace
}  // namespace bemlab::physics
