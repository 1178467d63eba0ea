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

#include <algorithm>

namespace bemlab::physics {

double occupancy(int hour_of_day) {
  return hour_of_day >= kOccupiedFrom && hour_of_day < kOccupiedUntil ? 1.0 : kUnoccupiedFraction;
}

double wall_window_flow(const WallElement& elem, const BuildingDesign& design, const WeatherHour& wh) {
  const double transmission = (design.u_wall * elem.wall_area + design.u_win * elem.window_area) * (kSetpoint - wh.t_out);
  const double solar = design.shgc * elem.window_area * wh.irradiance(elem.orientation);
  return transmission - solar;
}

double roof_flow(double area, const BuildingDesign& design, const WeatherHour& wh) {
  return design.u_roof * area * (kSetpoint - wh.t_out);
}

double floor_flow(double area, const BuildingDesign& design) {
  return design.u_floor * area * (kSetpoint - kGroundTemp);
}

double infiltration_flow(const ZoneSpec& zone, const BuildingDesign& design, const WeatherHour& wh) {
  return kAirFactor * design.ach * zone.volume * (kSetpoint - wh.t_out);
}

double internal_gain(const ZoneSpec& zone, const BuildingDesign& design, int hour_of_day) {
  return design.q_int * zone.floor_area * occupancy(hour_of_day);
}

std::vector<double> smooth_load(std::span<const double> demand, double tau) {
  std::vector<double> out(demand.size());
  if (demand.empty()) return out;
  const double alpha = 1.0 / (tau + 1.0);
  double prev = demand[0];
  for (std::size_t t = 0; t < demand.size(); ++t) {
    prev = alpha * demand[t] + (1.0 - alpha) * prev;
    out[t] = prev;
  }
  return out;
}

ZoneSimulation simulate_zone(const ZoneSpec& zone, const BuildingDesign& design, const WeatherSeries& weather) {
  const std::size_t n = weather.size();
  ZoneSimulation z;
  z.zone_id = zone.zone_id;
  z.wall_flows.assign(zone.walls.size(), std::vector<double>(n));
  if (zone.has_roof()) z.roof_flow.resize(n);
  if (zone.has_ground()) z.floor_flow.resize(n);
  z.envelope.resize(n);
  z.infiltration.resize(n);
  z.gain.resize(n);
  z.demand.resize(n);
  const double slab = zone.has_ground() ? floor_flow(zone.ground_area_share, design) : 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& wh = weather[t];
    double env = 0.0;
    for (std::size_t w = 0; w < zone.walls.size(); ++w) {
      const double q = wall_window_flow(zone.walls[w], design, wh);
      z.wall_flows[w][t] = q;
      env += q;
    }
    if (zone.has_roof()) {
      z.roof_flow[t] = roof_flow(zone.roof_area_share, design, wh);
      env += z.roof_flow[t];
    }
    if (zone.has_ground()) {
      z.floor_flow[t] = slab;
      env += slab;
    }
    z.envelope[t] = env;
    z.infiltration[t] = infiltration_flow(zone, design, wh);
    z.gain[t] = internal_gain(zone, design, wh.hour_of_day);
    z.demand[t] = std::max(0.0, env + z.infiltration[t] - z.gain[t]);
  }
  z.load = smooth_load(z.demand, design.tau);
  return z;
}

std::vector<double> zone_load(const ZoneSpec& zone, const BuildingDesign& design, const WeatherSeries& weather) {
  return simulate_zone(zone, design, weather).load;
}

SimulatedBuilding simulate(const BuildingDesign& design, const WeatherSeries& weather) {
  SimulatedBuilding b;
  b.building_id = design.building_id;
  b.building_load.assign(weather.size(), 0.0);
  for (const auto& zone : design.zones) {
    b.zones.push_back(simulate_zone(zone, design, weather));
    const auto& load = b.zones.back().load;
    for (std::size_t t = 0; t < load.size(); ++t) b.building_load[t] += load[t];
  }
  return b;
}

}  // namespace bemlab::physics
