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

// Steady-state zone heat balance with first-order load smoothing. Positive
// flows are heat lost from the zone, in W for one hourly step.

#include <cstdint>
#include <span>
#include <vector>

#include "bemlab/buildgen.hpp"
#include "bemlab/weather.hpp"

namespace bemlab::physics {

inline constexpr double kSetpoint = 20.0;    // °C
inline constexpr double kGroundTemp = 8.0;   // °C
inline constexpr double kAirFactor = 0.34;   // Wh/(m³·K)
inline constexpr int kOccupiedFrom = 7;
inline constexpr int kOccupiedUntil = 19;    // exclusive
inline constexpr double kUnoccupiedFraction = 0.3;

/// Occupancy schedule s(h): 1 during [7, 19), 0.3 otherwise.
double occupancy(int hour_of_day);

double wall_window_flow(const WallElement& elem, const BuildingDesign& design, const WeatherHour& wh);
double roof_flow(double area, const BuildingDesign& design, const WeatherHour& wh);
double floor_flow(double area, const BuildingDesign& design);
double infiltration_flow(const ZoneSpec& zone, const BuildingDesign& design, const WeatherHour& wh);
double internal_gain(const ZoneSpec& zone, const BuildingDesign& design, int hour_of_day);

/// H(t) = a·D(t) + (1 − a)·H(t − 1), a = 1/(tau + 1), H(−1) = D(0).
std::vector<double> smooth_load(std::span<const double> demand, double tau);

struct ZoneSimulation {
  int zone_id = 0;
  std::vector<std::vector<double>> wall_flows;  // [wall][hour]
  std::vector<double> roof_flow;                // empty when no exposed roof
  std::vector<double> floor_flow;               // empty unless ground zone
  std::vector<double> envelope;  // walls, then roof, then floor, summed per hour
  std::vector<double> infiltration;
  std::vector<double> gain;
  std::vector<double> demand;  // D(t), clipped at 0
  std::vector<double> load;    // H(t)
};

struct SimulatedBuilding {
  std::int64_t building_id = 0;
  std::vector<ZoneSimulation> zones;
  std::vector<double> building_load;  // Σ zone loads, summed in zone order
};

ZoneSimulation simulate_zone(const ZoneSpec& zone, const BuildingDesign& design, const WeatherSeries& weather);
std::vector<double> zone_load(const ZoneSpec& zone, const BuildingDesign& design, const WeatherSeries& weather);
SimulatedBuilding simulate(const BuildingDesign& design, const WeatherSeries& weather);

}  // namespace bemlab::physics
