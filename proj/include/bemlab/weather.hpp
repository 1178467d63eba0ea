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
#include <string_view>
#include <vector>

namespace bemlab {

enum class Orientation : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

inline constexpr std::array<Orientation, 4> kOrientations = {Orientation::N, Orientation::E, Orientation::S,
                                                             Orientation::W};

constexpr std::size_t index_of(Orientation o) { return static_cast<std::size_t>(o); }
std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view s);

/// Fraction of horizontal irradiance falling on a façade of each orientation.
inline constexpr std::array<double, 4> kOrientationFactor = {0.15, 0.6, 1.6, 0.6};

inline constexpr int kDays = 13;
inline constexpr int kHoursPerDay = 24;
inline constexpr int kHours = kDays * kHoursPerDay;  // 312
inline constexpr int kDaylightFirstHour = 8;
inline constexpr int kDaylightLastHour = 16;
inline constexpr double kMinOutdoorTemp = -15.0;
inline constexpr double kMaxOutdoorTemp = 10.0;

struct WeatherHour {
  int hour_index = 0;
  int day_index = 0;
  int hour_of_day = 0;
  double t_out = 0.0;    // °C
  double i_horiz = 0.0;  // W/m²
  std::array<double, 4> i_by_orientation{};  // indexed by Orientation

  double irradiance(Orientation o) const { return i_by_orientation[index_of(o)]; }
  friend bool operator==(const WeatherHour&, const WeatherHour&) = default;
};

struct WeatherSeries {
  std::vector<WeatherHour> hours;
  std::uint64_t seed = 0;

  const WeatherHour& operator[](std::size_t t) const { return hours[t]; }
  std::size_t size() const { return hours.size(); }
};

/// Builds one hour from its index and the two driving quantities; oriented
/// irradiance is derived from the fixed façade factors.
WeatherHour make_hour(int hour_index, double t_out, double i_horiz);

/// Synthesizes the 13-day January window (312 hours) from `seed`.
WeatherSeries generate_weather(std::uint64_t seed);

void write_weather(const WeatherSeries& series, const std::filesystem::path& path);
WeatherSeries read_weather(const std::filesystem::path& path);

}  // namespace bemlab
