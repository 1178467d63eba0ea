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

#include "bemlab/weather.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "bemlab/common.hpp"
#include "bemlab/csv.hpp"

namespace bemlab {

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::N: return "N";
    case Orientation::E: return "E";
    case Orientation::S: return "S";
    case Orientation::W: return "W";
  }
  return "?";
}

Orientation parse_orientation(std::string_view s) {
  if (s == "N") return Orientation::N;
  if (s == "E") return Orientation::E;
  if (s == "S") return Orientation::S;
  if (s == "W") return Orientation::W;
  throw ArgumentError("unknown orientation '" + std::string(s) + "'");
}

WeatherHour make_hour(int hour_index, double t_out, double i_horiz) {
  WeatherHour h;
  h.hour_index = hour_index;
  h.day_index = hour_index / kHoursPerDay;
  h.hour_of_day = hour_index % kHoursPerDay;
  h.t_out = t_out;
  h.i_horiz = i_horiz;
  for (auto o : kOrientations) h.i_by_orientation[index_of(o)] = kOrientationFactor[index_of(o)] * i_horiz;
  return h;
}

WeatherSeries generate_weather(std::uint64_t seed) {
  constexpr double pi = std::numbers::pi;
  Rng rng(derive_seed(seed, hash_string("weather")));
  const double phase = rng.uniform(0.0, 2.0 * pi);

  std::array<double, kDays> peak{};
  for (auto& p : peak) p = 250.0 * (0.3 + 0.7 * rng.uniform());

  WeatherSeries series;
  series.seed = seed;
  series.hours.reserve(kHours);
  for (int t = 0; t < kHours; ++t) {
    const int d = t / kHoursPerDay;
    const int h = t % kHoursPerDay;
    const double daily_mean = -2.0 + 3.0 * std::sin(2.0 * pi * d / kDays + phase);
    const double noise = rng.normal(0.0, 0.8);
    const double t_out =
        std::clamp(daily_mean + 4.0 * std::cos(2.0 * pi * (h - 14) / 24.0) + noise, kMinOutdoorTemp, kMaxOutdoorTemp);
    double i_horiz = 0.0;
    if (h >= kDaylightFirstHour && h <= kDaylightLastHour) {
      // Sampled at mid-hour so that all nine daylight hours are lit.
      i_horiz = std::max(0.0, peak[d] * std::sin(pi * (h - kDaylightFirstHour + 0.5) / 9.0));
    }
    series.hours.push_back(make_hour(t, t_out, i_horiz));
  }
  return series;
}

namespace {
const std::vector<std::string> kWeatherColumns = {"hour_index", "day_index", "hour_of_day", "t_out", "i_horiz",
                                                  "i_n",        "i_e",       "i_s",         "i_w"};
}

void write_weather(const WeatherSeries& series, const std::filesystem::path& path) {
  csv::Writer out(path);
  out.write_header(kWeatherColumns);
  std::string line;
  for (const auto& h : series.hours) {
    line.clear();
    append_int(line, h.hour_index);
    line.push_back(',');
    append_int(line, h.day_index);
    line.push_back(',');
    append_int(line, h.hour_of_day);
    for (double v : {h.t_out, h.i_horiz, h.i_by_orientation[0], h.i_by_orientation[1], h.i_by_orientation[2],
                     h.i_by_orientation[3]}) {
      line.push_back(',');
      append_exact(line, v);
    }
    out.write_line(line);
  }
  out.close();
}

WeatherSeries read_weather(const std::filesystem::path& path) {
  csv::Reader in(path, kWeatherColumns);
  WeatherSeries series;
  while (in.next_row()) {
    WeatherHour h;
    h.hour_index = static_cast<int>(in.integer(0));
    h.day_index = static_cast<int>(in.integer(1));
    h.hour_of_day = static_cast<int>(in.integer(2));
    const int expected = static_cast<int>(series.hours.size());
    if (h.hour_index != expected) in.fail(0, "expected hour_index " + std::to_string(expected));
    if (h.day_index != expected / kHoursPerDay) in.fail(1, "inconsistent day_index");
    if (h.hour_of_day != expected % kHoursPerDay) in.fail(2, "inconsistent hour_of_day");
    h.t_out = in.number(3);
    h.i_horiz = in.number(4);
    for (std::size_t o = 0; o < 4; ++o) {
      h.i_by_orientation[o] = in.number(5 + o);
      if (h.i_by_orientation[o] < 0.0) in.fail(5 + o, "negative irradiance");
    }
    if (h.i_horiz < 0.0) in.fail(4, "negative irradiance");
    series.hours.push_back(h);
    if (series.hours.size() > static_cast<std::size_t>(kHours))
      throw ParseError(path.string() + ": expected 312 hours, file has more");
  }
  if (series.hours.size() != static_cast<std::size_t>(kHours)) {
    throw ParseError(path.string() + ": expected 312 hours, got " + std::to_string(series.hours.size()));
  }
  return series;
}

}  // namespace bemlab
