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

#include <gtest/gtest.h>

#include <cmath>

#include "bemlab/common.hpp"
#include "test_util.hpp"

namespace bemlab {
namespace {

TEST(Weather, SeriesBounds) {
  const auto w = generate_weather(0);
  ASSERT_EQ(w.size(), 312u);
  for (std::size_t t = 0; t < w.size(); ++t) {
    const auto& h = w[t];
    EXPECT_EQ(h.hour_index, static_cast<int>(t));
    EXPECT_EQ(h.day_index, static_cast<int>(t) / 24);
    EXPECT_EQ(h.hour_of_day, static_cast<int>(t) % 24);
    EXPECT_GE(h.t_out, -15.0);
    EXPECT_LE(h.t_out, 10.0);
    EXPECT_GE(h.i_horiz, 0.0);
    for (double v : h.i_by_orientation) EXPECT_GE(v, 0.0);
  }
}

TEST(Weather, NightIsDark) {
  for (std::uint64_t seed : {0u, 1u, 17u, 123456u}) {
    const auto w = generate_weather(seed);
    for (const auto& h : w.hours) {
      if (h.hour_of_day >= 8 && h.hour_of_day <= 16) continue;
      EXPECT_EQ(h.i_horiz, 0.0);
      for (double v : h.i_by_orientation) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Weather, DaylightHoursAreLit) {
  const auto w = generate_weather(3);
  for (const auto& h : w.hours)
    if (h.hour_of_day >= 8 && h.hour_of_day <= 16) EXPECT_GT(h.i_horiz, 0.0);
}

TEST(Weather, OrientationFactors) {
  const auto h = make_hour(12, 0.0, 100.0);
  EXPECT_DOUBLE_EQ(h.irradiance(Orientation::S), 160.0);
  EXPECT_DOUBLE_EQ(h.irradiance(Orientation::E), 60.0);
  EXPECT_DOUBLE_EQ(h.irradiance(Orientation::W), 60.0);
  EXPECT_DOUBLE_EQ(h.irradiance(Orientation::N), 15.0);
}

TEST(Weather, SeedDeterminism) {
  EXPECT_EQ(generate_weather(5).hours, generate_weather(5).hours);
  EXPECT_NE(generate_weather(5).hours, generate_weather(6).hours);
}

TEST(Weather, RoundTrip) {
  testing_util::TempDir dir("weather");
  const auto w = generate_weather(11);
  write_weather(w, dir / "weather.csv");
  const auto r = read_weather(dir / "weather.csv");
  ASSERT_EQ(r.size(), w.size());
  // Exact representation: the read-back series is bitwise identical.
  for (std::size_t t = 0; t < w.size(); ++t) {
    EXPECT_EQ(r[t].t_out, w[t].t_out);
    EXPECT_EQ(r[t].i_horiz, w[t].i_horiz);
    EXPECT_EQ(r[t].i_by_orientation, w[t].i_by_orientation);
  }
}

TEST(Weather, ShortFileIsRejected) {
  testing_util::TempDir dir("weather");
  write_weather(generate_weather(1), dir / "weather.csv");
  auto text = testing_util::slurp(dir / "weather.csv");
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  testing_util::spit(dir / "short.csv", text);
  try {
    read_weather(dir / "short.csv");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 312 hours"), std::string::npos) << e.what();
  }
}

TEST(Weather, HeaderMismatchIsRejected) {
  testing_util::TempDir dir("weather");
  write_weather(generate_weather(1), dir / "weather.csv");
  auto text = testing_util::slurp(dir / "weather.csv");
  text.replace(0, 10, "hour_indx,");
  testing_util::spit(dir / "bad.csv", text);
  EXPECT_THROW(read_weather(dir / "bad.csv"), ParseError);
}

TEST(Weather, MalformedCellNamesRowAndColumn) {
  testing_util::TempDir dir("weather");
  write_weather(generate_weather(1), dir / "weather.csv");
  auto text = testing_util::slurp(dir / "weather.csv");
  const auto line3 = text.find('\n', text.find('\n') + 1) + 1;  // third line, hour 1
  const auto comma = text.find(',', text.find(',', text.find(',', line3) + 1) + 1);
  text.replace(comma + 1, text.find(',', comma + 1) - comma - 1, "warm");
  testing_util::spit(dir / "bad.csv", text);
  try {
    read_weather(dir / "bad.csv");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("t_out"), std::string::npos) << msg;
  }
}

}  // namespace
}  // namespace bemlab
