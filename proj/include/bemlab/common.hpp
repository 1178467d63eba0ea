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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bemlab {

/// Raised for invalid arguments to library operations.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file on disk does not match its expected schema.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a persisted artifact cannot be loaded (truncation, version).
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kGeneratorVersion = 1;

// ---------------------------------------------------------------------------
// Seeding and random streams.
//
// Everything random in the pipeline is routed through these helpers so that
// results are bit-identical across platforms and standard libraries. The
// std:: distributions are implementation-defined and therefore not used.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt + 0x632BE59BD9B4E019ULL));
}

template <typename... Salts>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, Salts... rest) {
  return derive_seed(derive_seed(seed, salt), static_cast<std::uint64_t>(rest)...);
}

std::uint64_t hash_string(std::string_view s);

/// xoshiro256** stream seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller (one value per call).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t s_[4];
};

/// Deterministic standard normal from a hash key, independent of call order.
double hashed_normal(std::uint64_t key);

// ---------------------------------------------------------------------------
// Dense row-major matrix of feature values.
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void push_row(std::span<const double> values);
  void reserve_rows(std::size_t n) { data_.reserve(n * cols_); }
  void clear() {
    rows_ = 0;
    data_.clear();
  }
  /// Sets the column count of an empty matrix.
  void reset(std::size_t cols) {
    rows_ = 0;
    cols_ = cols;
    data_.clear();
  }

  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Order-independent sum: sorts a copy before accumulating.
double ordered_sum(std::vector<double> values);

/// Shortest round-trip decimal rendering of a double.
std::string format_exact(double v);
/// Fixed-point with `decimals` digits, trailing zeros trimmed ("1.5", "-3", "0").
std::string format_fixed(double v, int decimals = 6);
void append_fixed(std::string& out, double v, int decimals = 6);
void append_exact(std::string& out, double v);
void append_int(std::string& out, std::int64_t v);

}  // namespace bemlab
