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

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bemlab/cbml.hpp"
#include "bemlab/dataset.hpp"
#include "bemlab/gbdt.hpp"

namespace bemlab::experiment {

/// Coefficient of determination. Throws for fewer than two values or a
/// constant reference series.
double r2(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);

/// Streaming R² / RMSE over concatenated series.
class ScoreAccumulator {
 public:
  void add(double y, double yhat);
  void add(std::span<const double> y, std::span<const double> yhat);
  std::uint64_t count() const { return n_; }
  double r2() const;
  double rmse() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double sse_ = 0.0;
};

inline const std::vector<std::string> kModelNames = {"monolithic",   "cbml_composed", "wall_window", "roof",
                                                     "ground_floor", "infiltration",  "zone"};
inline const std::vector<std::string> kTestSets = {"box", "random", "representative"};
inline const std::vector<double> kDefaultRates = {0.01, 0.001, 0.0005, 0.00025, 0.000125};

struct ExperimentRecord {
  double rate = 0.0;
  std::uint64_t seed = 0;
  MaskMode mode = MaskMode::independent;
  std::string model;
  std::string test_set;
  double r2 = 0.0;
  double rmse = 0.0;
  std::uint64_t n_train_rows = 0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

std::string results_header();
std::string format_record(const ExperimentRecord& r);
void write_results(const std::filesystem::path& path, std::span<const ExperimentRecord> records);
std::vector<ExperimentRecord> read_results(const std::filesystem::path& path);

struct Ablation {
  ComponentKind kind = ComponentKind::wall_window;
  cbml::AblationStrategy strategy = cbml::AblationStrategy::mean;
};

struct SweepConfig {
  std::vector<double> rates = kDefaultRates;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::vector<MaskMode> modes = {MaskMode::independent};
  gbdt::Hyperparams hyper;
  int workers = 1;
  std::optional<Ablation> ablation;
  /// results.csv and sweep_manifest.json are written here.
  std::filesystem::path out_dir;
  bool resume = true;
  /// Progress lines; may be empty.
  std::function<void(const std::string&)> log;
};

/// One (rate, seed, mode) cell.
struct Cell {
  double rate;
  std::uint64_t seed;
  MaskMode mode;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Seed from which one cell's model trainings are derived.
std::uint64_t training_seed(const Cell& cell);

/// Masked training tables of one cell, read from the train split files.
TableSet load_masked_training(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest,
                              const Cell& cell);

/// Trains and evaluates one cell against the given test splits.
std::vector<ExperimentRecord> run_cell(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest,
                                       const WeatherSeries& weather,
                                       const std::map<std::string, std::vector<BuildingDesign>>& test_designs,
                                       const Cell& cell, const SweepConfig& config, const TableSet& masked);

/// Scores a trained model set (and optional monolithic model) on one test split.
std::vector<ExperimentRecord> evaluate(const cbml::ComponentModelSet* set, const gbdt::GbdtModel* monolithic,
                                       std::span<const BuildingDesign> designs, const WeatherSeries& weather,
                                       const std::string& test_set, const Cell& cell,
                                       const std::map<std::string, std::uint64_t>& n_train_rows,
                                       const std::string& model_suffix = "");

/// Runs missing cells of the sweep, appends their records to results.csv in
/// canonical order and returns every record of the sweep.
std::vector<ExperimentRecord> run_sweep(const std::filesystem::path& dataset_dir, const SweepConfig& config);
std::vector<ExperimentRecord> run_ablation(const std::filesystem::path& dataset_dir, double rate,
                                           std::vector<std::uint64_t> seeds, Ablation ablation,
                                           SweepConfig base);

double median(std::vector<double> values);
/// Median R² table per masking mode: models by rows, rates and test sets by columns.
std::string format_table(std::span<const ExperimentRecord> records);
/// Writes results.csv, table.txt and curves_<test_set>.csv.
void emit_report(std::span<const ExperimentRecord> records, const std::filesystem::path& out_dir);

/// "1.00%", "0.0125%".
std::string format_rate_percent(double rate);

}  // namespace bemlab::experiment
