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

// Monolithic and component-based surrogates, zone composition and
// component ablation.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bemlab/dataset.hpp"
#include "bemlab/gbdt.hpp"

namespace bemlab::cbml {

/// Predicts the label column of one component table kind.
class ComponentPredictor {
 public:
  explicit ComponentPredictor(ComponentKind kind) : kind_(kind) {}
  virtual ~ComponentPredictor() = default;

  ComponentKind kind() const { return kind_; }
  /// Throws ArgumentError when `table` is of another kind or schema.
  std::vector<double> predict(const ComponentTable& table) const;
  virtual std::string describe() const = 0;

 protected:
  virtual std::vector<double> predict_rows(const ComponentTable& table) const = 0;

 private:
  ComponentKind kind_;
};

class GbdtComponent final : public ComponentPredictor {
 public:
  GbdtComponent(ComponentKind kind, gbdt::GbdtModel model);
  const gbdt::GbdtModel& model() const { return model_; }
  std::string describe() const override { return "gbdt"; }

 protected:
  std::vector<double> predict_rows(const ComponentTable& table) const override;

 private:
  gbdt::GbdtModel model_;
  std::shared_ptr<const gbdt::Forest> forest_;
};

/// Predicts a fixed value for every row.
class ConstantComponent final : public ComponentPredictor {
 public:
  ConstantComponent(ComponentKind kind, double value) : ComponentPredictor(kind), value_(value) {}
  double value() const { return value_; }
  std::string describe() const override { return "constant"; }

 protected:
  std::vector<double> predict_rows(const ComponentTable& table) const override;

 private:
  double value_;
};

/// Adds zero-mean Gaussian noise, keyed by (seed, building, element, hour),
/// to another predictor's output.
class NoisyComponent final : public ComponentPredictor {
 public:
  NoisyComponent(std::shared_ptr<const ComponentPredictor> inner, double sd, std::uint64_t seed);
  std::string describe() const override { return "noisy(" + inner_->describe() + ")"; }

 protected:
  std::vector<double> predict_rows(const ComponentTable& table) const override;

 private:
  std::shared_ptr<const ComponentPredictor> inner_;
  double sd_;
  std::uint64_t seed_;
};

/// The exact oracle formula for a kind, computed from the row features. For
/// the zone kind, consecutive hours of one zone are smoothed as a series.
class PhysicsComponent final : public ComponentPredictor {
 public:
  using ComponentPredictor::ComponentPredictor;
  std::string describe() const override { return "physics"; }

 protected:
  std::vector<double> predict_rows(const ComponentTable& table) const override;
};

struct LabelStats {
  double mean = 0.0;
  double sd = 0.0;
  std::uint64_t n = 0;
};

struct ComponentModelSet {
  std::map<ComponentKind, std::shared_ptr<const ComponentPredictor>> models;
  std::map<ComponentKind, LabelStats> stats;
  /// "<kind>:<strategy>" when a component has been ablated, else empty.
  std::string ablation;

  const ComponentPredictor& at(ComponentKind kind) const;
  /// Throws unless all five component kinds are present.
  void check_complete() const;
};

ComponentModelSet train_cbml(const TableSet& masked, const gbdt::Hyperparams& hyper, std::uint64_t seed);
ComponentModelSet physics_oracle_set();

enum class AblationStrategy : std::uint8_t { mean, noise };
std::string_view to_string(AblationStrategy s);
AblationStrategy parse_ablation_strategy(std::string_view s);

ComponentModelSet ablate_component(const ComponentModelSet& set, ComponentKind kind, AblationStrategy strategy,
                                   std::uint64_t seed);

/// Predictions of a composed building, with the per-row component predictions
/// that fed it.
struct CompositionResult {
  std::map<ComponentKind, std::vector<double>> component;  // aligned with the input tables
  std::vector<std::vector<double>> zones;                  // [zone][hour], clamped
  std::vector<double> building;                            // Σ zones
};

/// Composes a building from its per-building rows (as built by building_rows).
/// Only features are read; labels are ignored.
CompositionResult compose(const ComponentModelSet& set, const BuildingDesign& design, const TableSet& rows);
std::vector<double> predict_building_cbml(const ComponentModelSet& set, const BuildingDesign& design,
                                          const WeatherSeries& weather);

gbdt::GbdtModel train_monolithic(const ComponentTable& building_table, const gbdt::Hyperparams& hyper,
                                 std::uint64_t seed);
/// Clamped at 0.
std::vector<double> predict_monolithic(const gbdt::GbdtModel& model, const ComponentTable& building_rows);
std::vector<double> predict_monolithic(const gbdt::Forest& model, const ComponentTable& building_rows);
std::vector<double> predict_monolithic(const gbdt::GbdtModel& model, const BuildingDesign& design,
                                       const WeatherSeries& weather);

// ---------------------------------------------------------------------------
// Model directories: one model file per kind plus manifest.json.
// ---------------------------------------------------------------------------

struct ModelDirectory {
  std::string architecture;  // "cbml" or "monolithic"
  ComponentModelSet set;
  std::optional<gbdt::GbdtModel> monolithic;
  std::map<std::string, std::string> info;
};

/// Writes a component set. Physics stand-ins are recorded as an oracle flag
/// in the manifest; GBDT components each get a model file.
void save_model_set(const std::filesystem::path& dir, const ComponentModelSet& set,
                    const std::map<std::string, std::string>& info);
void save_monolithic(const std::filesystem::path& dir, const gbdt::GbdtModel& model,
                     const std::map<std::string, std::string>& info);
ModelDirectory load_model_directory(const std::filesystem::path& dir);

}  // namespace bemlab::cbml
