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

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "json.hpp"

namespace bemlab::cbml {

using json = nlohmann::json;

std::vector<double> ComponentPredictor::predict(const ComponentTable& table) const {
  if (table.kind != kind_)
    throw ArgumentError("predictor for '" + std::string(to_string(kind_)) + "' given a '" +
                        std::string(to_string(table.kind)) + "' table");
  if (table.features.cols() != feature_names(kind_).size())
    throw ArgumentError("'" + std::string(to_string(kind_)) + "' table has " + std::to_string(table.features.cols()) +
                        " feature columns, expected " + std::to_string(feature_names(kind_).size()));
  return predict_rows(table);
}

GbdtComponent::GbdtComponent(ComponentKind kind, gbdt::GbdtModel model)
    : ComponentPredictor(kind), model_(std::move(model)) {
  if (model_.feature_names != feature_names(kind))
    throw ArgumentError("model schema does not match the '" + std::string(to_string(kind)) + "' feature schema");
  forest_ = std::make_shared<const gbdt::Forest>(model_);
}

std::vector<double> GbdtComponent::predict_rows(const ComponentTable& table) const {
  return forest_->predict_factored(table.features, hourly_features(kind()));
}

std::vector<double> ConstantComponent::predict_rows(const ComponentTable& table) const {
  return std::vector<double>(table.size(), value_);
}

NoisyComponent::NoisyComponent(std::shared_ptr<const ComponentPredictor> inner, double sd, std::uint64_t seed)
    : ComponentPredictor(inner->kind()), inner_(std::move(inner)), sd_(sd), seed_(seed) {}

std::vector<double> NoisyComponent::predict_rows(const ComponentTable& table) const {
  auto out = inner_->predict(table);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto key = derive_seed(seed_, static_cast<std::uint64_t>(table.building_id[i]),
                                 static_cast<std::uint64_t>(static_cast<std::int64_t>(table.element_id[i])),
                                 static_cast<std::uint64_t>(table.hour_index[i]));
    out[i] += sd_ * hashed_normal(key);
  }
  return out;
}

std::vector<double> PhysicsComponent::predict_rows(const ComponentTable& t) const {
  using namespace physics;
  std::vector<double> out(t.size());
  const auto& x = t.features;
  switch (kind()) {
    case ComponentKind::wall_window:
      for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = (x(i, 2) * x(i, 0) + x(i, 3) * x(i, 1)) * (kSetpoint - x(i, 9)) - x(i, 4) * x(i, 1) * x(i, 10);
      break;
    case ComponentKind::roof:
      for (std::size_t i = 0; i < t.size(); ++i) out[i] = x(i, 1) * x(i, 0) * (kSetpoint - x(i, 2));
      break;
    case ComponentKind::ground_floor:
      for (std::size_t i = 0; i < t.size(); ++i) out[i] = x(i, 1) * x(i, 0) * (kSetpoint - kGroundTemp);
      break;
    case ComponentKind::infiltration:
      for (std::size_t i = 0; i < t.size(); ++i) out[i] = kAirFactor * x(i, 0) * x(i, 1) * (kSetpoint - x(i, 2));
      break;
    case ComponentKind::zone: {
      double prev = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = std::max(0.0, x(i, 0) + x(i, 1) - x(i, 2));
        const bool continues = i > 0 && t.building_id[i] == t.building_id[i - 1] &&
                               t.element_id[i] == t.element_id[i - 1] && t.hour_index[i] == t.hour_index[i - 1] + 1;
        if (!continues) prev = d;
        const double alpha = 1.0 / (x(i, 3) + 1.0);
        prev = alpha * d + (1.0 - alpha) * prev;
        out[i] = prev;
      }
      break;
    }
    case ComponentKind::building_monolithic:
      throw ArgumentError("no physics stand-in for the monolithic kind");
  }
  return out;
}

const ComponentPredictor& ComponentModelSet::at(ComponentKind kind) const {
  const auto it = models.find(kind);
  if (it == models.end() || !it->second)
    throw ArgumentError("model set has no '" + std::string(to_string(kind)) + "' component");
  return *it->second;
}

void ComponentModelSet::check_complete() const {
  for (auto k : kComponentKinds) (void)at(k);
}

ComponentModelSet train_cbml(const TableSet& masked, const gbdt::Hyperparams& hyper, std::uint64_t seed) {
  for (auto k : kComponentKinds) {
    const auto it = masked.find(k);
    if (it == masked.end() || it->second.empty())
      throw ArgumentError("masked '" + std::string(to_string(k)) + "' table is empty");
  }
  ComponentModelSet set;
  for (auto k : kComponentKinds) {
    const auto& t = masked.at(k);
    auto model = gbdt::train(t.features, t.labels, hyper, derive_seed(seed, hash_string(to_string(k))), t.feature_names);
    set.stats[k] = {model.label_mean, model.label_sd, model.n_rows};
    set.models[k] = std::make_shared<GbdtComponent>(k, std::move(model));
  }
  return set;
}

ComponentModelSet physics_oracle_set() {
  ComponentModelSet set;
  for (auto k : kComponentKinds) set.models[k] = std::make_shared<PhysicsComponent>(k);
  return set;
}

std::string_view to_string(AblationStrategy s) { return s == AblationStrategy::mean ? "mean" : "noise"; }

AblationStrategy parse_ablation_strategy(std::string_view s) {
  if (s == "mean") return AblationStrategy::mean;
  if (s == "noise") return AblationStrategy::noise;
  throw ArgumentError("unknown ablation strategy '" + std::string(s) + "'");
}

ComponentModelSet ablate_component(const ComponentModelSet& set, ComponentKind kind, AblationStrategy strategy,
                                   std::uint64_t seed) {
  const auto it = set.models.find(kind);
  if (it == set.models.end()) throw ArgumentError("cannot ablate missing component '" + std::string(to_string(kind)) + "'");
  const auto st = set.stats.find(kind);
  if (st == set.stats.end())
    throw ArgumentError("no training-label statistics for '" + std::string(to_string(kind)) + "'");
  ComponentModelSet out = set;
  if (strategy == AblationStrategy::mean)
    out.models[kind] = std::make_shared<ConstantComponent>(kind, st->second.mean);
  else
    out.models[kind] = std::make_shared<NoisyComponent>(it->second, st->second.sd,
                                                        derive_seed(seed, hash_string("ablation-noise")));
  out.ablation = std::string(to_string(kind)) + ":" + std::string(to_string(strategy));
  return out;
}

CompositionResult compose(const ComponentModelSet& set, const BuildingDesign& design, const TableSet& rows) {
  set.check_complete();
  const std::size_t nz = design.zones.size();
  const auto& zone_rows = rows.at(ComponentKind::zone);
  if (nz == 0 || zone_rows.size() % nz != 0) throw ArgumentError("compose: zone rows do not match the design");
  const std::size_t hours = zone_rows.size() / nz;

  std::unordered_map<std::int32_t, std::size_t> zone_of_element, zone_index;
  for (std::size_t zi = 0; zi < nz; ++zi) {
    const auto& z = design.zones[zi];
    zone_index[z.zone_id] = zi;
    for (const auto& w : z.walls) zone_of_element[w.element_id] = zi;
    if (z.has_roof()) zone_of_element[z.roof_element_id] = zi;
    if (z.has_ground()) zone_of_element[z.ground_element_id] = zi;
  }
  auto lookup = [](const auto& map, std::int32_t id) {
    const auto it = map.find(id);
    if (it == map.end()) throw ArgumentError("compose: element " + std::to_string(id) + " not in design");
    return it->second;
  };
  auto check_hour = [&](int h) {
    if (h < 0 || static_cast<std::size_t>(h) >= hours) throw ArgumentError("compose: hour out of range");
    return static_cast<std::size_t>(h);
  };

  CompositionResult out;
  std::vector<std::vector<double>> env(nz, std::vector<double>(hours, 0.0));
  for (auto k : {ComponentKind::wall_window, ComponentKind::roof, ComponentKind::ground_floor}) {
    const auto& t = rows.at(k);
    auto pred = set.at(k).predict(t);
    for (std::size_t i = 0; i < t.size(); ++i)
      env[lookup(zone_of_element, t.element_id[i])][check_hour(t.hour_index[i])] += pred[i];
    out.component[k] = std::move(pred);
  }
  const auto& inf_rows = rows.at(ComponentKind::infiltration);
  auto inf_pred = set.at(ComponentKind::infiltration).predict(inf_rows);
  std::vector<std::vector<double>> inf(nz, std::vector<double>(hours, 0.0));
  for (std::size_t i = 0; i < inf_rows.size(); ++i)
    inf[lookup(zone_index, inf_rows.element_id[i])][check_hour(inf_rows.hour_index[i])] = inf_pred[i];
  out.component[ComponentKind::infiltration] = std::move(inf_pred);

  ComponentTable zt = zone_rows;
  for (std::size_t i = 0; i < zt.size(); ++i) {
    const auto zi = lookup(zone_index, zt.element_id[i]);
    const auto h = check_hour(zt.hour_index[i]);
    zt.features(i, 0) = env[zi][h];
    zt.features(i, 1) = inf[zi][h];
  }
  auto zone_pred = set.at(ComponentKind::zone).predict(zt);
  out.zones.assign(nz, std::vector<double>(hours, 0.0));
  for (std::size_t i = 0; i < zt.size(); ++i)
    out.zones[lookup(zone_index, zt.element_id[i])][check_hour(zt.hour_index[i])] = std::max(0.0, zone_pred[i]);
  out.component[ComponentKind::zone] = std::move(zone_pred);

  out.building.assign(hours, 0.0);
  for (std::size_t zi = 0; zi < nz; ++zi)
    for (std::size_t h = 0; h < hours; ++h) out.building[h] += out.zones[zi][h];
  return out;
}

std::vector<double> predict_building_cbml(const ComponentModelSet& set, const BuildingDesign& design,
                                          const WeatherSeries& weather) {
  return compose(set, design, building_rows(design, weather)).building;
}

gbdt::GbdtModel train_monolithic(const ComponentTable& table, const gbdt::Hyperparams& hyper, std::uint64_t seed) {
  if (table.kind != ComponentKind::building_monolithic)
    throw ArgumentError("monolithic training needs the building table, got '" + std::string(to_string(table.kind)) + "'");
  if (table.empty()) throw ArgumentError("masked 'building_monolithic' table is empty");
  return gbdt::train(table.features, table.labels, hyper, derive_seed(seed, hash_string("building_monolithic")),
                     table.feature_names);
}

std::vector<double> predict_monolithic(const gbdt::GbdtModel& model, const ComponentTable& rows) {
  if (rows.kind != ComponentKind::building_monolithic)
    throw ArgumentError("monolithic model given a '" + std::string(to_string(rows.kind)) + "' table");
  return predict_monolithic(gbdt::Forest(model), rows);
}

std::vector<double> predict_monolithic(const gbdt::Forest& model, const ComponentTable& rows) {
  if (rows.kind != ComponentKind::building_monolithic)
    throw ArgumentError("monolithic model given a '" + std::string(to_string(rows.kind)) + "' table");
  auto out = model.predict_factored(rows.features, hourly_features(ComponentKind::building_monolithic));
  for (auto& v : out) v = std::max(0.0, v);
  return out;
}

std::vector<double> predict_monolithic(const gbdt::GbdtModel& model, const BuildingDesign& design,
                                       const WeatherSeries& weather) {
  return predict_monolithic(model, building_rows(design, weather).at(ComponentKind::building_monolithic));
}

// ---------------------------------------------------------------------------
// Model directories
// ---------------------------------------------------------------------------

namespace {

std::string model_file(ComponentKind k) { return std::string(to_string(k)) + ".model"; }

json model_entry(ComponentKind k, const gbdt::GbdtModel& m) {
  return {{"file", model_file(k)},       {"predictor", "gbdt"},        {"features", m.feature_names},
          {"best_rounds", m.best_rounds}, {"n_rows", m.n_rows},          {"seed", m.seed},
          {"label_mean", m.label_mean},   {"label_sd", m.label_sd}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

json base_manifest(std::string_view architecture, const std::map<std::string, std::string>& info) {
  json j;
  j["architecture"] = architecture;
  j["generator_version"] = kGeneratorVersion;
  j["complete"] = false;
  j["info"] = info;
  return j;
}

}  // namespace

void save_model_set(const std::filesystem::path& dir, const ComponentModelSet& set,
                    const std::map<std::string, std::string>& info) {
  set.check_complete();
  std::filesystem::create_directories(dir);
  auto j = base_manifest("cbml", info);
  j["zone_envelope_features"] = "sum";
  j["ablation"] = set.ablation;
  bool oracle = true;
  for (auto k : kComponentKinds) oracle = oracle && dynamic_cast<const PhysicsComponent*>(&set.at(k)) != nullptr;
  j["oracle"] = oracle;
  write_json(dir / "manifest.json", j);
  json models = json::object();
  if (!oracle) {
    for (auto k : kComponentKinds) {
      const auto* g = dynamic_cast<const GbdtComponent*>(&set.at(k));
      if (!g) throw ArgumentError("component '" + std::string(to_string(k)) + "' (" + set.at(k).describe() +
                                  ") cannot be saved");
      gbdt::save_model(g->model(), dir / model_file(k));
      models[std::string(to_string(k))] = model_entry(k, g->model());
    }
  }
  j["models"] = models;
  j["complete"] = true;
  write_json(dir / "manifest.json", j);
}

void save_monolithic(const std::filesystem::path& dir, const gbdt::GbdtModel& model,
                     const std::map<std::string, std::string>& info) {
  std::filesystem::create_directories(dir);
  auto j = base_manifest("monolithic", info);
  write_json(dir / "manifest.json", j);
  const auto k = ComponentKind::building_monolithic;
  gbdt::save_model(model, dir / model_file(k));
  j["models"] = {{std::string(to_string(k)), model_entry(k, model)}};
  j["complete"] = true;
  write_json(dir / "manifest.json", j);
}

ModelDirectory load_model_directory(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": missing model manifest");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  ModelDirectory out;
  try {
    if (!j.at("complete").get<bool>()) throw LoadError(path.string() + ": model directory is incomplete");
    out.architecture = j.at("architecture").get<std::string>();
    out.info = j.at("info").get<std::map<std::string, std::string>>();
    if (out.architecture == "monolithic") {
      out.monolithic = gbdt::load_model(dir / model_file(ComponentKind::building_monolithic));
      return out;
    }
    if (out.architecture != "cbml") throw LoadError(path.string() + ": unknown architecture '" + out.architecture + "'");
    if (j.at("oracle").get<bool>()) {
      out.set = physics_oracle_set();
      return out;
    }
    for (auto k : kComponentKinds) {
      auto m = gbdt::load_model(dir / model_file(k));
      out.set.stats[k] = {m.label_mean, m.label_sd, m.n_rows};
      out.set.models[k] = std::make_shared<GbdtComponent>(k, std::move(m));
    }
    out.set.ablation = j.value("ablation", "");
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace bemlab::cbml
