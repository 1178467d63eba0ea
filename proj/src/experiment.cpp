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

#include "bemlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "bemlab/csv.hpp"
#include "json.hpp"

namespace bemlab::experiment {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double r2(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw ArgumentError("r2: length mismatch");
  if (y.size() < 2) throw ArgumentError("undefined R²: fewer than two values");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) throw ArgumentError("undefined R²: constant reference series");
  return 1.0 - ss_res / ss_tot;
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw ArgumentError("rmse: length mismatch");
  if (y.empty()) throw ArgumentError("rmse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

void ScoreAccumulator::add(double y, double yhat) {
  ++n_;
  const double d = y - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (y - mean_);
  sse_ += (y - yhat) * (y - yhat);
}

void ScoreAccumulator::add(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw ArgumentError("ScoreAccumulator: length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) add(y[i], yhat[i]);
}

double ScoreAccumulator::r2() const {
  if (n_ < 2) throw ArgumentError("undefined R²: fewer than two values");
  if (m2_ == 0.0) throw ArgumentError("undefined R²: constant reference series");
  return 1.0 - sse_ / m2_;
}

double ScoreAccumulator::rmse() const {
  if (n_ == 0) throw ArgumentError("rmse: empty input");
  return std::sqrt(sse_ / static_cast<double>(n_));
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

namespace {
const std::vector<std::string> kResultColumns = {"rate", "seed", "mode", "model", "test_set", "r2", "rmse",
                                                 "n_train_rows"};
}

std::string results_header() { return csv::join(kResultColumns); }

std::string format_record(const ExperimentRecord& r) {
  std::string s;
  append_exact(s, r.rate);
  s += ',' + std::to_string(r.seed) + ',' + std::string(to_string(r.mode)) + ',' + r.model + ',' + r.test_set + ',';
  append_exact(s, r.r2);
  s += ',';
  append_exact(s, r.rmse);
  s += ',' + std::to_string(r.n_train_rows);
  return s;
}

void write_results(const std::filesystem::path& path, std::span<const ExperimentRecord> records) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    csv::Writer out(tmp);
    out.write_header(kResultColumns);
    for (const auto& r : records) out.write_line(format_record(r));
    out.close();
  }
  std::filesystem::rename(tmp, path);
}

std::vector<ExperimentRecord> read_results(const std::filesystem::path& path) {
  csv::Reader in(path, kResultColumns);
  std::vector<ExperimentRecord> out;
  while (in.next_row()) {
    ExperimentRecord r;
    r.rate = in.number(0);
    r.seed = static_cast<std::uint64_t>(in.integer(1));
    try {
      r.mode = parse_mask_mode(in.text(2));
    } catch (const ArgumentError& e) {
      in.fail(2, e.what());
    }
    r.model = std::string(in.text(3));
    r.test_set = std::string(in.text(4));
    r.r2 = in.number(5);
    r.rmse = in.number(6);
    r.n_train_rows = static_cast<std::uint64_t>(in.integer(7));
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cells
// ---------------------------------------------------------------------------

namespace {

std::vector<std::int64_t> building_ids(const DatasetManifest& m) {
  std::vector<std::int64_t> ids(static_cast<std::size_t>(m.split("train_box").n_buildings));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(i);
  return ids;
}

std::vector<std::size_t> cell_indices(const DatasetManifest& m, const Cell& cell, ComponentKind k) {
  const auto n = static_cast<std::size_t>(m.split("train_box").rows.at(k));
  return sample_indices(n, masked_size(n, cell.rate), table_mask_seed(cell.seed, cell.rate, k));
}

KeySet cell_keys(const DatasetManifest& m, const Cell& cell) {
  const auto ids = building_ids(m);
  return sample_keys(ids, cell.rate, key_mask_seed(cell.seed, cell.rate));
}

std::string model_suffix(const std::optional<Ablation>& a) {
  return a ? "+ablated:" + std::string(to_string(a->kind)) : "";
}

std::string rate_text(double r) { return format_exact(r); }

void check_dataset(const std::filesystem::path& dir, const DatasetManifest& m) {
  if (!m.complete) throw ArgumentError("dataset in " + dir.string() + " is marked incomplete");
  for (auto split : kSplits) {
    const auto& info = m.split(split);
    for (auto k : kAllKinds) {
      if (!info.rows.contains(k)) throw ArgumentError("split " + std::string(split) + " lacks table " + std::string(to_string(k)));
      const auto p = table_path(dir, k, split);
      if (!std::filesystem::exists(p)) throw ArgumentError("missing dataset file " + p.string());
    }
  }
}

}  // namespace

std::uint64_t training_seed(const Cell& c) {
  return derive_seed(c.seed, hash_string("train"), std::bit_cast<std::uint64_t>(c.rate),
                     static_cast<std::uint64_t>(c.mode));
}

TableSet load_masked_training(const std::filesystem::path& dir, const DatasetManifest& m, const Cell& cell) {
  TableSet out;
  if (cell.mode == MaskMode::independent) {
    for (auto k : kAllKinds) out.emplace(k, read_table_rows(table_path(dir, k, "train_box"), k, cell_indices(m, cell, k)));
  } else {
    const auto keys = cell_keys(m, cell);
    for (auto k : kAllKinds) out.emplace(k, read_table_keys(table_path(dir, k, "train_box"), k, keys));
  }
  return out;
}

std::vector<ExperimentRecord> evaluate(const cbml::ComponentModelSet* set, const gbdt::GbdtModel* monolithic,
                                       std::span<const BuildingDesign> designs, const WeatherSeries& weather,
                                       const std::string& test_set, const Cell& cell,
                                       const std::map<std::string, std::uint64_t>& n_train_rows,
                                       const std::string& suffix) {
  std::map<std::string, ScoreAccumulator> acc;
  std::optional<gbdt::Forest> mono;
  if (monolithic) mono.emplace(*monolithic);
  for (const auto& d : designs) {
    const auto rows = building_rows(d, weather);
    const auto& truth = rows.at(ComponentKind::building_monolithic).labels;
    if (set) {
      const auto comp = cbml::compose(*set, d, rows);
      for (auto k : {ComponentKind::wall_window, ComponentKind::roof, ComponentKind::ground_floor,
                     ComponentKind::infiltration})
        acc[std::string(to_string(k))].add(rows.at(k).labels, comp.component.at(k));
      const auto& zt = rows.at(ComponentKind::zone);
      acc["zone"].add(zt.labels, set->at(ComponentKind::zone).predict(zt));
      acc["cbml_composed"].add(truth, comp.building);
    }
    if (mono) acc["monolithic"].add(truth, cbml::predict_monolithic(*mono, rows.at(ComponentKind::building_monolithic)));
  }
  std::vector<ExperimentRecord> out;
  for (const auto& name : kModelNames) {
    const auto it = acc.find(name);
    if (it == acc.end()) continue;
    ExperimentRecord r;
    r.rate = cell.rate;
    r.seed = cell.seed;
    r.mode = cell.mode;
    r.model = name + suffix;
    r.test_set = test_set;
    r.r2 = it->second.r2();
    r.rmse = it->second.rmse();
    const auto n = n_train_rows.find(name);
    r.n_train_rows = n == n_train_rows.end() ? 0 : n->second;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> run_cell(const std::filesystem::path&, const DatasetManifest&,
                                       const WeatherSeries& weather,
                                       const std::map<std::string, std::vector<BuildingDesign>>& test_designs,
                                       const Cell& cell, const SweepConfig& config, const TableSet& masked) {
  const auto seed = training_seed(cell);
  const auto mono = cbml::train_monolithic(masked.at(ComponentKind::building_monolithic), config.hyper, seed);
  auto set = cbml::train_cbml(masked, config.hyper, seed);
  if (config.ablation)
    set = cbml::ablate_component(set, config.ablation->kind, config.ablation->strategy,
                                 derive_seed(cell.seed, hash_string("ablate")));

  std::map<std::string, std::uint64_t> n_rows;
  n_rows["monolithic"] = masked.at(ComponentKind::building_monolithic).size();
  std::uint64_t total = 0;
  for (auto k : kComponentKinds) {
    n_rows[std::string(to_string(k))] = masked.at(k).size();
    total += masked.at(k).size();
  }
  n_rows["cbml_composed"] = total;

  const auto suffix = model_suffix(config.ablation);
  std::vector<ExperimentRecord> out;
  for (const auto& ts : kTestSets) {
    const auto recs = evaluate(&set, &mono, test_designs.at(ts), weather, ts, cell, n_rows, suffix);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweep driver
// ---------------------------------------------------------------------------

namespace {

/// Union of every pending cell's training rows, read in one pass per file.
class TrainingPool {
 public:
  TrainingPool(const std::filesystem::path& dir, const DatasetManifest& m, std::span<const Cell> cells) : m_(m) {
    for (auto k : kAllKinds) {
      std::vector<std::size_t> all;
      KeySet keys;
      for (const auto& c : cells) {
        if (c.mode == MaskMode::independent) {
          const auto idx = cell_indices(m, c, k);
          all.insert(all.end(), idx.begin(), idx.end());
        } else {
          const auto ks = cell_keys(m, c);
          keys.insert(ks.begin(), ks.end());
        }
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      const auto path = table_path(dir, k, "train_box");
      by_index_[k] = {all, read_table_rows(path, k, all)};
      by_key_.emplace(k, keys.empty() ? ComponentTable(k) : read_table_keys(path, k, keys));
    }
  }

  TableSet extract(const Cell& c) const {
    TableSet out;
    if (c.mode == MaskMode::independent) {
      for (auto k : kAllKinds) {
        const auto& [index, table] = by_index_.at(k);
        const auto idx = cell_indices(m_, c, k);
        std::vector<std::size_t> pos(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
          pos[i] = static_cast<std::size_t>(std::lower_bound(index.begin(), index.end(), idx[i]) - index.begin());
        out.emplace(k, table.subset(pos));
      }
    } else {
      const auto keys = cell_keys(m_, c);
      for (auto k : kAllKinds) out.emplace(k, filter_by_keys(by_key_.at(k), keys));
    }
    return out;
  }

 private:
  const DatasetManifest& m_;
  std::map<ComponentKind, std::pair<std::vector<std::size_t>, ComponentTable>> by_index_;
  std::map<ComponentKind, ComponentTable> by_key_;
};

json sweep_manifest(const std::filesystem::path& dataset_dir, const SweepConfig& c, bool complete) {
  json j;
  j["dataset_dir"] = std::filesystem::absolute(dataset_dir).string();
  std::vector<std::string> rates;
  for (double r : c.rates) rates.push_back(rate_text(r));
  j["rates"] = rates;
  j["seeds"] = c.seeds;
  std::vector<std::string> modes;
  for (auto m : c.modes) modes.emplace_back(to_string(m));
  j["modes"] = modes;
  const auto& h = c.hyper;
  j["hyper"] = {{"max_leaves", h.max_leaves}, {"learning_rate", h.learning_rate}, {"min_leaf", h.min_leaf},
                {"l2", h.l2},                 {"max_bins", h.max_bins},           {"max_rounds", h.max_rounds},
                {"cv_folds", h.cv_folds},     {"patience", h.patience},           {"cv_ensemble", h.cv_ensemble}};
  if (c.ablation)
    j["ablation"] = {{"kind", std::string(to_string(c.ablation->kind))},
                     {"strategy", std::string(to_string(c.ablation->strategy))}};
  j["statistic"] = "median over seeds";
  j["zone_envelope_features"] = "sum";
  j["complete"] = complete;
  return j;
}

void write_sweep_manifest(const std::filesystem::path& dataset_dir, const SweepConfig& c, bool complete) {
  const auto path = c.out_dir / "sweep_manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << sweep_manifest(dataset_dir, c, complete).dump(2) << '\n';
}

std::string cell_label(const Cell& c) {
  return "rate=" + rate_text(c.rate) + " seed=" + std::to_string(c.seed) + " mode=" + std::string(to_string(c.mode));
}

}  // namespace

std::vector<ExperimentRecord> run_sweep(const std::filesystem::path& dataset_dir, const SweepConfig& config) {
  config.hyper.validate();
  if (config.rates.empty() || config.seeds.empty() || config.modes.empty())
    throw ArgumentError("sweep needs at least one rate, seed and mode");
  for (double r : config.rates) (void)masked_size(1, r);
  if (config.out_dir.empty()) throw ArgumentError("sweep needs an output directory");

  const auto manifest = read_manifest(dataset_dir);
  check_dataset(dataset_dir, manifest);
  const auto weather = read_weather(dataset_dir / "weather.csv");
  std::map<std::string, std::vector<BuildingDesign>> test_designs;
  for (const auto& ts : kTestSets) test_designs[ts] = read_designs(dataset_dir, "test_" + ts);

  std::vector<Cell> cells;
  for (double r : config.rates)
    for (auto s : config.seeds)
      for (auto m : config.modes) cells.push_back({r, s, m});

  std::filesystem::create_directories(config.out_dir);
  const auto results_path = config.out_dir / "results.csv";
  const auto suffix = model_suffix(config.ablation);
  const std::size_t per_cell = kModelNames.size() * kTestSets.size();

  // Keep complete cells from an earlier run.
  std::vector<std::vector<ExperimentRecord>> done(cells.size());
  std::vector<bool> have(cells.size(), false);
  if (config.resume && std::filesystem::exists(results_path)) {
    for (auto& r : read_results(results_path)) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == Cell{r.rate, r.seed, r.mode}) done[i].push_back(r);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::set<std::pair<std::string, std::string>> seen;
      for (const auto& r : done[i])
        if (r.model.size() >= suffix.size() && r.model.ends_with(suffix)) seen.emplace(r.model, r.test_set);
      have[i] = done[i].size() == per_cell && seen.size() == per_cell;
      if (!have[i]) done[i].clear();
    }
  }
  std::vector<ExperimentRecord> kept;
  std::vector<Cell> pending;
  std::vector<std::size_t> pending_slot;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (have[i]) {
      kept.insert(kept.end(), done[i].begin(), done[i].end());
    } else {
      pending.push_back(cells[i]);
      pending_slot.push_back(i);
    }
  }
  write_sweep_manifest(dataset_dir, config, false);
  write_results(results_path, kept);
  if (config.log && !kept.empty()) config.log("resuming: " + std::to_string(cells.size() - pending.size()) + " cells kept");

  if (!pending.empty()) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrainingPool pool(dataset_dir, manifest, pending);
    if (config.log) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      char buf[96];
      std::snprintf(buf, sizeof buf, "loaded training rows for %zu cells in %.1fs", pending.size(), dt.count());
      config.log(buf);
    }

    std::vector<std::optional<std::vector<ExperimentRecord>>> results(pending.size());
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    bool failed = false;

    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= pending.size()) return;
        {
          std::lock_guard lock(mu);
          if (failed) return;
        }
        try {
          const auto t = std::chrono::steady_clock::now();
          auto recs = run_cell(dataset_dir, manifest, weather, test_designs, pending[i], config, pool.extract(pending[i]));
          if (config.log) {
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t;
            char buf[64];
            std::snprintf(buf, sizeof buf, " done in %.1fs", dt.count());
            std::lock_guard lock(mu);
            config.log("cell " + cell_label(pending[i]) + buf);
          }
          std::lock_guard lock(mu);
          results[i] = std::move(recs);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failed) error = std::current_exception();
          failed = true;
        }
        cv.notify_all();
      }
    };

    const int n_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(pending.size())));
    std::vector<std::thread> threads;
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);

    // Ordered commit: append each pending cell once it and all before it finished.
    {
      std::ofstream out(results_path, std::ios::app);
      std::size_t commit = 0;
      std::unique_lock lock(mu);
      while (commit < pending.size()) {
        cv.wait(lock, [&] { return failed || results[commit].has_value(); });
        if (failed) break;
        for (const auto& r : *results[commit]) out << format_record(r) << '\n';
        out.flush();
        ++commit;
      }
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    for (std::size_t i = 0; i < pending.size(); ++i) done[pending_slot[i]] = std::move(*results[i]);
  }

  std::vector<ExperimentRecord> all;
  for (auto& d : done) all.insert(all.end(), d.begin(), d.end());
  write_results(results_path, all);
  write_sweep_manifest(dataset_dir, config, true);
  return all;
}

std::vector<ExperimentRecord> run_ablation(const std::filesystem::path& dataset_dir, double rate,
                                           std::vector<std::uint64_t> seeds, Ablation ablation, SweepConfig base) {
  base.rates = {rate};
  base.seeds = std::move(seeds);
  base.ablation = ablation;
  return run_sweep(dataset_dir, base);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

double median(std::vector<double> v) {
  if (v.empty()) throw ArgumentError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string format_rate_percent(double rate) {
  const double p = rate * 100.0;
  for (int d = 2; d <= 8; ++d) {
    const double scale = std::pow(10.0, d);
    if (std::abs(std::round(p * scale) / scale - p) < 1e-9 * std::max(1.0, p)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.*f%%", d, p);
      return buf;
    }
  }
  return format_exact(p) + "%";
}

namespace {

std::string with_thousands(std::uint64_t n) {
  auto s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

const std::vector<std::pair<std::string, std::string>> kTableRows = {
    {"monolithic", "Building*"},       {"cbml_composed", "CBML Building"}, {"ground_floor", "Ground floor"},
    {"infiltration", "Infiltration"}, {"roof", "Roof"},                   {"wall_window", "Wall & Window"},
    {"zone", "Zone"}};
const std::vector<std::pair<std::string, std::string>> kTestColumns = {
    {"box", "Box"}, {"random", "Rand."}, {"representative", "Rep."}};

std::string base_model(const std::string& model, std::string* suffix = nullptr) {
  const auto p = model.find('+');
  if (suffix) *suffix = p == std::string::npos ? "" : model.substr(p);
  return model.substr(0, p);
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}
std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_table(std::span<const ExperimentRecord> records) {
  if (records.empty()) throw ArgumentError("no records to report");
  std::set<MaskMode> modes;
  for (const auto& r : records) modes.insert(r.mode);
  std::ostringstream out;
  for (auto mode : modes) {
    std::vector<double> rates;
    std::set<std::uint64_t> seeds;
    std::set<std::string> suffixes;
    std::map<std::tuple<double, std::string, std::string>, std::vector<double>> cells;
    std::map<double, std::uint64_t> mono_rows;
    for (const auto& r : records) {
      if (r.mode != mode) continue;
      if (std::find(rates.begin(), rates.end(), r.rate) == rates.end()) rates.push_back(r.rate);
      seeds.insert(r.seed);
      std::string suffix;
      const auto base = base_model(r.model, &suffix);
      suffixes.insert(suffix);
      cells[{r.rate, base, r.test_set}].push_back(r.r2);
      if (base == "monolithic") mono_rows[r.rate] = std::max(mono_rows[r.rate], r.n_train_rows);
    }
    std::sort(rates.rbegin(), rates.rend());

    constexpr std::size_t kLabel = 15, kCol = 6;
    const std::size_t group = kTestColumns.size() * kCol;
    out << "Median R2 over " << seeds.size() << " seed(s) (multi-seed median), masking mode: " << to_string(mode);
    for (const auto& s : suffixes)
      if (!s.empty()) out << ", components " << s.substr(1);
    out << "\n";
    out << pad_right("", kLabel);
    for (double r : rates) {
      std::string head = format_rate_percent(r);
      if (mono_rows.contains(r)) head += "/" + with_thousands(mono_rows[r]);
      out << " | " << pad(head, group);
    }
    out << "\n" << pad_right("Model", kLabel);
    for (std::size_t i = 0; i < rates.size(); ++i) {
      out << " | ";
      for (const auto& [_, title] : kTestColumns) out << pad(title, kCol);
    }
    out << "\n" << std::string(kLabel, '-');
    for (std::size_t i = 0; i < rates.size(); ++i) out << "-+-" << std::string(group, '-');
    out << "\n";
    for (const auto& [model, title] : kTableRows) {
      out << pad_right(title, kLabel);
      for (double r : rates) {
        out << " | ";
        for (const auto& [ts, _] : kTestColumns) {
          const auto it = cells.find({r, model, ts});
          if (it == cells.end()) {
            out << pad("-", kCol);
            continue;
          }
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.2f", median(it->second));
          out << pad(buf, kCol);
        }
      }
      out << "\n";
    }
    out << "* monolithic model on building parameters and weather\n\n";
  }
  return out.str();
}

void emit_report(std::span<const ExperimentRecord> records, const std::filesystem::path& out_dir) {
  if (records.empty()) throw ArgumentError("no records to report");
  std::filesystem::create_directories(out_dir);
  write_results(out_dir / "results.csv", records);
  {
    std::ofstream t(out_dir / "table.txt");
    if (!t) throw std::runtime_error("cannot write " + (out_dir / "table.txt").string());
    t << format_table(records);
  }
  for (const auto& ts : kTestSets) {
    std::vector<double> rates;
    std::vector<std::string> models;
    std::map<std::pair<double, std::string>, std::vector<double>> values;
    for (const auto& r : records) {
      if (r.test_set != ts) continue;
      if (std::find(rates.begin(), rates.end(), r.rate) == rates.end()) rates.push_back(r.rate);
      if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
      values[{r.rate, r.model}].push_back(r.r2);
    }
    std::sort(rates.rbegin(), rates.rend());
    std::stable_sort(models.begin(), models.end(), [](const std::string& a, const std::string& b) {
      const auto ia = std::find(kModelNames.begin(), kModelNames.end(), base_model(a)) - kModelNames.begin();
      const auto ib = std::find(kModelNames.begin(), kModelNames.end(), base_model(b)) - kModelNames.begin();
      return ia < ib;
    });
    csv::Writer out(out_dir / ("curves_" + ts + ".csv"));
    out.write_header({"rate", "model", "median_r2", "n_seeds"});
    for (double r : rates)
      for (const auto& m : models) {
        const auto it = values.find({r, m});
        if (it == values.end()) continue;
        std::string line;
        append_exact(line, r);
        line += ',' + m + ',';
        append_exact(line, median(it->second));
        line += ',' + std::to_string(it->second.size());
        out.write_line(line);
      }
    out.close();
  }
}

}  // namespace bemlab::experiment
