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

// bemlab command-line driver: gendata, train, evaluate, sweep, ablate, report.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "bemlab/cbml.hpp"
#include "bemlab/dataset.hpp"
#include "bemlab/experiment.hpp"

namespace {

using namespace bemlab;

std::string default_data_dir() {
  const char* env = std::getenv("BEMLAB_DATA_DIR");
  return env && *env ? env : "data";
}

void add_hyper_flags(CLI::App* cmd, gbdt::Hyperparams& h) {
  cmd->add_option("--max-leaves", h.max_leaves, "Leaves per tree")->capture_default_str();
  cmd->add_option("--learning-rate", h.learning_rate, "Shrinkage")->capture_default_str();
  cmd->add_option("--min-leaf", h.min_leaf, "Minimum rows per leaf")->capture_default_str();
  cmd->add_option("--l2", h.l2, "L2 leaf regularization")->capture_default_str();
  cmd->add_option("--max-bins", h.max_bins, "Histogram bins per feature")->capture_default_str();
  cmd->add_option("--max-rounds", h.max_rounds, "Boosting round cap")->capture_default_str();
  cmd->add_option("--cv-folds", h.cv_folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--patience", h.patience, "Early-stopping patience in rounds")->capture_default_str();
  cmd->add_flag("--cv-ensemble", h.cv_ensemble, "Deploy the averaged fold models instead of a refit");
}

std::vector<MaskMode> parse_modes(const std::vector<std::string>& names) {
  std::vector<MaskMode> out;
  for (const auto& n : names) {
    if (n == "both") {
      out = {MaskMode::independent, MaskMode::consistent};
      continue;
    }
    out.push_back(parse_mask_mode(n));
  }
  return out;
}

void log_line(const std::string& s) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%H:%M:%S", std::localtime(&now));
  std::cerr << "[" << buf << "] " << s << std::endl;
}

int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bemlab: component-based vs monolithic building-energy surrogates under sparse data"};
  app.set_config("--config", "", "Optional TOML/INI file with flag values (flags override it)");
  app.require_subcommand(1);

  // gendata
  GenConfig gen;
  std::string gen_out = default_data_dir();
  auto* c_gen = app.add_subcommand("gendata", "Generate weather, designs and component tables");
  c_gen->add_option("--out", gen_out, "Dataset directory (default $BEMLAB_DATA_DIR or ./data)")->capture_default_str();
  c_gen->add_option("--seed", gen.master_seed, "Master seed")->capture_default_str();
  c_gen->add_option("--train-buildings", gen.train_buildings, "Box training buildings")->capture_default_str();
  c_gen->add_option("--test-buildings", gen.test_buildings, "Buildings per test family")->capture_default_str();
  c_gen->add_option("--scale", gen.scale, "Scale factor applied to both building counts")->capture_default_str();
  c_gen->add_flag("--force", gen.force, "Overwrite a non-empty output directory");

  // train
  std::string tr_data = default_data_dir(), tr_out, tr_arch = "cbml", tr_mode = "independent";
  double tr_rate = 1.0;
  std::uint64_t tr_seed = 0;
  bool tr_oracle = false;
  gbdt::Hyperparams tr_hyper;
  auto* c_train = app.add_subcommand("train", "Train a component set or a monolithic model on masked data");
  c_train->add_option("--data", tr_data, "Dataset directory")->capture_default_str();
  c_train->add_option("--out", tr_out, "Model directory")->required();
  c_train->add_option("--arch", tr_arch, "cbml or monolithic")
      ->check(CLI::IsMember({"cbml", "monolithic"}))
      ->capture_default_str();
  c_train->add_option("--rate", tr_rate, "Masking rate in (0, 1]")->capture_default_str();
  c_train->add_option("--seed", tr_seed, "Masking and training seed")->capture_default_str();
  c_train->add_option("--mode", tr_mode, "independent or consistent")
      ->check(CLI::IsMember({"independent", "consistent"}))
      ->capture_default_str();
  c_train->add_flag("--oracle", tr_oracle, "Write exact-physics stand-ins instead of training (debug)");
  add_hyper_flags(c_train, tr_hyper);

  // evaluate
  std::string ev_model, ev_data = default_data_dir(), ev_set = "all", ev_out;
  auto* c_eval = app.add_subcommand("evaluate", "Score a model directory on test sets");
  c_eval->add_option("--model", ev_model, "Model directory")->required();
  c_eval->add_option("--data", ev_data, "Dataset directory")->capture_default_str();
  c_eval->add_option("--test-set", ev_set, "box, random, representative or all")
      ->check(CLI::IsMember({"box", "random", "representative", "all"}))
      ->capture_default_str();
  c_eval->add_option("--out", ev_out, "Write records as results CSV");

  // sweep
  experiment::SweepConfig sw;
  sw.workers = default_workers();
  std::string sw_data = default_data_dir(), sw_out = "results";
  std::vector<std::string> sw_modes = {"independent"};
  bool sw_fresh = false;
  auto* c_sweep = app.add_subcommand("sweep", "Run the sparsity sweep");
  c_sweep->add_option("--data", sw_data, "Dataset directory")->capture_default_str();
  c_sweep->add_option("--out", sw_out, "Output directory for results.csv")->capture_default_str();
  c_sweep->add_option("--rates", sw.rates, "Masking rates")->capture_default_str();
  c_sweep->add_option("--seeds", sw.seeds, "Seeds")->capture_default_str();
  c_sweep->add_option("--modes", sw_modes, "independent, consistent or both")->capture_default_str();
  c_sweep->add_option("--workers", sw.workers, "Parallel cells (1 = byte-reproducible)")->capture_default_str();
  c_sweep->add_flag("--fresh", sw_fresh, "Ignore existing results instead of resuming");
  add_hyper_flags(c_sweep, sw.hyper);

  // ablate
  experiment::SweepConfig ab;
  ab.workers = default_workers();
  std::string ab_data = default_data_dir(), ab_out = "ablation", ab_kind = "wall_window", ab_strategy = "mean";
  std::vector<std::string> ab_modes = {"independent"};
  double ab_rate = 0.000125;
  std::vector<std::uint64_t> ab_seeds = {0, 1, 2, 3, 4};
  bool ab_fresh = false;
  auto* c_ablate = app.add_subcommand("ablate", "Sweep with one component replaced by its mean or noise");
  c_ablate->add_option("--data", ab_data, "Dataset directory")->capture_default_str();
  c_ablate->add_option("--out", ab_out, "Output directory")->capture_default_str();
  c_ablate->add_option("--rate", ab_rate, "Masking rate")->capture_default_str();
  c_ablate->add_option("--seeds", ab_seeds, "Seeds")->capture_default_str();
  c_ablate->add_option("--modes", ab_modes, "independent, consistent or both")->capture_default_str();
  c_ablate->add_option("--kind", ab_kind, "Component to ablate")
      ->check(CLI::IsMember({"wall_window", "roof", "ground_floor", "infiltration", "zone"}))
      ->capture_default_str();
  c_ablate->add_option("--strategy", ab_strategy, "mean or noise")
      ->check(CLI::IsMember({"mean", "noise"}))
      ->capture_default_str();
  c_ablate->add_option("--workers", ab.workers, "Parallel cells")->capture_default_str();
  c_ablate->add_flag("--fresh", ab_fresh, "Ignore existing results instead of resuming");
  add_hyper_flags(c_ablate, ab.hyper);

  // report
  std::vector<std::string> rp_inputs;
  std::string rp_out = "report";
  auto* c_report = app.add_subcommand("report", "Render results CSVs as a table and per-test-set curves");
  c_report->add_option("--results", rp_inputs, "One or more results.csv files")->required();
  c_report->add_option("--out", rp_out, "Report directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_gen) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto m = generate_dataset(gen_out, gen);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      std::printf("wrote %s: %lld train / %lld test buildings per family in %.1fs\n", gen_out.c_str(),
                  static_cast<long long>(m.train_buildings), static_cast<long long>(m.test_buildings), dt.count());
      for (const auto& [name, s] : m.splits)
        std::printf("  %-20s building rows %llu, wall rows %llu\n", name.c_str(),
                    static_cast<unsigned long long>(s.rows.at(ComponentKind::building_monolithic)),
                    static_cast<unsigned long long>(s.rows.at(ComponentKind::wall_window)));
      return 0;
    }

    if (*c_train) {
      std::map<std::string, std::string> info = {{"data_dir", std::filesystem::absolute(tr_data).string()},
                                                 {"rate", format_exact(tr_rate)},
                                                 {"seed", std::to_string(tr_seed)},
                                                 {"mode", tr_mode}};
      if (tr_oracle) {
        if (tr_arch != "cbml") throw ArgumentError("--oracle is only available for --arch cbml");
        info["rate"] = "1";
        cbml::save_model_set(tr_out, cbml::physics_oracle_set(), info);
        std::printf("wrote physics oracle set to %s\n", tr_out.c_str());
        return 0;
      }
      const auto manifest = read_manifest(tr_data);
      if (!manifest.complete) throw ArgumentError("dataset in " + tr_data + " is marked incomplete");
      const experiment::Cell cell{tr_rate, tr_seed, parse_mask_mode(tr_mode)};
      (void)masked_size(1, tr_rate);
      const auto masked = experiment::load_masked_training(tr_data, manifest, cell);
      const auto seed = experiment::training_seed(cell);
      if (tr_arch == "monolithic") {
        const auto m = cbml::train_monolithic(masked.at(ComponentKind::building_monolithic), tr_hyper, seed);
        cbml::save_monolithic(tr_out, m, info);
        std::printf("monolithic: %llu rows, best_rounds %d\n", static_cast<unsigned long long>(m.n_rows), m.best_rounds);
      } else {
        const auto set = cbml::train_cbml(masked, tr_hyper, seed);
        cbml::save_model_set(tr_out, set, info);
        for (auto k : kComponentKinds) {
          const auto& g = dynamic_cast<const cbml::GbdtComponent&>(set.at(k)).model();
          std::printf("%-13s %8llu rows, best_rounds %d\n", std::string(to_string(k)).c_str(),
                      static_cast<unsigned long long>(g.n_rows), g.best_rounds);
        }
      }
      return 0;
    }

    if (*c_eval) {
      const auto md = cbml::load_model_directory(ev_model);
      const auto weather = read_weather(std::filesystem::path(ev_data) / "weather.csv");
      experiment::Cell cell{1.0, 0, MaskMode::independent};
      if (md.info.contains("rate")) cell.rate = std::stod(md.info.at("rate"));
      if (md.info.contains("seed")) cell.seed = std::stoull(md.info.at("seed"));
      if (md.info.contains("mode")) cell.mode = parse_mask_mode(md.info.at("mode"));
      std::map<std::string, std::uint64_t> n_rows;
      if (md.monolithic) n_rows["monolithic"] = md.monolithic->n_rows;
      std::uint64_t total = 0;
      for (const auto& [k, st] : md.set.stats) {
        n_rows[std::string(to_string(k))] = st.n;
        total += st.n;
      }
      if (!md.set.models.empty()) n_rows["cbml_composed"] = total;
      std::vector<experiment::ExperimentRecord> records;
      const std::vector<std::string> sets = ev_set == "all" ? experiment::kTestSets : std::vector<std::string>{ev_set};
      for (const auto& ts : sets) {
        const auto designs = read_designs(ev_data, "test_" + ts);
        const auto recs = experiment::evaluate(md.set.models.empty() ? nullptr : &md.set,
                                               md.monolithic ? &*md.monolithic : nullptr, designs, weather, ts, cell,
                                               n_rows);
        records.insert(records.end(), recs.begin(), recs.end());
      }
      for (const auto& r : records)
        std::printf("%-14s %-15s r2 %8.4f  rmse %12.3f\n", r.test_set.c_str(), r.model.c_str(), r.r2, r.rmse);
      if (!ev_out.empty()) experiment::write_results(ev_out, records);
      return 0;
    }

    if (*c_sweep) {
      sw.modes = parse_modes(sw_modes);
      sw.out_dir = sw_out;
      sw.resume = !sw_fresh;
      sw.log = log_line;
      const auto records = experiment::run_sweep(sw_data, sw);
      experiment::emit_report(records, sw_out);
      std::cout << experiment::format_table(records);
      return 0;
    }

    if (*c_ablate) {
      ab.modes = parse_modes(ab_modes);
      ab.out_dir = ab_out;
      ab.resume = !ab_fresh;
      ab.log = log_line;
      const experiment::Ablation a{parse_component_kind(ab_kind), cbml::parse_ablation_strategy(ab_strategy)};
      const auto records = experiment::run_ablation(ab_data, ab_rate, ab_seeds, a, ab);
      experiment::emit_report(records, ab_out);
      std::cout << experiment::format_table(records);
      return 0;
    }

    if (*c_report) {
      std::vector<experiment::ExperimentRecord> records;
      for (const auto& p : rp_inputs) {
        const auto r = experiment::read_results(p);
        records.insert(records.end(), r.begin(), r.end());
      }
      experiment::emit_report(records, rp_out);
      std::cout << experiment::format_table(records);
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "bemlab: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
