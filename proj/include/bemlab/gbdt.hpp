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

// Histogram gradient-boosted regression trees on squared-error loss.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bemlab/common.hpp"

namespace bemlab::gbdt {

struct Hyperparams {
  int max_leaves = 31;
  double learning_rate = 0.1;
  int min_leaf = 20;
  double l2 = 0.0;
  int max_bins = 255;
  int max_rounds = 5000;
  int cv_folds = 3;
  int patience = 300;
  /// Deploy the averaged fold models instead of a refit on all rows.
  bool cv_ensemble = false;

  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Per-feature ascending upper bin edges. A value v falls into the first bin
/// whose edge is >= v; values above the last edge fall into the last bin.
class BinMap {
 public:
  BinMap() = default;
  explicit BinMap(std::vector<std::vector<double>> edges);

  std::size_t features() const { return edges_.size(); }
  std::size_t bins(std::size_t f) const { return edges_[f].size(); }
  const std::vector<double>& edges(std::size_t f) const { return edges_[f]; }
  std::uint8_t bin(std::size_t f, double v) const;

  friend bool operator==(const BinMap&, const BinMap&) = default;

 private:
  std::vector<std::vector<double>> edges_;
};

/// Quantile edges, at most `max_bins` per feature; a constant feature gets one bin.
BinMap build_bins(const Matrix& x, int max_bins);

/// Bin indices held both column-major and row-major.
class BinnedMatrix {
 public:
  BinnedMatrix(const Matrix& x, const BinMap& map);
  /// Direct construction from bin indices, column-major [feature][row].
  BinnedMatrix(std::size_t rows, std::vector<std::uint8_t> bins, std::vector<int> bin_counts);

  std::size_t rows() const { return rows_; }
  std::size_t features() const { return bin_counts_.size(); }
  int bin_count(std::size_t f) const { return bin_counts_[f]; }
  std::span<const std::uint8_t> column(std::size_t f) const { return {bins_.data() + f * rows_, rows_}; }
  const std::uint8_t* row(std::size_t r) const { return by_row_.data() + r * bin_counts_.size(); }
  std::uint8_t operator()(std::size_t r, std::size_t f) const { return bins_[f * rows_ + r]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint8_t> bins_;
  std::vector<std::uint8_t> by_row_;
  std::vector<int> bin_counts_;
  void fill_rows();
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  int split_bin = 0;
  double split_value = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Node 0 is the root; splitting node i appends its left then right child.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int leaf_index(const BinnedMatrix& x, std::size_t row) const;
  std::size_t leaf_count() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

/// Grows one leaf-wise tree on `rows` of `x` against negative gradients
/// `residuals` (indexed by row of `x`). Split values are taken from `map`.
class TreeLearner {
 public:
  TreeLearner(const BinnedMatrix& x, const BinMap& map, const Hyperparams& hyper);
  ~TreeLearner();
  TreeLearner(const TreeLearner&) = delete;
  TreeLearner& operator=(const TreeLearner&) = delete;

  Tree fit(std::span<const std::uint32_t> rows, std::span<const double> residuals);

  /// After fit(): calls f(row, leaf_value) for every fitted row.
  template <class F>
  void for_each_row(const Tree& tree, F&& f) const {
    for (const auto& leaf : leaves_) {
      const double v = tree.nodes[static_cast<std::size_t>(leaf.node)].value;
      for (std::size_t i = leaf.begin; i < leaf.end; ++i) f(index_[i], v);
    }
  }

 private:
  struct Leaf {
    int node;
    std::size_t begin, end;
  };
  struct Impl;
  std::vector<std::uint32_t> index_;
  std::vector<Leaf> leaves_;
  std::unique_ptr<Impl> impl_;
};

/// Fits one tree on every row of `x`.
Tree fit_tree(const BinnedMatrix& x, const BinMap& map, std::span<const double> residuals, const Hyperparams& hyper);

struct GbdtModel {
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  BinMap bin_map;
  std::vector<std::string> feature_names;
  int best_rounds = 0;
  Hyperparams hyper;
  std::uint64_t n_rows = 0;
  std::uint64_t seed = 0;
  double label_mean = 0.0;
  double label_sd = 0.0;
  /// Mean held-out RMSE per boosting round; empty when CV was skipped.
  std::vector<double> cv_rmse;

  std::size_t n_features() const { return bin_map.features(); }
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& x) const;

  friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

/// Flattened, bin-indexed form of a model for batch prediction. Gives the same
/// values as GbdtModel::predict, tree sums in the same order.
///
/// Trees with at most 32 leaves are evaluated through per-feature bitmask
/// tables: each table entry clears the leaves a bin value cannot reach, and
/// the exit leaf is the leftmost survivor. Larger trees fall back to
/// node traversal.
class Forest {
 public:
  explicit Forest(const GbdtModel& model);
  std::size_t n_features() const { return map_.features(); }
  std::vector<double> predict(const Matrix& x) const;
  /// Same values as predict(). Rows are split into two column groups
  /// (`second` and the rest); each distinct binned sub-row is evaluated once
  /// per tree, so tables built as a product of few static and few time-varying
  /// rows are cheap.
  std::vector<double> predict_factored(const Matrix& x, std::span<const std::size_t> second) const;

 private:
  struct Node {
    std::uint16_t feature;
    std::uint8_t bin;
    std::int32_t left;  // >= 0: node index, < 0: ~leaf index
    std::int32_t right;
  };
  struct Table {
    std::uint32_t feature;
    std::uint32_t offset;  // into masks_
  };
  struct TreeRef {
    std::uint32_t first_table, n_tables;
    std::uint32_t first_leaf;
    std::int32_t root;  // traversal entry, same encoding as Node children
  };
  BinMap map_;
  double base_ = 0.0;
  double lr_ = 0.1;
  bool use_masks_ = true;
  std::vector<TreeRef> trees_;
  std::vector<Table> tables_;
  std::vector<std::uint32_t> masks_;
  std::vector<Node> nodes_;
  std::vector<double> leaves_;  // in-order (left to right) per tree
};

/// Cross-validated early stopping followed by a refit on all rows for the best
/// round count (or the fold-averaged ensemble when hyper.cv_ensemble is set).
GbdtModel train(const Matrix& x, std::span<const double> y, const Hyperparams& hyper, std::uint64_t seed,
                std::vector<std::string> feature_names = {});

/// Boosts exactly `rounds` trees on all rows with no validation.
GbdtModel boost(const Matrix& x, std::span<const double> y, const Hyperparams& hyper, int rounds,
                std::vector<std::string> feature_names = {});

/// A model that predicts `value` everywhere.
GbdtModel constant_model(double value, std::size_t n_features, std::vector<std::string> feature_names = {});

void save_model(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel load_model(const std::filesystem::path& path);
std::string serialize(const GbdtModel& model);
GbdtModel deserialize(std::string_view text, std::string_view origin = "<memory>");

}  // namespace bemlab::gbdt
