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

#include "bemlab/gbdt.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <unordered_map>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace bemlab::gbdt {

void Hyperparams::validate() const {
  if (max_leaves < 2) throw ArgumentError("max_leaves must be at least 2");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  if (min_leaf < 1) throw ArgumentError("min_leaf must be positive");
  if (!(l2 >= 0.0)) throw ArgumentError("l2 must be non-negative");
  if (max_bins < 2 || max_bins > 255) throw ArgumentError("max_bins must lie in [2, 255]");
  if (max_rounds < 1) throw ArgumentError("max_rounds must be positive");
  if (cv_folds < 2) throw ArgumentError("cv_folds must be at least 2");
  if (patience < 1) throw ArgumentError("patience must be positive");
}

// ---------------------------------------------------------------------------
// Binning
// ---------------------------------------------------------------------------

BinMap::BinMap(std::vector<std::vector<double>> edges) : edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (e.empty() || e.size() > 255) throw ArgumentError("BinMap: each feature needs 1..255 edges");
    for (std::size_t i = 1; i < e.size(); ++i)
      if (!(e[i - 1] < e[i])) throw ArgumentError("BinMap: edges must be strictly increasing");
  }
}

std::uint8_t BinMap::bin(std::size_t f, double v) const {
  const auto& e = edges_[f];
  const auto it = std::lower_bound(e.begin(), e.end(), v);
  const auto b = std::min<std::ptrdiff_t>(it - e.begin(), static_cast<std::ptrdiff_t>(e.size()) - 1);
  return static_cast<std::uint8_t>(b);
}

BinMap build_bins(const Matrix& x, int max_bins) {
  if (x.empty()) throw ArgumentError("build_bins: empty matrix");
  if (max_bins < 1 || max_bins > 255) throw ArgumentError("max_bins must lie in [1, 255]");
  const std::size_t n = x.rows();
  std::vector<std::vector<double>> edges(x.cols());
  std::vector<double> col(n);
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < n; ++r) {
      col[r] = x(r, f);
      if (!std::isfinite(col[r])) throw ArgumentError("build_bins: non-finite feature value");
    }
    std::sort(col.begin(), col.end());
    // Cut after the row at each population quantile, then place the edge
    // halfway to the next distinct value so unseen values split evenly.
    auto& e = edges[f];
    std::size_t prev_cut = 0;
    for (int b = 1; b < max_bins; ++b) {
      std::size_t cut = (static_cast<std::size_t>(b) * n + static_cast<std::size_t>(max_bins) - 1) /
                        static_cast<std::size_t>(max_bins);
      cut = std::max(cut, prev_cut + 1);
      if (cut >= n) break;
      // Move the cut to a run boundary: first index whose value differs from col[cut - 1].
      const auto run_end = std::upper_bound(col.begin() + static_cast<std::ptrdiff_t>(cut - 1), col.end(), col[cut - 1]);
      cut = static_cast<std::size_t>(run_end - col.begin());
      if (cut >= n) break;
      const double mid = col[cut - 1] + (col[cut] - col[cut - 1]) / 2.0;
      if (e.empty() || mid > e.back()) e.push_back(mid);
      prev_cut = cut;
    }
    if (e.empty() || col.back() > e.back()) e.push_back(col.back());
  }
  return BinMap(std::move(edges));
}

BinnedMatrix::BinnedMatrix(const Matrix& x, const BinMap& map) : rows_(x.rows()) {
  if (x.cols() != map.features()) throw ArgumentError("BinnedMatrix: feature count does not match bin map");
  bins_.resize(rows_ * x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    bin_counts_.push_back(static_cast<int>(map.bins(f)));
    for (std::size_t r = 0; r < rows_; ++r) bins_[f * rows_ + r] = map.bin(f, x(r, f));
  }
  fill_rows();
}

void BinnedMatrix::fill_rows() {
  const std::size_t nf = bin_counts_.size();
  by_row_.resize(rows_ * nf);
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t r = 0; r < rows_; ++r) by_row_[r * nf + f] = bins_[f * rows_ + r];
}

BinnedMatrix::BinnedMatrix(std::size_t rows, std::vector<std::uint8_t> bins, std::vector<int> bin_counts)
    : rows_(rows), bins_(std::move(bins)), bin_counts_(std::move(bin_counts)) {
  if (bins_.size() != rows_ * bin_counts_.size()) throw ArgumentError("BinnedMatrix: size mismatch");
  for (std::size_t f = 0; f < bin_counts_.size(); ++f)
    for (std::size_t r = 0; r < rows_; ++r)
      if (bins_[f * rows_ + r] >= bin_counts_[f]) throw ArgumentError("BinnedMatrix: bin index out of range");
  fill_rows();
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.split_value ? n.left : n.right);
  }
  return nodes[i].value;
}

int Tree::leaf_index(const BinnedMatrix& x, std::size_t row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x(row, static_cast<std::size_t>(n.feature)) <= n.split_bin ? n.left : n.right);
  }
  return static_cast<int>(i);
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

struct Bin {
  double g = 0.0;
  std::uint32_t n = 0;
};

struct Candidate {
  bool valid = false;
  double gain = 0.0;
  int feature = -1;
  int bin = 0;
  std::uint32_t n_left = 0;
  double g_left = 0.0;
};

// Relative floor below which a gain is treated as rounding noise.
constexpr double kGainEpsilon = 1e-12;

// Gains this close count as tied, so mirror-image splits with equal exact
// gains resolve by scan order rather than by summation rounding.
bool beats(double gain, double best) { return gain > best + 1e-12 * std::abs(best); }

}  // namespace

struct TreeLearner::Impl {
  const BinnedMatrix& x;
  const BinMap& map;
  Hyperparams hyper;
  std::vector<std::size_t> offset;  // per feature into a histogram
  std::size_t total_bins = 0;
  std::vector<Bin> hist;            // max_leaves slots
  std::vector<std::uint32_t> scratch;

  struct LeafState {
    std::size_t slot;
    double g;
    Candidate best;
  };
  std::vector<LeafState> state;

  Impl(const BinnedMatrix& bx, const BinMap& m, const Hyperparams& h) : x(bx), map(m), hyper(h) {
    for (std::size_t f = 0; f < x.features(); ++f) {
      offset.push_back(total_bins);
      total_bins += static_cast<std::size_t>(x.bin_count(f));
    }
    hist.resize(total_bins * static_cast<std::size_t>(hyper.max_leaves));
  }

  Bin* slot(std::size_t s) { return hist.data() + s * total_bins; }

  void build(std::size_t s, std::span<const std::uint32_t> rows, std::span<const double> res) {
    Bin* h = slot(s);
    std::fill(h, h + total_bins, Bin{});
    const std::size_t nf = x.features();
    const std::size_t* off = offset.data();
    for (auto r : rows) {
      const double g = res[r];
      const std::uint8_t* b = x.row(r);
      for (std::size_t f = 0; f < nf; ++f) {
        Bin& e = h[off[f] + b[f]];
        e.g += g;
        ++e.n;
      }
    }
  }

  void subtract(std::size_t into, std::size_t other) {
    Bin* a = slot(into);
    const Bin* b = slot(other);
    for (std::size_t i = 0; i < total_bins; ++i) {
      a[i].g -= b[i].g;
      a[i].n -= b[i].n;
    }
  }

  Candidate best_split(std::size_t s, double g_total, std::uint32_t n_total) const {
    Candidate best;
    const auto min_leaf = static_cast<std::uint32_t>(hyper.min_leaf);
    if (n_total < 2 * min_leaf) return best;
    const double l2 = hyper.l2;
    const double parent = g_total * g_total / (n_total + l2);
    const Bin* h = hist.data() + s * total_bins;
    for (std::size_t f = 0; f < x.features(); ++f) {
      const int nb = x.bin_count(f);
      const Bin* hf = h + offset[f];
      double gl = 0.0;
      std::uint32_t nl = 0;
      for (int b = 0; b + 1 < nb; ++b) {
        gl += hf[b].g;
        nl += hf[b].n;
        if (nl < min_leaf) continue;
        const std::uint32_t nr = n_total - nl;
        if (nr < min_leaf) break;
        const double gr = g_total - gl;
        const double children = gl * gl / (nl + l2) + gr * gr / (nr + l2);
        const double gain = children - parent;
        if (!(gain > kGainEpsilon * children)) continue;
        if (!best.valid || beats(gain, best.gain)) {
          best = {true, gain, static_cast<int>(f), b, nl, gl};
        }
      }
    }
    return best;
  }
};

TreeLearner::TreeLearner(const BinnedMatrix& x, const BinMap& map, const Hyperparams& hyper)
    : impl_(std::make_unique<Impl>(x, map, hyper)) {
  if (map.features() != x.features()) throw ArgumentError("TreeLearner: bin map does not match matrix");
}

TreeLearner::~TreeLearner() = default;

Tree TreeLearner::fit(std::span<const std::uint32_t> rows, std::span<const double> residuals) {
  auto& im = *impl_;
  if (residuals.size() != im.x.rows()) throw ArgumentError("fit_tree: residual count does not match rows");
  const double l2 = im.hyper.l2;
  index_.assign(rows.begin(), rows.end());
  leaves_.clear();
  im.state.clear();
  Tree tree;
  tree.nodes.reserve(2 * static_cast<std::size_t>(im.hyper.max_leaves));
  tree.nodes.emplace_back();
  if (index_.empty()) return tree;

  auto direct_sum = [&](std::size_t b, std::size_t e) {
    double g = 0.0;
    for (std::size_t i = b; i < e; ++i) g += residuals[index_[i]];
    return g;
  };

  const double g_root = direct_sum(0, index_.size());
  tree.nodes[0].value = g_root / (static_cast<double>(index_.size()) + l2);
  leaves_.push_back({0, 0, index_.size()});
  im.build(0, index_, residuals);
  im.state.push_back({0, g_root, im.best_split(0, g_root, static_cast<std::uint32_t>(index_.size()))});

  while (leaves_.size() < static_cast<std::size_t>(im.hyper.max_leaves)) {
    // Best-first: maximal gain, ties to the lowest node index.
    std::size_t pick = leaves_.size();
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
      const auto& c = im.state[i].best;
      if (!c.valid) continue;
      if (pick == leaves_.size()) {
        pick = i;
        continue;
      }
      const double other = im.state[pick].best.gain;
      const bool tied = !beats(c.gain, other) && !beats(other, c.gain);
      if (beats(c.gain, other) || (tied && leaves_[i].node < leaves_[pick].node)) pick = i;
    }
    if (pick == leaves_.size()) break;

    const Leaf parent = leaves_[pick];
    const auto parent_state = im.state[pick];
    const auto& c = parent_state.best;
    const auto col = im.x.column(static_cast<std::size_t>(c.feature));

    // Stable partition of the parent's range.
    im.scratch.clear();
    std::size_t w = parent.begin;
    for (std::size_t i = parent.begin; i < parent.end; ++i) {
      const auto r = index_[i];
      if (col[r] <= c.bin)
        index_[w++] = r;
      else
        im.scratch.push_back(r);
    }
    std::copy(im.scratch.begin(), im.scratch.end(), index_.begin() + static_cast<std::ptrdiff_t>(w));
    const std::size_t mid = parent.begin + c.n_left;

    const int left_id = static_cast<int>(tree.nodes.size());
    const int right_id = left_id + 1;
    auto& pn = tree.nodes[static_cast<std::size_t>(parent.node)];
    pn.feature = c.feature;
    pn.split_bin = c.bin;
    pn.split_value = im.map.edges(static_cast<std::size_t>(c.feature))[static_cast<std::size_t>(c.bin)];
    pn.left = left_id;
    pn.right = right_id;
    pn.value = 0.0;

    const double g_left = c.g_left;
    const double g_right = parent_state.g - c.g_left;
    const auto n_left = static_cast<std::uint32_t>(mid - parent.begin);
    const auto n_right = static_cast<std::uint32_t>(parent.end - mid);
    TreeNode ln, rn;
    ln.value = g_left / (n_left + l2);
    rn.value = g_right / (n_right + l2);
    tree.nodes.push_back(ln);
    tree.nodes.push_back(rn);

    // Smaller child gets a fresh histogram; the larger one reuses the parent's.
    const std::size_t fresh = leaves_.size();
    const bool left_small = n_left <= n_right;
    const std::size_t small_begin = left_small ? parent.begin : mid;
    const std::size_t small_end = left_small ? mid : parent.end;
    im.build(fresh, std::span<const std::uint32_t>(index_).subspan(small_begin, small_end - small_begin), residuals);
    im.subtract(parent_state.slot, fresh);
    const std::size_t left_slot = left_small ? fresh : parent_state.slot;
    const std::size_t right_slot = left_small ? parent_state.slot : fresh;

    leaves_[pick] = {left_id, parent.begin, mid};
    im.state[pick] = {left_slot, g_left, im.best_split(left_slot, g_left, n_left)};
    leaves_.push_back({right_id, mid, parent.end});
    im.state.push_back({right_slot, g_right, im.best_split(right_slot, g_right, n_right)});
  }
  return tree;
}

Tree fit_tree(const BinnedMatrix& x, const BinMap& map, std::span<const double> residuals, const Hyperparams& hyper) {
  TreeLearner learner(x, map, hyper);
  std::vector<std::uint32_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0u);
  return learner.fit(rows, residuals);
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

double GbdtModel::predict(std::span<const double> x) const {
  if (x.size() != n_features())
    throw ArgumentError("predict: expected " + std::to_string(n_features()) + " features, got " +
                        std::to_string(x.size()));
  double acc = 0.0;
  for (const auto& t : trees) acc += t.predict(x);
  return base_score + learning_rate * acc;
}

std::vector<double> GbdtModel::predict(const Matrix& x) const { return Forest(*this).predict(x); }

Forest::Forest(const GbdtModel& m) : map_(m.bin_map), base_(m.base_score), lr_(m.learning_rate) {
  for (const auto& t : m.trees)
    if (t.leaf_count() > 32) use_masks_ = false;
  std::vector<std::int32_t> ref;
  std::vector<std::uint32_t> leaf_id, lo, hi;
  for (const auto& t : m.trees) {
    const std::size_t nn = t.nodes.size();
    TreeRef tr{static_cast<std::uint32_t>(tables_.size()), 0, static_cast<std::uint32_t>(leaves_.size()), 0};

    // In-order leaf numbering and the leaf range under each node.
    leaf_id.assign(nn, 0);
    lo.assign(nn, 0);
    hi.assign(nn, 0);
    std::uint32_t next_leaf = 0;
    std::vector<std::pair<std::size_t, bool>> stack{{0, false}};
    while (!stack.empty()) {
      auto [i, expanded] = stack.back();
      stack.pop_back();
      const auto& n = t.nodes[i];
      if (n.is_leaf()) {
        leaf_id[i] = next_leaf;
        lo[i] = next_leaf;
        hi[i] = ++next_leaf;
        leaves_.push_back(n.value);
        continue;
      }
      if (!expanded) {
        stack.push_back({i, true});
        stack.push_back({static_cast<std::size_t>(n.right), false});
        stack.push_back({static_cast<std::size_t>(n.left), false});
      } else {
        lo[i] = lo[static_cast<std::size_t>(n.left)];
        hi[i] = hi[static_cast<std::size_t>(n.right)];
      }
    }

    // Traversal arrays.
    ref.assign(nn, 0);
    std::int32_t next = static_cast<std::int32_t>(nodes_.size());
    for (std::size_t i = 0; i < nn; ++i)
      ref[i] = t.nodes[i].is_leaf() ? ~static_cast<std::int32_t>(tr.first_leaf + leaf_id[i]) : next++;
    for (std::size_t i = 0; i < nn; ++i) {
      const auto& n = t.nodes[i];
      if (n.is_leaf()) continue;
      nodes_.push_back({static_cast<std::uint16_t>(n.feature), static_cast<std::uint8_t>(n.split_bin),
                        ref[static_cast<std::size_t>(n.left)], ref[static_cast<std::size_t>(n.right)]});
    }
    tr.root = ref[0];

    if (use_masks_) {
      // A node whose test fails (bin > split_bin) removes its left subtree's leaves.
      std::map<int, std::vector<std::pair<int, std::uint32_t>>> by_feature;
      for (std::size_t i = 0; i < nn; ++i) {
        const auto& n = t.nodes[i];
        if (n.is_leaf()) continue;
        const auto l = static_cast<std::size_t>(n.left);
        std::uint32_t clear = 0;
        for (std::uint32_t b = lo[l]; b < hi[l]; ++b) clear |= 1u << b;
        by_feature[n.feature].push_back({n.split_bin, ~clear});
      }
      for (auto& [f, list] : by_feature) {
        std::sort(list.begin(), list.end());
        const std::size_t nb = map_.bins(static_cast<std::size_t>(f));
        tables_.push_back({static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(masks_.size())});
        std::uint32_t cur = ~0u;
        std::size_t j = 0;
        for (std::size_t b = 0; b < nb; ++b) {
          masks_.push_back(cur);
          while (j < list.size() && static_cast<std::size_t>(list[j].first) == b) cur &= list[j++].second;
        }
      }
      tr.n_tables = static_cast<std::uint32_t>(tables_.size()) - tr.first_table;
    }
    trees_.push_back(tr);
  }
}

std::vector<double> Forest::predict(const Matrix& x) const {
  const std::size_t nf = map_.features();
  if (x.cols() != nf)
    throw ArgumentError("predict: expected " + std::to_string(nf) + " features, got " + std::to_string(x.cols()));
  std::vector<double> out(x.rows());
  constexpr std::size_t kBlock = 1024;
  std::vector<double> acc(kBlock);
  std::vector<std::uint32_t> live(kBlock);
  std::vector<std::uint8_t> bins(kBlock * nf);  // column-major within a block
  for (std::size_t b = 0; b < x.rows(); b += kBlock) {
    const std::size_t m = std::min(x.rows(), b + kBlock) - b;
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t f = 0; f < nf; ++f) bins[f * kBlock + r] = map_.bin(f, x(b + r, f));
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& tr : trees_) {
      const double* leaf = leaves_.data() + tr.first_leaf;
      if (use_masks_) {
        std::fill(live.begin(), live.begin() + static_cast<std::ptrdiff_t>(m), ~0u);
        for (std::uint32_t k = 0; k < tr.n_tables; ++k) {
          const Table& tb = tables_[tr.first_table + k];
          const std::uint32_t* mask = masks_.data() + tb.offset;
          const std::uint8_t* col = bins.data() + tb.feature * kBlock;
          std::uint32_t* lv = live.data();
          for (std::size_t r = 0; r < m; ++r) lv[r] &= mask[col[r]];
        }
        for (std::size_t r = 0; r < m; ++r) acc[r] += leaf[std::countr_zero(live[r])];
      } else {
        for (std::size_t r = 0; r < m; ++r) {
          std::int32_t i = tr.root;
          while (i >= 0) {
            const Node& n = nodes_[static_cast<std::size_t>(i)];
            i = bins[n.feature * kBlock + r] <= n.bin ? n.left : n.right;
          }
          acc[r] += leaves_[static_cast<std::size_t>(~i)];
        }
      }
    }
    for (std::size_t r = 0; r < m; ++r) out[b + r] = base_ + lr_ * acc[r];
  }
  return out;
}

std::vector<double> Forest::predict_factored(const Matrix& x, std::span<const std::size_t> second) const {
  const std::size_t nf = map_.features();
  if (x.cols() != nf)
    throw ArgumentError("predict: expected " + std::to_string(nf) + " features, got " + std::to_string(x.cols()));
  if (!use_masks_) return predict(x);
  std::vector<std::uint8_t> group(nf, 0);
  for (auto f : second) {
    if (f >= nf) throw ArgumentError("predict_factored: feature index out of range");
    group[f] = 1;
  }

  // Distinct binned sub-rows of each group, stored as full-width rows.
  std::array<std::unordered_map<std::string, std::uint32_t>, 2> index;
  std::array<std::vector<std::uint8_t>, 2> uniq;
  std::array<std::vector<std::uint32_t>, 2> id;
  for (auto& v : id) v.resize(x.rows());
  std::array<std::string, 2> key;
  std::vector<std::uint8_t> bins(nf);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    key[0].clear();
    key[1].clear();
    for (std::size_t f = 0; f < nf; ++f) {
      bins[f] = map_.bin(f, x(r, f));
      key[group[f]].push_back(static_cast<char>(bins[f]));
    }
    for (int g = 0; g < 2; ++g) {
      auto [it, fresh] = index[g].try_emplace(key[g], static_cast<std::uint32_t>(index[g].size()));
      if (fresh) uniq[g].insert(uniq[g].end(), bins.begin(), bins.end());
      id[g][r] = it->second;
    }
  }
  const std::array<std::size_t, 2> n_uniq{index[0].size(), index[1].size()};

  // Trees are processed in groups sized to keep the mask tables bounded.
  constexpr std::size_t kMaskBudget = std::size_t{1} << 24;
  const std::size_t per_tree = std::max<std::size_t>(1, n_uniq[0] + n_uniq[1]);
  const std::size_t width = std::clamp<std::size_t>(kMaskBudget / per_tree, 1, 64);
  std::array<std::vector<std::uint32_t>, 2> masks;
  std::vector<double> acc(x.rows(), 0.0);
  for (std::size_t t0 = 0; t0 < trees_.size(); t0 += width) {
    const std::size_t w = std::min(trees_.size(), t0 + width) - t0;
    for (int g = 0; g < 2; ++g) {
      masks[g].assign(n_uniq[g] * w, ~0u);
      for (std::size_t j = 0; j < w; ++j) {
        const auto& tr = trees_[t0 + j];
        for (std::uint32_t k = 0; k < tr.n_tables; ++k) {
          const Table& tb = tables_[tr.first_table + k];
          if (group[tb.feature] != g) continue;
          const std::uint32_t* mask = masks_.data() + tb.offset;
          for (std::size_t u = 0; u < n_uniq[g]; ++u) masks[g][u * w + j] &= mask[uniq[g][u * nf + tb.feature]];
        }
      }
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const std::uint32_t* ma = masks[0].data() + id[0][r] * w;
      const std::uint32_t* mb = masks[1].data() + id[1][r] * w;
      double a = acc[r];
      for (std::size_t j = 0; j < w; ++j) a += leaves_[trees_[t0 + j].first_leaf + std::countr_zero(ma[j] & mb[j])];
      acc[r] = a;
    }
  }
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = base_ + lr_ * acc[r];
  return out;
}

namespace {

double mean_of(std::span<const double> y, std::span<const std::uint32_t> rows) {
  double s = 0.0;
  for (auto r : rows) s += y[r];
  return s / static_cast<double>(rows.size());
}

void check_training_input(const Matrix& x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw ArgumentError("cannot train on an empty table");
  if (x.rows() != y.size()) throw ArgumentError("feature and label row counts differ");
  for (double v : y)
    if (!std::isfinite(v)) throw ArgumentError("non-finite label");
}

Hyperparams effective(const Hyperparams& hyper, std::size_t n) {
  Hyperparams h = hyper;
  if (n < 100) h.min_leaf = std::max<int>(1, static_cast<int>(n / 20));
  return h;
}

GbdtModel make_model(const Matrix& x, std::span<const double> y, const Hyperparams& h, BinMap map,
                     std::vector<std::string> names) {
  GbdtModel m;
  m.learning_rate = h.learning_rate;
  m.bin_map = std::move(map);
  m.hyper = h;
  m.n_rows = y.size();
  if (names.empty())
    for (std::size_t f = 0; f < x.cols(); ++f) names.push_back("f" + std::to_string(f));
  if (names.size() != x.cols()) throw ArgumentError("feature name count does not match columns");
  m.feature_names = std::move(names);
  double s = 0.0;
  for (double v : y) s += v;
  m.label_mean = s / static_cast<double>(y.size());
  double ss = 0.0;
  for (double v : y) ss += (v - m.label_mean) * (v - m.label_mean);
  m.label_sd = std::sqrt(ss / static_cast<double>(y.size()));
  return m;
}

void boost_into(GbdtModel& m, const BinnedMatrix& bx, std::span<const double> y, const Hyperparams& h, int rounds) {
  std::vector<std::uint32_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), 0u);
  m.base_score = mean_of(y, rows);
  std::vector<double> pred(y.size(), m.base_score), res(y.size());
  TreeLearner learner(bx, m.bin_map, h);
  for (int k = 0; k < rounds; ++k) {
    for (std::size_t i = 0; i < y.size(); ++i) res[i] = y[i] - pred[i];
    m.trees.push_back(learner.fit(rows, res));
    learner.for_each_row(m.trees.back(), [&](std::uint32_t r, double v) { pred[r] += h.learning_rate * v; });
  }
}

}  // namespace

GbdtModel boost(const Matrix& x, std::span<const double> y, const Hyperparams& hyper, int rounds,
                std::vector<std::string> feature_names) {
  hyper.validate();
  check_training_input(x, y);
  if (rounds < 0) throw ArgumentError("rounds must be non-negative");
  const auto h = effective(hyper, y.size());
  auto m = make_model(x, y, h, build_bins(x, h.max_bins), std::move(feature_names));
  const BinnedMatrix bx(x, m.bin_map);
  boost_into(m, bx, y, h, rounds);
  m.best_rounds = rounds;
  return m;
}

GbdtModel train(const Matrix& x, std::span<const double> y, const Hyperparams& hyper, std::uint64_t seed,
                std::vector<std::string> feature_names) {
  hyper.validate();
  check_training_input(x, y);
  const std::size_t n = y.size();
  const auto h = effective(hyper, n);
  auto m = make_model(x, y, h, build_bins(x, h.max_bins), std::move(feature_names));
  m.seed = seed;
  const BinnedMatrix bx(x, m.bin_map);
  const auto k = static_cast<std::size_t>(h.cv_folds);

  if (n < k) {
    boost_into(m, bx, y, h, 1);
    m.best_rounds = 1;
    return m;
  }

  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(derive_seed(seed, hash_string("cv-folds")));
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
  std::vector<int> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = static_cast<int>(i % k);

  struct Fold {
    std::vector<std::uint32_t> train, valid;
    std::vector<double> pred, res;
    double base = 0.0;
    std::unique_ptr<TreeLearner> learner;
    std::vector<Tree> trees;
  };
  std::vector<Fold> folds(k);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t f = 0; f < k; ++f) (static_cast<std::size_t>(fold_of[r]) == f ? folds[f].valid : folds[f].train).push_back(static_cast<std::uint32_t>(r));
  for (auto& f : folds) {
    f.base = mean_of(y, f.train);
    f.pred.assign(n, f.base);
    f.res.assign(n, 0.0);
    f.learner = std::make_unique<TreeLearner>(bx, m.bin_map, h);
  }

  double best = 0.0;
  int best_round = 0;
  for (int round = 1; round <= h.max_rounds; ++round) {
    double score = 0.0;
    for (auto& f : folds) {
      for (auto r : f.train) f.res[r] = y[r] - f.pred[r];
      Tree t = f.learner->fit(f.train, f.res);
      f.learner->for_each_row(t, [&](std::uint32_t r, double v) { f.pred[r] += h.learning_rate * v; });
      double se = 0.0;
      for (auto r : f.valid) {
        f.pred[r] += h.learning_rate * t.nodes[static_cast<std::size_t>(t.leaf_index(bx, r))].value;
        const double d = y[r] - f.pred[r];
        se += d * d;
      }
      score += std::sqrt(se / static_cast<double>(f.valid.size()));
      if (h.cv_ensemble) f.trees.push_back(std::move(t));
    }
    score /= static_cast<double>(k);
    m.cv_rmse.push_back(score);
    if (best_round == 0 || score < best) {
      best = score;
      best_round = round;
    }
    if (round - best_round >= h.patience) break;
  }
  m.best_rounds = best_round;

  if (h.cv_ensemble) {
    const double w = 1.0 / static_cast<double>(k);
    double base = 0.0;
    for (auto& f : folds) {
      base += f.base;
      for (int t = 0; t < best_round; ++t) {
        Tree tree = std::move(f.trees[static_cast<std::size_t>(t)]);
        for (auto& node : tree.nodes) node.value *= w;
        m.trees.push_back(std::move(tree));
      }
    }
    m.base_score = base * w;
    return m;
  }
  boost_into(m, bx, y, h, best_round);
  return m;
}

GbdtModel constant_model(double value, std::size_t n_features, std::vector<std::string> feature_names) {
  GbdtModel m;
  m.base_score = value;
  m.label_mean = value;
  std::vector<std::vector<double>> edges(n_features, std::vector<double>{0.0});
  m.bin_map = BinMap(std::move(edges));
  if (feature_names.empty())
    for (std::size_t f = 0; f < n_features; ++f) feature_names.push_back("f" + std::to_string(f));
  m.feature_names = std::move(feature_names);
  return m;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "bemlab-gbdt-model v1";

class Tokens {
 public:
  Tokens(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

  std::string_view next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) fail("unexpected end of file (truncated model)");
    const std::size_t b = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(b, pos_ - b);
  }
  void expect(std::string_view word) {
    const auto t = next();
    if (t != word) fail("expected '" + std::string(word) + "', got '" + std::string(t) + "'");
  }
  double number() {
    const auto t = next();
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("bad number '" + std::string(t) + "'");
    return v;
  }
  template <class I>
  I integer() {
    const auto t = next();
    I v{};
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("bad integer '" + std::string(t) + "'");
    return v;
  }
  std::size_t count(std::size_t limit) {
    const auto v = integer<std::size_t>();
    if (v > limit) fail("implausible count " + std::to_string(v));
    return v;
  }
  [[noreturn]] void fail(const std::string& what) const { throw LoadError(std::string(origin_) + ": " + what); }

 private:
  std::string_view text_;
  std::string_view origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const GbdtModel& m) {
  std::string s;
  s += kMagic;
  s += '\n';
  const auto& h = m.hyper;
  s += "hyper " + std::to_string(h.max_leaves) + ' ' + format_exact(h.learning_rate) + ' ' + std::to_string(h.min_leaf) +
       ' ' + format_exact(h.l2) + ' ' + std::to_string(h.max_bins) + ' ' + std::to_string(h.max_rounds) + ' ' +
       std::to_string(h.cv_folds) + ' ' + std::to_string(h.patience) + ' ' + (h.cv_ensemble ? "1" : "0") + '\n';
  s += "meta " + std::to_string(m.n_rows) + ' ' + std::to_string(m.seed) + ' ' + std::to_string(m.best_rounds) + ' ' +
       format_exact(m.label_mean) + ' ' + format_exact(m.label_sd) + '\n';
  s += "base " + format_exact(m.base_score) + ' ' + format_exact(m.learning_rate) + '\n';
  s += "features " + std::to_string(m.feature_names.size());
  for (const auto& n : m.feature_names) s += ' ' + n;
  s += '\n';
  for (std::size_t f = 0; f < m.bin_map.features(); ++f) {
    s += "bins " + std::to_string(m.bin_map.bins(f));
    for (double e : m.bin_map.edges(f)) {
      s += ' ';
      append_exact(s, e);
    }
    s += '\n';
  }
  s += "cv " + std::to_string(m.cv_rmse.size());
  for (double v : m.cv_rmse) {
    s += ' ';
    append_exact(s, v);
  }
  s += '\n';
  s += "trees " + std::to_string(m.trees.size()) + '\n';
  for (const auto& t : m.trees) {
    s += "tree " + std::to_string(t.nodes.size()) + '\n';
    for (const auto& n : t.nodes) {
      append_int(s, n.feature);
      s += ' ';
      append_int(s, n.split_bin);
      s += ' ';
      append_exact(s, n.split_value);
      s += ' ';
      append_int(s, n.left);
      s += ' ';
      append_int(s, n.right);
      s += ' ';
      append_exact(s, n.value);
      s += '\n';
    }
  }
  s += "end\n";
  return s;
}

GbdtModel deserialize(std::string_view text, std::string_view origin) {
  if (text.substr(0, kMagic.size()) != kMagic) {
    const auto eol = text.find('\n');
    throw LoadError(std::string(origin) + ": unsupported model header '" + std::string(text.substr(0, eol)) +
                    "' (expected '" + std::string(kMagic) + "')");
  }
  Tokens in(text.substr(kMagic.size()), origin);
  GbdtModel m;
  in.expect("hyper");
  auto& h = m.hyper;
  h.max_leaves = in.integer<int>();
  h.learning_rate = in.number();
  h.min_leaf = in.integer<int>();
  h.l2 = in.number();
  h.max_bins = in.integer<int>();
  h.max_rounds = in.integer<int>();
  h.cv_folds = in.integer<int>();
  h.patience = in.integer<int>();
  h.cv_ensemble = in.integer<int>() != 0;
  in.expect("meta");
  m.n_rows = in.integer<std::uint64_t>();
  m.seed = in.integer<std::uint64_t>();
  m.best_rounds = in.integer<int>();
  m.label_mean = in.number();
  m.label_sd = in.number();
  in.expect("base");
  m.base_score = in.number();
  m.learning_rate = in.number();
  in.expect("features");
  const auto nf = in.count(1u << 16);
  for (std::size_t f = 0; f < nf; ++f) m.feature_names.emplace_back(in.next());
  std::vector<std::vector<double>> edges(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    in.expect("bins");
    const auto nb = in.count(255);
    for (std::size_t b = 0; b < nb; ++b) edges[f].push_back(in.number());
  }
  try {
    m.bin_map = BinMap(std::move(edges));
  } catch (const ArgumentError& e) {
    in.fail(e.what());
  }
  in.expect("cv");
  const auto ncv = in.count(1u << 24);
  for (std::size_t i = 0; i < ncv; ++i) m.cv_rmse.push_back(in.number());
  in.expect("trees");
  const auto nt = in.count(1u << 24);
  m.trees.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    in.expect("tree");
    const auto nn = in.count(1u << 20);
    Tree tree;
    tree.nodes.resize(nn);
    for (auto& n : tree.nodes) {
      n.feature = in.integer<int>();
      n.split_bin = in.integer<int>();
      n.split_value = in.number();
      n.left = in.integer<int>();
      n.right = in.integer<int>();
      n.value = in.number();
    }
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) continue;
      if (static_cast<std::size_t>(n.feature) >= nf || n.left <= 0 || n.right <= 0 ||
          static_cast<std::size_t>(n.left) >= nn || static_cast<std::size_t>(n.right) >= nn)
        in.fail("corrupt tree node");
    }
    if (nn == 0) in.fail("empty tree");
    m.trees.push_back(std::move(tree));
  }
  in.expect("end");
  return m;
}

void save_model(const GbdtModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << serialize(model);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

GbdtModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string() + ": cannot open model file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str(), path.string());
}

}  // namespace bemlab::gbdt
