#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "flpxr/error.hpp"
#include "flpxr/gbdt.hpp"
#include "flpxr/threading.hpp"

namespace flpxr {

namespace {

// Binned feature codes, column-major. For a feature with T thresholds the
// real value codes are 0..T (code k: value <= thresholds[k], code T:
// above all thresholds); missing values get code T + 1.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> codes;           // cols * rows
  std::vector<std::uint16_t> bins_per_feature;  // T + 2 per feature

  const std::uint16_t* column(std::size_t f) const {
    return codes.data() + f * rows;
  }
};

BinnedMatrix bin_matrix(const DataMatrix& m, const BinSchema& schema) {
  BinnedMatrix b;
  b.rows = m.rows;
  b.cols = m.cols;
  b.codes.resize(m.rows * m.cols);
  b.bins_per_feature.resize(m.cols);
  for (std::size_t f = 0; f < m.cols; ++f) {
    const auto& th = schema.thresholds[f];
    b.bins_per_feature[f] = static_cast<std::uint16_t>(th.size() + 2);
    std::uint16_t* col = b.codes.data() + f * m.rows;
    const std::uint16_t missing_code = static_cast<std::uint16_t>(th.size() + 1);
    for (std::size_t r = 0; r < m.rows; ++r) {
      const double v = m.at(r, f);
      if (std::isnan(v)) {
        col[r] = missing_code;
      } else {
        col[r] = static_cast<std::uint16_t>(
            std::lower_bound(th.begin(), th.end(), v) - th.begin());
      }
    }
  }
  return b;
}

struct HistBin {
  double g = 0.0;
  std::uint32_t c = 0;  // hessian sum == count (squared-error loss)
};

struct SplitChoice {
  bool found = false;
  int feature = -1;
  int bin = -1;  // split at thresholds[bin]
  bool missing_left = true;
  double gain = 0.0;
};

struct NodeRange {
  std::int32_t node_id = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  double grad_sum = 0.0;
  int depth = 0;
};

class TreeGrower {
 public:
  TreeGrower(const BinnedMatrix& binned, const BinSchema& schema,
             const GbdtParams& params)
      : binned_(binned), schema_(schema), params_(params) {}

  // Grows one tree on gradients g, permuting row_order so every leaf owns
  // a contiguous range, and adds learning_rate-scaled leaf values to the
  // predictions of the rows it covers.
  Tree grow(std::span<const double> g, std::vector<std::uint32_t>& row_order,
            std::vector<double>& preds) const {
    Tree tree;
    tree.nodes.emplace_back();

    double root_g = 0.0;
    for (std::uint32_t r : row_order) root_g += g[r];

    std::vector<NodeRange> level;
    level.push_back(NodeRange{0, 0, static_cast<std::uint32_t>(row_order.size()),
                              root_g, 0});

    std::vector<std::uint32_t> scratch_left, scratch_right;
    while (!level.empty()) {
      std::vector<SplitChoice> choices(level.size());
      const bool can_split_depth = level.front().depth < params_.max_depth;
      if (can_split_depth) {
        if (level.size() == 1) {
          choices[0] = best_split_parallel_features(level[0], g, row_order);
        } else {
          parallel_for(level.size(), [&](std::size_t i) {
            choices[i] = best_split(level[i], g, row_order);
          });
        }
      }

      std::vector<NodeRange> next;
      for (std::size_t i = 0; i < level.size(); ++i) {
        const NodeRange& nr = level[i];
        const SplitChoice& ch = choices[i];
        const std::uint32_t count = nr.end - nr.begin;
        if (!can_split_depth || !ch.found) {
          TreeNode& node = tree.nodes[static_cast<std::size_t>(nr.node_id)];
          node.is_leaf = true;
          node.value = count == 0
                           ? 0.0
                           : -nr.grad_sum / (count + params_.lambda);
          const double step = params_.learning_rate * node.value;
          for (std::uint32_t idx = nr.begin; idx < nr.end; ++idx) {
            preds[row_order[idx]] += step;
          }
          continue;
        }

        // Partition rows (stable: ascending order kept on both sides).
        scratch_left.clear();
        scratch_right.clear();
        const std::uint16_t* col =
            binned_.column(static_cast<std::size_t>(ch.feature));
        const std::uint16_t missing_code = static_cast<std::uint16_t>(
            schema_.thresholds[static_cast<std::size_t>(ch.feature)].size() + 1);
        double left_g = 0.0, right_g = 0.0;
        for (std::uint32_t idx = nr.begin; idx < nr.end; ++idx) {
          const std::uint32_t r = row_order[idx];
          const std::uint16_t code = col[r];
          const bool to_left = code == missing_code
                                   ? ch.missing_left
                                   : code <= static_cast<std::uint16_t>(ch.bin);
          if (to_left) {
            scratch_left.push_back(r);
            left_g += g[r];
          } else {
            scratch_right.push_back(r);
            right_g += g[r];
          }
        }
        std::copy(scratch_left.begin(), scratch_left.end(),
                  row_order.begin() + nr.begin);
        std::copy(scratch_right.begin(), scratch_right.end(),
                  row_order.begin() + nr.begin + scratch_left.size());

        const std::int32_t left_id = static_cast<std::int32_t>(tree.nodes.size());
        const std::int32_t right_id = left_id + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& node = tree.nodes[static_cast<std::size_t>(nr.node_id)];
        node.is_leaf = false;
        node.feature = ch.feature;
        node.threshold = schema_.thresholds[static_cast<std::size_t>(ch.feature)]
                                           [static_cast<std::size_t>(ch.bin)];
        node.default_left = ch.missing_left;
        node.left = left_id;
        node.right = right_id;

        const std::uint32_t mid =
            nr.begin + static_cast<std::uint32_t>(scratch_left.size());
        next.push_back(NodeRange{left_id, nr.begin, mid, left_g, nr.depth + 1});
        next.push_back(NodeRange{right_id, mid, nr.end, right_g, nr.depth + 1});
      }
      level = std::move(next);
    }
    return tree;
  }

 private:
  // Scans one feature's histogram for the best (threshold, missing
  // direction) candidate; `best` is updated with a strictly-greater gain
  // rule so earlier candidates win ties.
  void scan_feature(const NodeRange& nr, int feature,
                    const std::vector<HistBin>& hist, SplitChoice& best) const {
    const auto& th = schema_.thresholds[static_cast<std::size_t>(feature)];
    if (th.empty()) return;
    const std::size_t t_count = th.size();
    const HistBin& miss = hist[t_count + 1];
    const double g_total = nr.grad_sum;
    const double h_total = static_cast<double>(nr.end - nr.begin);
    const double parent_term =
        g_total * g_total / (h_total + params_.lambda);

    const std::uint32_t count_total = nr.end - nr.begin;
    double gl_cum = 0.0;
    std::uint32_t cl_cum = 0;
    for (std::size_t k = 0; k < t_count; ++k) {
      gl_cum += hist[k].g;
      cl_cum += hist[k].c;
      for (const bool missing_left : {true, false}) {
        const std::uint32_t cl = missing_left ? cl_cum + miss.c : cl_cum;
        // An empty child can never improve the loss; skipping it also
        // avoids 0/0 when lambda and min_child_weight are both zero.
        if (cl == 0 || cl == count_total) continue;
        const double gl = missing_left ? gl_cum + miss.g : gl_cum;
        const double hl = static_cast<double>(cl);
        const double gr = g_total - gl;
        const double hr = h_total - hl;
        if (hl < params_.min_child_weight || hr < params_.min_child_weight) {
          continue;
        }
        const double gain =
            0.5 * (gl * gl / (hl + params_.lambda) +
                   gr * gr / (hr + params_.lambda) - parent_term) -
            params_.gamma;
        if (gain > best.gain) {
          best.found = true;
          best.feature = feature;
          best.bin = static_cast<int>(k);
          best.missing_left = missing_left;
          best.gain = gain;
        }
      }
    }
  }

  void build_hist(const NodeRange& nr, int feature, std::span<const double> g,
                  const std::vector<std::uint32_t>& row_order,
                  std::vector<HistBin>& hist) const {
    const std::size_t f = static_cast<std::size_t>(feature);
    hist.assign(binned_.bins_per_feature[f], HistBin{});
    const std::uint16_t* col = binned_.column(f);
    for (std::uint32_t idx = nr.begin; idx < nr.end; ++idx) {
      const std::uint32_t r = row_order[idx];
      HistBin& hb = hist[col[r]];
      hb.g += g[r];
      ++hb.c;
    }
  }

  SplitChoice best_split(const NodeRange& nr, std::span<const double> g,
                         const std::vector<std::uint32_t>& row_order) const {
    SplitChoice best;
    std::vector<HistBin> hist;
    for (std::size_t f = 0; f < binned_.cols; ++f) {
      if (schema_.thresholds[f].empty()) continue;
      build_hist(nr, static_cast<int>(f), g, row_order, hist);
      scan_feature(nr, static_cast<int>(f), hist, best);
    }
    return best;
  }

  // Root-level variant: histograms built concurrently per feature, then
  // reduced in ascending feature order so the choice is identical to the
  // sequential scan.
  SplitChoice best_split_parallel_features(
      const NodeRange& nr, std::span<const double> g,
      const std::vector<std::uint32_t>& row_order) const {
    std::vector<SplitChoice> per_feature(binned_.cols);
    parallel_for(binned_.cols, [&](std::size_t f) {
      if (schema_.thresholds[f].empty()) return;
      std::vector<HistBin> hist;
      build_hist(nr, static_cast<int>(f), g, row_order, hist);
      scan_feature(nr, static_cast<int>(f), hist, per_feature[f]);
    });
    SplitChoice best;
    for (const SplitChoice& ch : per_feature) {
      if (ch.found && ch.gain > best.gain) best = ch;
    }
    return best;
  }

  const BinnedMatrix& binned_;
  const BinSchema& schema_;
  const GbdtParams& params_;
};

}  // namespace

Ensemble fit_ensemble(const DataMatrix& x, std::span<const double> y,
                      const GbdtParams& params,
                      std::vector<double>* mse_per_round) {
  params.validate();
  if (x.rows == 0) throw InvalidInput("fit: no training examples");
  if (y.size() != x.rows) throw InvalidInput("fit: target size mismatch");
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidInput("fit: non-finite target");
  }

  Ensemble ensemble;
  double sum = 0.0;
  for (double v : y) sum += v;
  ensemble.base_score = sum / static_cast<double>(x.rows);
  if (params.n_estimators == 0) return ensemble;

  const BinSchema schema = build_bins(x, params.n_bins);
  const BinnedMatrix binned = bin_matrix(x, schema);
  const TreeGrower grower(binned, schema, params);

  const std::size_t n = x.rows;
  std::vector<double> preds(n, ensemble.base_score);
  std::vector<double> grad(n);
  std::vector<std::uint32_t> row_order(n);

  ensemble.trees.reserve(static_cast<std::size_t>(params.n_estimators));
  for (int round = 0; round < params.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = preds[i] - y[i];
    std::iota(row_order.begin(), row_order.end(), 0u);
    ensemble.trees.push_back(grower.grow(grad, row_order, preds));
    if (mse_per_round) {
      double se = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = preds[i] - y[i];
        se += d * d;
      }
      mse_per_round->push_back(se / static_cast<double>(n));
    }
  }
  return ensemble;
}

GbdtModel fit(const std::vector<TrainingExample>& examples,
              const GbdtParams& params, const CategoryEncoder& encoder,
              std::int64_t rate_s, const HorizonSet& horizons,
              TrainInfo* info) {
  params.validate();
  horizons.validate();
  if (examples.empty()) {
    throw InsufficientDataError("fit: empty training set");
  }

  const auto t_start = std::chrono::steady_clock::now();
  const DataMatrix x = to_matrix(examples);
  std::vector<double> y_lon(examples.size());
  std::vector<double> y_lat(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    y_lon[i] = examples[i].target_dlon;
    y_lat[i] = examples[i].target_dlat;
  }

  GbdtModel model;
  model.params = params;
  model.lon = fit_ensemble(x, y_lon, params, info ? &info->mse_lon : nullptr);
  model.lat = fit_ensemble(x, y_lat, params, info ? &info->mse_lat : nullptr);
  model.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  model.encoder = encoder;
  model.rate_s = rate_s;
  model.horizons = horizons.minutes;
  if (info) {
    info->train_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t_start)
                              .count();
  }
  return model;
}

}  // namespace flpxr
