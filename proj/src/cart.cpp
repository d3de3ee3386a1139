#include <algorithm>
#include <limits>
#include <numeric>

#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"

namespace walkcast::models {

double Tree::predict_row(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold
                                     ? n.left
                                     : n.right);
  }
  return nodes[i].value;
}

SplitChoice best_split(const num::Matrix& X, std::span<const double> y,
                       std::span<const std::size_t> idx, int min_leaf,
                       std::span<const int> feature_subset) {
  SplitChoice best;
  const std::size_t n = idx.size();
  if (n < 2 * static_cast<std::size_t>(min_leaf)) return best;

  // (value, position-in-idx) keys make the sort order total, so equal values
  // cannot reorder across platforms.
  std::vector<std::pair<double, std::size_t>> order(n);
  std::vector<double> prefix_sum(n + 1), prefix_sq(n + 1);

  for (int f : feature_subset) {
    for (std::size_t p = 0; p < n; ++p)
      order[p] = {X(idx[p], static_cast<std::size_t>(f)), p};
    std::sort(order.begin(), order.end());

    prefix_sum[0] = prefix_sq[0] = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      double yi = y[idx[order[p].second]];
      prefix_sum[p + 1] = prefix_sum[p] + yi;
      prefix_sq[p + 1] = prefix_sq[p] + yi * yi;
    }

    for (std::size_t p = 0; p + 1 < n; ++p) {
      if (order[p].first == order[p + 1].first) continue;  // not a boundary
      std::size_t k = p + 1;  // rows with value <= threshold
      if (k < static_cast<std::size_t>(min_leaf) ||
          n - k < static_cast<std::size_t>(min_leaf))
        continue;
      double sum_l = prefix_sum[k], sq_l = prefix_sq[k];
      double sum_r = prefix_sum[n] - sum_l, sq_r = prefix_sq[n] - sq_l;
      double sse = (sq_l - sum_l * sum_l / static_cast<double>(k)) +
                   (sq_r - sum_r * sum_r / static_cast<double>(n - k));
      // Strict improvement keeps the first (lowest feature, lowest threshold)
      // candidate on ties.
      if (!best.found || sse < best.sse) {
        best.found = true;
        best.feature = f;
        best.threshold = order[p].first;
        best.sse = sse;
      }
    }
  }
  return best;
}

namespace {

std::vector<int> all_features(const num::Matrix& X) {
  std::vector<int> f(X.cols());
  std::iota(f.begin(), f.end(), 0);
  return f;
}

double subset_mean(std::span<const double> y, std::span<const std::size_t> idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += y[i];
  return s / static_cast<double>(idx.size());
}

double subset_sse(std::span<const double> y, std::span<const std::size_t> idx,
                  double mean) {
  double s = 0.0;
  for (std::size_t i : idx) {
    double d = y[i] - mean;
    s += d * d;
  }
  return s;
}

struct TreeBuilder {
  const num::Matrix& X;
  std::span<const double> y;
  const GrowOptions& opts;
  Rng* rng;
  std::vector<TreeNode> nodes;

  std::int32_t build(std::vector<std::size_t>& idx, int depth) {
    double mean = subset_mean(y, idx);
    double sse = subset_sse(y, idx, idx.empty() ? 0.0 : mean);

    bool depth_ok = opts.max_depth <= 0 || depth < opts.max_depth;
    SplitChoice split;
    if (depth_ok && sse > 0.0 &&
        idx.size() >= 2 * static_cast<std::size_t>(opts.min_leaf)) {
      std::vector<int> pool = all_features(X);
      if (opts.m_features > 0) {
        // Partial Fisher-Yates over the feature list; the chosen subset is
        // sorted so tie-breaking stays lexicographic within it.
        int m = std::min<int>(opts.m_features, static_cast<int>(pool.size()));
        for (int i = 0; i < m; ++i) {
          std::size_t j = static_cast<std::size_t>(i) +
                          rng->index(pool.size() - static_cast<std::size_t>(i));
          std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        pool.resize(static_cast<std::size_t>(m));
        std::sort(pool.begin(), pool.end());
      }
      split = best_split(X, y, idx, opts.min_leaf, pool);
    }

    std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    if (!split.found || split.sse >= sse) {
      nodes[static_cast<std::size_t>(node_id)].value = mean;
      return node_id;
    }

    std::vector<std::size_t> left, right;
    left.reserve(idx.size());
    right.reserve(idx.size());
    for (std::size_t i : idx)
      (X(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right)
          .push_back(i);

    nodes[static_cast<std::size_t>(node_id)].feature = split.feature;
    nodes[static_cast<std::size_t>(node_id)].threshold = split.threshold;
    std::int32_t l = build(left, depth + 1);
    nodes[static_cast<std::size_t>(node_id)].left = l;
    std::int32_t r = build(right, depth + 1);
    nodes[static_cast<std::size_t>(node_id)].right = r;
    return node_id;
  }
};

}  // namespace

Tree grow_tree(const num::Matrix& X, std::span<const double> y,
               std::span<const std::size_t> idx, const GrowOptions& opts, Rng* rng) {
  if (idx.empty()) throw ValidationError("grow_tree: empty index set");
  if (opts.m_features > 0 && rng == nullptr)
    throw ValidationError("grow_tree: feature sampling requires an rng");
  TreeBuilder builder{X, y, opts, rng, {}};
  std::vector<std::size_t> root(idx.begin(), idx.end());
  builder.build(root, 0);
  Tree t;
  t.nodes = std::move(builder.nodes);
  return t;
}

TrainedModel fit_cart(const features::SupervisedSet& data,
                      const features::ScalerParams& scaler, int max_depth,
                      int min_leaf) {
  if (min_leaf < 1) throw ConfigError("fit_cart: min_leaf must be >= 1");
  const std::size_t n = data.X.rows();
  if (n == 0) throw ValidationError("fit_cart: empty training set");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  GrowOptions opts;
  opts.max_depth = max_depth;
  opts.min_leaf = min_leaf;
  TrainedModel model;
  model.spec.family = Family::cart;
  model.spec.hyper = {{"max_depth", static_cast<double>(max_depth)},
                      {"min_leaf", static_cast<double>(min_leaf)}};
  model.scaler = scaler;
  model.input_width = data.X.cols();
  model.params = CartParams{grow_tree(data.X, data.y, idx, opts)};
  return model;
}

}  // namespace walkcast::models
