#include <numeric>

#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"

namespace walkcast::models {

namespace {

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(n);
  return idx;
}

std::vector<std::size_t> identity_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

TrainedModel fit_bagging(const features::SupervisedSet& data,
                         const features::ScalerParams& scaler, std::uint64_t seed,
                         int n_trees, int max_depth, int min_leaf,
                         bool identity_resample) {
  if (n_trees < 1) throw ConfigError("fit_bagging: n_trees must be >= 1");
  const std::size_t n = data.X.rows();
  if (n == 0) throw ValidationError("fit_bagging: empty training set");

  GrowOptions opts;
  opts.max_depth = max_depth;
  opts.min_leaf = min_leaf;

  BaggingParams params;
  params.members.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    // Member streams derive from (seed, member index) so concurrent and
    // sequential training produce identical ensembles.
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    auto idx = identity_resample ? identity_indices(n) : bootstrap_indices(n, rng);
    params.members.push_back(grow_tree(data.X, data.y, idx, opts));
  }

  TrainedModel model;
  model.spec.family = Family::bagging;
  model.spec.seed = seed;
  model.spec.hyper = {{"n_trees", static_cast<double>(n_trees)},
                      {"max_depth", static_cast<double>(max_depth)},
                      {"min_leaf", static_cast<double>(min_leaf)},
                      {"identity_resample", identity_resample ? 1.0 : 0.0}};
  model.scaler = scaler;
  model.input_width = data.X.cols();
  model.params = std::move(params);
  return model;
}

TrainedModel fit_random_forest(const features::SupervisedSet& data,
                               const features::ScalerParams& scaler, std::uint64_t seed,
                               int n_trees, int m_features, int max_depth, int min_leaf,
                               bool identity_resample) {
  if (n_trees < 1) throw ConfigError("fit_random_forest: n_trees must be >= 1");
  if (m_features < 1 || m_features > static_cast<int>(data.X.cols()))
    throw ConfigError("fit_random_forest: m_features must be in [1, " +
                      std::to_string(data.X.cols()) + "]");
  const std::size_t n = data.X.rows();
  if (n == 0) throw ValidationError("fit_random_forest: empty training set");

  GrowOptions opts;
  opts.max_depth = max_depth;
  opts.min_leaf = min_leaf;
  opts.m_features = m_features;

  BaggingParams params;
  params.members.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    auto idx = identity_resample ? identity_indices(n) : bootstrap_indices(n, rng);
    params.members.push_back(grow_tree(data.X, data.y, idx, opts, &rng));
  }

  TrainedModel model;
  model.spec.family = Family::random_forest;
  model.spec.seed = seed;
  model.spec.hyper = {{"n_trees", static_cast<double>(n_trees)},
                      {"m_features", static_cast<double>(m_features)},
                      {"max_depth", static_cast<double>(max_depth)},
                      {"min_leaf", static_cast<double>(min_leaf)},
                      {"identity_resample", identity_resample ? 1.0 : 0.0}};
  model.scaler = scaler;
  model.input_width = data.X.cols();
  model.params = std::move(params);
  return model;
}

TrainedModel fit_boosting(const features::SupervisedSet& data,
                          const features::ScalerParams& scaler, int n_rounds,
                          double shrinkage, int tree_depth, int min_leaf) {
  if (n_rounds < 0) throw ConfigError("fit_boosting: n_rounds must be >= 0");
  if (!(shrinkage > 0.0) || shrinkage > 1.0)
    throw ConfigError("fit_boosting: shrinkage must be in (0, 1]");
  const std::size_t n = data.X.rows();
  if (n == 0) throw ValidationError("fit_boosting: empty training set");

  BoostingParams params;
  params.shrinkage = shrinkage;
  params.base = std::accumulate(data.y.begin(), data.y.end(), 0.0) /
                static_cast<double>(n);

  GrowOptions opts;
  opts.max_depth = tree_depth;
  opts.min_leaf = min_leaf;

  auto idx = identity_indices(n);
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = data.y[i] - params.base;

  params.members.reserve(static_cast<std::size_t>(n_rounds));
  for (int round = 0; round < n_rounds; ++round) {
    Tree tree = grow_tree(data.X, residual, idx, opts);
    for (std::size_t i = 0; i < n; ++i)
      residual[i] -= shrinkage * tree.predict_row(data.X.row_span(i));
    params.members.push_back(std::move(tree));
  }

  TrainedModel model;
  model.spec.family = Family::boosting;
  model.spec.hyper = {{"n_rounds", static_cast<double>(n_rounds)},
                      {"shrinkage", shrinkage},
                      {"tree_depth", static_cast<double>(tree_depth)},
                      {"min_leaf", static_cast<double>(min_leaf)}};
  model.scaler = scaler;
  model.input_width = data.X.cols();
  model.params = std::move(params);
  return model;
}

}  // namespace walkcast::models
