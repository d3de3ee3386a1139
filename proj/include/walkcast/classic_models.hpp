#ifndef WALKCAST_CLASSIC_MODELS_HPP
#define WALKCAST_CLASSIC_MODELS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "walkcast/features.hpp"
#include "walkcast/numcore.hpp"
#include "walkcast/rng.hpp"

namespace walkcast::models {

enum class Family { ols, mars, cart, bagging, boosting, random_forest, ann, svr };

Family family_from_string(std::string_view name);  // accepts "rf" for random_forest
std::string family_name(Family family);

// Declarative model description. Unknown hyperparameter keys are rejected at
// fit time; all stochastic families consume the 64-bit seed through
// mt19937_64 streams derived per ensemble member.
struct ModelSpec {
  Family family = Family::ols;
  std::map<std::string, double> hyper;
  std::uint64_t seed = 0;
};

// ---- fitted parameter representations ------------------------------------

struct OlsParams {
  double intercept = 0.0;
  std::vector<double> coef;
};

// max(0, x - knot) when mirror is false, max(0, knot - x) when true.
struct HingeBasis {
  int feature = 0;
  double knot = 0.0;
  bool mirror = false;
};

struct MarsParams {
  double intercept = 0.0;
  std::vector<HingeBasis> basis;
  std::vector<double> coef;  // aligned with basis
  double gcv = 0.0;
  double train_mse = 0.0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf mean
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict_row(std::span<const double> x) const;
};

struct CartParams {
  Tree tree;
};

struct BaggingParams {
  std::vector<Tree> members;  // prediction = mean of members
};

struct BoostingParams {
  double base = 0.0;  // F0 = mean(y)
  double shrinkage = 0.1;
  std::vector<Tree> members;
};

struct AnnParams {
  num::Matrix w1;  // hidden x 5
  num::Matrix b1;  // hidden x 1
  num::Matrix w2;  // 1 x hidden
  num::Matrix b2;  // 1 x 1
};

struct SvrParams {
  std::vector<double> w;
  double b = 0.0;
};

struct TrainedModel {
  ModelSpec spec;
  features::ScalerParams scaler;
  std::size_t input_width = 0;  // columns of the design matrix seen at fit time
  std::variant<OlsParams, MarsParams, CartParams, BaggingParams, BoostingParams,
               AnnParams, SvrParams>
      params;
};

// ---- fitting --------------------------------------------------------------

// Validates hyperparameters and dispatches on spec.family.
TrainedModel fit(const ModelSpec& spec, const features::SupervisedSet& data,
                 const features::ScalerParams& scaler);

TrainedModel fit_ols(const features::SupervisedSet& data,
                     const features::ScalerParams& scaler);

TrainedModel fit_mars(const features::SupervisedSet& data,
                      const features::ScalerParams& scaler, int max_terms = 21,
                      bool prune = true);

TrainedModel fit_cart(const features::SupervisedSet& data,
                      const features::ScalerParams& scaler, int max_depth = 8,
                      int min_leaf = 5);

TrainedModel fit_bagging(const features::SupervisedSet& data,
                         const features::ScalerParams& scaler, std::uint64_t seed,
                         int n_trees = 100, int max_depth = 8, int min_leaf = 5,
                         bool identity_resample = false);

TrainedModel fit_boosting(const features::SupervisedSet& data,
                          const features::ScalerParams& scaler, int n_rounds = 100,
                          double shrinkage = 0.1, int tree_depth = 3, int min_leaf = 5);

TrainedModel fit_random_forest(const features::SupervisedSet& data,
                               const features::ScalerParams& scaler, std::uint64_t seed,
                               int n_trees = 100, int m_features = 2, int max_depth = 8,
                               int min_leaf = 5, bool identity_resample = false);

TrainedModel fit_ann(const features::SupervisedSet& data,
                     const features::ScalerParams& scaler, std::uint64_t seed,
                     int hidden = 64, int epochs = 200, int batch = 32,
                     double lr = 0.001);

TrainedModel fit_svr(const features::SupervisedSet& data,
                     const features::ScalerParams& scaler, double epsilon = 0.01,
                     double c = 1.0, int epochs = 500, double lr0 = 0.0);

// Family-specific prediction in raw index points. X must have exactly the
// column count seen at fit time (5 in the forecasting pipeline).
std::vector<double> predict(const TrainedModel& model, const num::Matrix& X);

// ---- building blocks exposed for ensembles and tests ----------------------

struct GrowOptions {
  int max_depth = 8;   // <= 0 means unlimited
  int min_leaf = 5;
  int m_features = 0;  // 0 = all features; > 0 sampled per split from rng
};

// Greedy variance-reduction growth over (feature, observed threshold) splits,
// ties broken by lowest feature index then lowest threshold. rng is consulted
// only when opts.m_features > 0.
Tree grow_tree(const num::Matrix& X, std::span<const double> y,
               std::span<const std::size_t> idx, const GrowOptions& opts,
               Rng* rng = nullptr);

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;  // SSE_left + SSE_right at the chosen split
};

SplitChoice best_split(const num::Matrix& X, std::span<const double> y,
                       std::span<const std::size_t> idx, int min_leaf,
                       std::span<const int> feature_subset);

// ANN pieces; the scaled-space forward pass and per-batch gradients are
// exposed so gradient checks can drive them directly.
struct AnnGrads {
  num::Matrix w1, b1, w2, b2;
};
double ann_forward_scaled(const AnnParams& p, std::span<const double> x);
// Accumulates d(mean squared error)/d(params) over the given rows into g
// (which must be zero-initialized to the parameter shapes); returns the loss.
double ann_batch_loss_and_grads(const AnnParams& p, const num::Matrix& X,
                                std::span<const double> y_scaled,
                                std::span<const std::size_t> rows, AnnGrads& g);

// The epsilon-insensitive objective 0.5||w||^2 + c * sum hinge, in scaled space.
double svr_objective(std::span<const double> w, double b, const num::Matrix& X,
                     std::span<const double> y_scaled, double c, double epsilon);

// MARS generalized cross-validation: mse / (1 - (p + 3k)/n)^2 with p
// regression coefficients (intercept included) and k distinct knot sites.
double mars_gcv(double mse, std::size_t n_rows, std::size_t n_coef,
                std::size_t n_knots);

// Forward-pass-only MARS fit (no pruning); used to compare GCV before and
// after the backward pass.
TrainedModel fit_mars_forward_only(const features::SupervisedSet& data,
                                   const features::ScalerParams& scaler,
                                   int max_terms = 21);

}  // namespace walkcast::models

#endif  // WALKCAST_CLASSIC_MODELS_HPP
