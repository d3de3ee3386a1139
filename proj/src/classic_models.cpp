#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"

namespace walkcast::models {

Family family_from_string(std::string_view name) {
  if (name == "ols") return Family::ols;
  if (name == "mars") return Family::mars;
  if (name == "cart") return Family::cart;
  if (name == "bagging") return Family::bagging;
  if (name == "boosting") return Family::boosting;
  if (name == "random_forest" || name == "rf") return Family::random_forest;
  if (name == "ann") return Family::ann;
  if (name == "svr") return Family::svr;
  throw ConfigError("unknown model family: " + std::string(name));
}

std::string family_name(Family family) {
  switch (family) {
    case Family::ols: return "ols";
    case Family::mars: return "mars";
    case Family::cart: return "cart";
    case Family::bagging: return "bagging";
    case Family::boosting: return "boosting";
    case Family::random_forest: return "random_forest";
    case Family::ann: return "ann";
    case Family::svr: return "svr";
  }
  throw ConfigError("unknown model family value");
}

namespace {

// Reads a family's hyperparameter map, rejecting keys outside the documented
// set up front so typos fail loudly instead of silently using defaults.
class HyperReader {
 public:
  HyperReader(const ModelSpec& spec, std::initializer_list<const char*> known)
      : hyper_(spec.hyper) {
    for (const auto& [key, value] : hyper_) {
      (void)value;
      if (std::find_if(known.begin(), known.end(), [&](const char* k) {
            return key == k;
          }) == known.end())
        throw ConfigError("fit " + family_name(spec.family) +
                          ": unknown hyperparameter '" + key + "'");
    }
  }

  double real(const char* key, double fallback) const {
    auto it = hyper_.find(key);
    return it == hyper_.end() ? fallback : it->second;
  }

  int integer(const char* key, int fallback) const {
    auto it = hyper_.find(key);
    if (it == hyper_.end()) return fallback;
    const double v = it->second;
    if (std::floor(v) != v || std::abs(v) > 1e9)
      throw ConfigError(std::string("fit: hyperparameter '") + key +
                        "' must be an integer");
    return static_cast<int>(v);
  }

  bool flag(const char* key, bool fallback) const {
    return real(key, fallback ? 1.0 : 0.0) != 0.0;
  }

 private:
  const std::map<std::string, double>& hyper_;
};

}  // namespace

TrainedModel fit(const ModelSpec& spec, const features::SupervisedSet& data,
                 const features::ScalerParams& scaler) {
  switch (spec.family) {
    case Family::ols: {
      HyperReader h(spec, {});
      return fit_ols(data, scaler);
    }
    case Family::mars: {
      HyperReader h(spec, {"max_terms", "prune"});
      return fit_mars(data, scaler, h.integer("max_terms", 21), h.flag("prune", true));
    }
    case Family::cart: {
      HyperReader h(spec, {"max_depth", "min_leaf"});
      return fit_cart(data, scaler, h.integer("max_depth", 8), h.integer("min_leaf", 5));
    }
    case Family::bagging: {
      HyperReader h(spec, {"n_trees", "max_depth", "min_leaf", "identity_resample"});
      return fit_bagging(data, scaler, spec.seed, h.integer("n_trees", 100),
                         h.integer("max_depth", 8), h.integer("min_leaf", 5),
                         h.flag("identity_resample", false));
    }
    case Family::boosting: {
      HyperReader h(spec, {"n_rounds", "shrinkage", "tree_depth", "min_leaf"});
      return fit_boosting(data, scaler, h.integer("n_rounds", 100),
                          h.real("shrinkage", 0.1), h.integer("tree_depth", 3),
                          h.integer("min_leaf", 5));
    }
    case Family::random_forest: {
      HyperReader h(spec,
                    {"n_trees", "m_features", "max_depth", "min_leaf",
                     "identity_resample"});
      return fit_random_forest(data, scaler, spec.seed, h.integer("n_trees", 100),
                               h.integer("m_features", 2), h.integer("max_depth", 8),
                               h.integer("min_leaf", 5),
                               h.flag("identity_resample", false));
    }
    case Family::ann: {
      HyperReader h(spec, {"hidden", "epochs", "batch", "lr"});
      return fit_ann(data, scaler, spec.seed, h.integer("hidden", 64),
                     h.integer("epochs", 200), h.integer("batch", 32),
                     h.real("lr", 0.001));
    }
    case Family::svr: {
      HyperReader h(spec, {"epsilon", "c", "epochs", "lr0"});
      return fit_svr(data, scaler, h.real("epsilon", 0.01), h.real("c", 1.0),
                     h.integer("epochs", 500), h.real("lr0", 0.0));
    }
  }
  throw ConfigError("fit: unknown model family value");
}

namespace {

double hinge_value(const HingeBasis& basis, std::span<const double> x) {
  const double v = x[static_cast<std::size_t>(basis.feature)];
  return basis.mirror ? std::max(0.0, basis.knot - v) : std::max(0.0, v - basis.knot);
}

struct RowPredictor {
  std::span<const double> x;
  const features::ScalerParams& scaler;

  double operator()(const OlsParams& p) const {
    double out = p.intercept;
    for (std::size_t j = 0; j < p.coef.size(); ++j) out += p.coef[j] * x[j];
    return out;
  }
  double operator()(const MarsParams& p) const {
    double out = p.intercept;
    for (std::size_t k = 0; k < p.basis.size(); ++k)
      out += p.coef[k] * hinge_value(p.basis[k], x);
    return out;
  }
  double operator()(const CartParams& p) const { return p.tree.predict_row(x); }
  double operator()(const BaggingParams& p) const {
    double sum = 0.0;
    for (const Tree& tree : p.members) sum += tree.predict_row(x);
    return sum / static_cast<double>(p.members.size());
  }
  double operator()(const BoostingParams& p) const {
    double out = p.base;
    for (const Tree& tree : p.members) out += p.shrinkage * tree.predict_row(x);
    return out;
  }
  double operator()(const AnnParams& p) const {
    return features::invert_open_scale(ann_forward_scaled(p, x), scaler);
  }
  double operator()(const SvrParams& p) const {
    double out = p.b;
    for (std::size_t j = 0; j < p.w.size(); ++j) out += p.w[j] * x[j];
    return features::invert_open_scale(out, scaler);
  }
};

}  // namespace

std::vector<double> predict(const TrainedModel& model, const num::Matrix& X) {
  if (X.cols() != model.input_width)
    throw ValidationError("predict: column-count mismatch: model was fit on " +
                          std::to_string(model.input_width) + " features, got " +
                          std::to_string(X.cols()));
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i)
    out[i] = std::visit(RowPredictor{X.row_span(i), model.scaler}, model.params);
  return out;
}

}  // namespace walkcast::models
