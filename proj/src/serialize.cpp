#include <json.hpp>

#include "walkcast/errors.hpp"
#include "walkcast/serialize.hpp"

namespace walkcast::serialize {

namespace {

using nlohmann::ordered_json;

ordered_json matrix_to_json(const num::Matrix& m) {
  return ordered_json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

num::Matrix matrix_from_json(const ordered_json& j) {
  num::Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto& data = j.at("data");
  if (data.size() != m.size())
    throw ValidationError("model: tensor data length does not match its shape");
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = data[i].get<double>();
  return m;
}

ordered_json extrema_to_json(const features::ScalerParams::Extrema& e) {
  return ordered_json{{"min", e.min}, {"max", e.max}};
}

features::ScalerParams::Extrema extrema_from_json(const ordered_json& j) {
  return {j.at("min").get<double>(), j.at("max").get<double>()};
}

ordered_json scaler_to_json(const features::ScalerParams& s) {
  return ordered_json{{"open", extrema_to_json(s.open)},
                      {"high", extrema_to_json(s.high)},
                      {"low", extrema_to_json(s.low)},
                      {"close", extrema_to_json(s.close)},
                      {"volume", extrema_to_json(s.volume)},
                      {"range", extrema_to_json(s.range)}};
}

features::ScalerParams scaler_from_json(const ordered_json& j) {
  features::ScalerParams s;
  s.open = extrema_from_json(j.at("open"));
  s.high = extrema_from_json(j.at("high"));
  s.low = extrema_from_json(j.at("low"));
  s.close = extrema_from_json(j.at("close"));
  s.volume = extrema_from_json(j.at("volume"));
  s.range = extrema_from_json(j.at("range"));
  return s;
}

ordered_json tree_to_json(const models::Tree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back(ordered_json{{"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right},
                                 {"value", n.value}});
  return ordered_json{{"nodes", std::move(nodes)}};
}

models::Tree tree_from_json(const ordered_json& j) {
  models::Tree tree;
  for (const auto& entry : j.at("nodes")) {
    models::TreeNode n;
    n.feature = entry.at("feature").get<int>();
    n.threshold = entry.at("threshold").get<double>();
    n.left = entry.at("left").get<std::int32_t>();
    n.right = entry.at("right").get<std::int32_t>();
    n.value = entry.at("value").get<double>();
    tree.nodes.push_back(n);
  }
  return tree;
}

ordered_json trees_to_json(const std::vector<models::Tree>& trees) {
  ordered_json out = ordered_json::array();
  for (const auto& tree : trees) out.push_back(tree_to_json(tree));
  return out;
}

std::vector<models::Tree> trees_from_json(const ordered_json& j) {
  std::vector<models::Tree> trees;
  for (const auto& entry : j) trees.push_back(tree_from_json(entry));
  return trees;
}

struct ParamsToJson {
  ordered_json operator()(const models::OlsParams& p) const {
    return ordered_json{{"intercept", p.intercept}, {"coef", p.coef}};
  }
  ordered_json operator()(const models::MarsParams& p) const {
    ordered_json basis = ordered_json::array();
    for (const auto& b : p.basis)
      basis.push_back(ordered_json{
          {"feature", b.feature}, {"knot", b.knot}, {"mirror", b.mirror}});
    return ordered_json{{"intercept", p.intercept},
                        {"basis", std::move(basis)},
                        {"coef", p.coef},
                        {"gcv", p.gcv},
                        {"train_mse", p.train_mse}};
  }
  ordered_json operator()(const models::CartParams& p) const {
    return ordered_json{{"tree", tree_to_json(p.tree)}};
  }
  ordered_json operator()(const models::BaggingParams& p) const {
    return ordered_json{{"members", trees_to_json(p.members)}};
  }
  ordered_json operator()(const models::BoostingParams& p) const {
    return ordered_json{{"base", p.base},
                        {"shrinkage", p.shrinkage},
                        {"members", trees_to_json(p.members)}};
  }
  ordered_json operator()(const models::AnnParams& p) const {
    return ordered_json{{"w1", matrix_to_json(p.w1)},
                        {"b1", matrix_to_json(p.b1)},
                        {"w2", matrix_to_json(p.w2)},
                        {"b2", matrix_to_json(p.b2)}};
  }
  ordered_json operator()(const models::SvrParams& p) const {
    return ordered_json{{"w", p.w}, {"b", p.b}};
  }
};

ordered_json parse_envelope(const std::string& text) {
  const ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("model: malformed JSON");
  int version = 0;
  try {
    version = j.at("schema_version").get<int>();
  } catch (const ordered_json::exception& err) {
    throw ValidationError(std::string("model: ") + err.what());
  }
  if (version != kModelSchemaVersion)
    throw ConfigError("model: unsupported schema_version " +
                      std::to_string(version));
  return j;
}

// Family and architecture tags index different document kinds, so a foreign
// tag is a structural problem, not a configuration one.
template <class Parse>
auto parse_tag(const ordered_json& j, const char* key, Parse parse) {
  try {
    return parse(j.at(key).template get<std::string>());
  } catch (const ordered_json::exception& err) {
    throw ValidationError(std::string("model: ") + err.what());
  } catch (const ConfigError& err) {
    throw ValidationError(std::string("model: ") + err.what());
  }
}

std::string act_name(num::Act act) {
  switch (act) {
    case num::Act::relu: return "relu";
    case num::Act::sigmoid: return "sigmoid";
    case num::Act::tanh: return "tanh";
    case num::Act::identity: return "identity";
  }
  throw ValidationError("model: unknown activation value");
}

num::Act act_from_name(std::string_view name) {
  if (name == "relu") return num::Act::relu;
  if (name == "sigmoid") return num::Act::sigmoid;
  if (name == "tanh") return num::Act::tanh;
  if (name == "identity") return num::Act::identity;
  throw ValidationError("model: unknown activation '" + std::string(name) + "'");
}

}  // namespace

// ---- classical models --------------------------------------------------------

std::string to_json(const models::TrainedModel& model) {
  ordered_json j{{"schema_version", kModelSchemaVersion},
                 {"family", models::family_name(model.spec.family)},
                 {"hyperparameters", model.spec.hyper},
                 {"seed", model.spec.seed},
                 {"input_width", model.input_width},
                 {"scaler", scaler_to_json(model.scaler)},
                 {"parameters", std::visit(ParamsToJson{}, model.params)}};
  return j.dump(2) + "\n";
}

models::TrainedModel classic_from_json(const std::string& text) {
  const ordered_json j = parse_envelope(text);
  models::TrainedModel model;
  model.spec.family = parse_tag(j, "family", [](const std::string& name) {
    return models::family_from_string(name);
  });
  try {
    for (const auto& [key, value] : j.at("hyperparameters").items())
      model.spec.hyper[key] = value.get<double>();
    model.spec.seed = j.at("seed").get<std::uint64_t>();
    model.input_width = j.at("input_width").get<std::size_t>();
    model.scaler = scaler_from_json(j.at("scaler"));

    const auto& p = j.at("parameters");
    switch (model.spec.family) {
      case models::Family::ols: {
        models::OlsParams params;
        params.intercept = p.at("intercept").get<double>();
        params.coef = p.at("coef").get<std::vector<double>>();
        model.params = std::move(params);
        break;
      }
      case models::Family::mars: {
        models::MarsParams params;
        params.intercept = p.at("intercept").get<double>();
        for (const auto& entry : p.at("basis")) {
          models::HingeBasis b;
          b.feature = entry.at("feature").get<int>();
          b.knot = entry.at("knot").get<double>();
          b.mirror = entry.at("mirror").get<bool>();
          params.basis.push_back(b);
        }
        params.coef = p.at("coef").get<std::vector<double>>();
        params.gcv = p.at("gcv").get<double>();
        params.train_mse = p.at("train_mse").get<double>();
        model.params = std::move(params);
        break;
      }
      case models::Family::cart:
        model.params = models::CartParams{tree_from_json(p.at("tree"))};
        break;
      case models::Family::bagging:
      case models::Family::random_forest: {
        models::BaggingParams params;
        params.members = trees_from_json(p.at("members"));
        model.params = std::move(params);
        break;
      }
      case models::Family::boosting: {
        models::BoostingParams params;
        params.base = p.at("base").get<double>();
        params.shrinkage = p.at("shrinkage").get<double>();
        params.members = trees_from_json(p.at("members"));
        model.params = std::move(params);
        break;
      }
      case models::Family::ann: {
        models::AnnParams params;
        params.w1 = matrix_from_json(p.at("w1"));
        params.b1 = matrix_from_json(p.at("b1"));
        params.w2 = matrix_from_json(p.at("w2"));
        params.b2 = matrix_from_json(p.at("b2"));
        model.params = std::move(params);
        break;
      }
      case models::Family::svr: {
        models::SvrParams params;
        params.w = p.at("w").get<std::vector<double>>();
        params.b = p.at("b").get<double>();
        model.params = std::move(params);
        break;
      }
    }
    return model;
  } catch (const ordered_json::exception& err) {
    throw ValidationError(std::string("model: ") + err.what());
  }
}

// ---- lstm models ---------------------------------------------------------------

std::string to_json(const lstm::TrainedLstm& model) {
  ordered_json layers = ordered_json::array();
  for (const auto& layer : model.net.layers) {
    if (const auto* rec = dynamic_cast<const lstm::LstmLayer*>(layer.get())) {
      layers.push_back(ordered_json{{"kind", "lstm"},
                                    {"input_dim", rec->input_dim},
                                    {"units", rec->units},
                                    {"return_sequences", rec->return_sequences},
                                    {"act", act_name(rec->act)},
                                    {"wi", matrix_to_json(rec->w.wi)},
                                    {"ui", matrix_to_json(rec->w.ui)},
                                    {"bi", matrix_to_json(rec->w.bi)},
                                    {"wf", matrix_to_json(rec->w.wf)},
                                    {"uf", matrix_to_json(rec->w.uf)},
                                    {"bf", matrix_to_json(rec->w.bf)},
                                    {"wg", matrix_to_json(rec->w.wg)},
                                    {"ug", matrix_to_json(rec->w.ug)},
                                    {"bg", matrix_to_json(rec->w.bg)},
                                    {"wo", matrix_to_json(rec->w.wo)},
                                    {"uo", matrix_to_json(rec->w.uo)},
                                    {"bo", matrix_to_json(rec->w.bo)}});
    } else if (const auto* dense = dynamic_cast<const lstm::DenseLayer*>(layer.get())) {
      layers.push_back(ordered_json{{"kind", "dense"},
                                    {"act", act_name(dense->act)},
                                    {"w", matrix_to_json(dense->w)},
                                    {"b", matrix_to_json(dense->b)}});
    } else {
      layers.push_back(ordered_json{{"kind", layer->kind()}});
    }
  }

  ordered_json j{{"schema_version", kModelSchemaVersion},
                 {"family", lstm::arch_name(model.arch.id)},
                 {"architecture",
                  ordered_json{{"input_steps", model.arch.input_steps},
                               {"input_features", model.arch.input_features},
                               {"lstm_units", model.arch.lstm_units},
                               {"dense_units", model.arch.dense_units},
                               {"encoder_decoder", model.arch.encoder_decoder}}},
                 {"scaler", scaler_to_json(model.scaler)},
                 {"layers", std::move(layers)},
                 {"train_loss", model.train_loss},
                 {"val_loss", model.val_loss}};
  return j.dump(2) + "\n";
}

lstm::TrainedLstm lstm_from_json(const std::string& text) {
  const ordered_json j = parse_envelope(text);
  const auto id = parse_tag(j, "family", [](const std::string& name) {
    return lstm::arch_from_string(name);
  });
  try {
    const auto& arch_json = j.at("architecture");
    auto arch = lstm::make_architecture(id, arch_json.at("lstm_units").get<int>(),
                                        arch_json.at("dense_units").get<int>());
    if (arch.input_steps != arch_json.at("input_steps").get<int>() ||
        arch.input_features != arch_json.at("input_features").get<int>() ||
        arch.encoder_decoder != arch_json.at("encoder_decoder").get<bool>())
      throw ValidationError("model: architecture descriptor is inconsistent with " +
                            lstm::arch_name(id));

    lstm::TrainedLstm model;
    model.arch = arch;
    model.net = lstm::build_network(arch);
    model.scaler = scaler_from_json(j.at("scaler"));
    model.train_loss = j.at("train_loss").get<std::vector<double>>();
    model.val_loss = j.at("val_loss").get<std::vector<double>>();

    const auto& layers = j.at("layers");
    if (layers.size() != model.net.layers.size())
      throw ValidationError("model: layer count does not match the architecture");
    for (std::size_t i = 0; i < model.net.layers.size(); ++i) {
      const auto& entry = layers[i];
      lstm::Layer* layer = model.net.layers[i].get();
      if (entry.at("kind").get<std::string>() != layer->kind())
        throw ValidationError("model: layer " + std::to_string(i) +
                              " kind does not match the architecture");
      if (auto* rec = dynamic_cast<lstm::LstmLayer*>(layer)) {
        rec->act = act_from_name(entry.at("act").get<std::string>());
        rec->w.wi = matrix_from_json(entry.at("wi"));
        rec->w.ui = matrix_from_json(entry.at("ui"));
        rec->w.bi = matrix_from_json(entry.at("bi"));
        rec->w.wf = matrix_from_json(entry.at("wf"));
        rec->w.uf = matrix_from_json(entry.at("uf"));
        rec->w.bf = matrix_from_json(entry.at("bf"));
        rec->w.wg = matrix_from_json(entry.at("wg"));
        rec->w.ug = matrix_from_json(entry.at("ug"));
        rec->w.bg = matrix_from_json(entry.at("bg"));
        rec->w.wo = matrix_from_json(entry.at("wo"));
        rec->w.uo = matrix_from_json(entry.at("uo"));
        rec->w.bo = matrix_from_json(entry.at("bo"));
      } else if (auto* dense = dynamic_cast<lstm::DenseLayer*>(layer)) {
        dense->act = act_from_name(entry.at("act").get<std::string>());
        dense->w = matrix_from_json(entry.at("w"));
        dense->b = matrix_from_json(entry.at("b"));
      }
    }
    return model;
  } catch (const ordered_json::exception& err) {
    throw ValidationError(std::string("model: ") + err.what());
  }
}

}  // namespace walkcast::serialize
