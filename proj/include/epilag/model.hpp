#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "epilag/boosting.hpp"
#include "epilag/errors.hpp"
#include "epilag/forest.hpp"
#include "epilag/matrix.hpp"
#include "epilag/mlp.hpp"
#include "epilag/tree.hpp"

namespace epilag {

inline constexpr int kModelFormatVersion = 1;

struct TreeModel {
  TreeSpec spec;
  RegressionTree tree;
};

using TrainedModel = std::variant<TreeModel, RandomForest, BoostedTrees, MlpModel>;

inline std::string model_kind(const TrainedModel& model) {
  switch (model.index()) {
    case 0: return "tree";
    case 1: return "random_forest";
    case 2: return "boosted_trees";
    default: return "mlp";
  }
}

inline TargetVector predict(const TrainedModel& model, const FeatureMatrix& x) {
  return std::visit(
      [&](const auto& m) -> TargetVector {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, TreeModel>)
          return m.tree.predict(x);
        else
          return m.predict(x);
      },
      model);
}

// ---------------------------------------------------------------------------
// JSON serialization. Doubles are emitted in shortest-round-trip form, so a
// model reloaded from its JSON predicts bit-identically.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json tree_to_json(const RegressionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value},
                     {"n", n.n_samples}});
  }
  return nodes;
}

inline RegressionTree tree_from_json(const nlohmann::json& nodes, std::size_t n_features) {
  std::vector<TreeNode> out;
  out.reserve(nodes.size());
  for (const auto& jn : nodes) {
    TreeNode n;
    n.feature = jn.at("feature").get<int>();
    n.threshold = jn.at("threshold").get<double>();
    n.left = jn.at("left").get<std::int32_t>();
    n.right = jn.at("right").get<std::int32_t>();
    n.value = jn.at("value").get<double>();
    n.n_samples = jn.at("n").get<std::uint32_t>();
    out.push_back(n);
  }
  return RegressionTree::from_nodes(std::move(out), n_features);
}

}  // namespace detail

inline nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = model_kind(model);

  if (const auto* tm = std::get_if<TreeModel>(&model)) {
    j["n_features"] = tm->tree.n_features();
    j["spec"] = {{"max_depth", tm->spec.max_depth},
                 {"min_samples_leaf", tm->spec.min_samples_leaf}};
    j["nodes"] = detail::tree_to_json(tm->tree);
  } else if (const auto* fm = std::get_if<RandomForest>(&model)) {
    j["n_features"] = fm->n_features();
    j["spec"] = {{"n_estimators", fm->spec().n_estimators},
                 {"max_depth", fm->spec().max_depth},
                 {"seed", fm->spec().seed},
                 {"min_samples_leaf", fm->spec().min_samples_leaf},
                 {"bootstrap", fm->spec().bootstrap}};
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : fm->trees()) trees.push_back(detail::tree_to_json(t));
    j["trees"] = std::move(trees);
  } else if (const auto* bm = std::get_if<BoostedTrees>(&model)) {
    j["n_features"] = bm->n_features();
    j["spec"] = {{"n_estimators", bm->spec().n_estimators},
                 {"learning_rate", bm->spec().learning_rate},
                 {"max_depth", bm->spec().max_depth},
                 {"l2_lambda", bm->spec().l2_lambda},
                 {"seed", bm->spec().seed},
                 {"min_samples_leaf", bm->spec().min_samples_leaf}};
    j["base"] = bm->base();
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : bm->trees()) trees.push_back(detail::tree_to_json(t));
    j["trees"] = std::move(trees);
  } else {
    const auto& mm = std::get<MlpModel>(model);
    std::vector<std::string> acts;
    for (auto a : mm.spec.activations) acts.push_back(a == Activation::relu ? "relu" : "linear");
    j["n_features"] = mm.net.input_dim();
    j["spec"] = {{"layer_widths", mm.spec.layer_widths},
                 {"activations", acts},
                 {"epochs", mm.spec.epochs},
                 {"batch_size", mm.spec.batch_size},
                 {"learning_rate", mm.spec.learning_rate},
                 {"seed", mm.spec.seed}};
    j["parameters"] = mm.net.parameters();
    j["standardizer"] = {{"means", mm.scaler.means},
                         {"stds", mm.scaler.stds},
                         {"constant_flags", mm.scaler.constant_flags}};
  }
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw ConfigError("unsupported model format version");
  const std::string kind = j.at("kind").get<std::string>();
  const auto n_features = j.at("n_features").get<std::size_t>();
  const auto& spec = j.at("spec");

  if (kind == "tree") {
    TreeModel tm;
    tm.spec.max_depth = spec.at("max_depth").get<int>();
    tm.spec.min_samples_leaf = spec.at("min_samples_leaf").get<std::size_t>();
    tm.tree = detail::tree_from_json(j.at("nodes"), n_features);
    return tm;
  }
  if (kind == "random_forest") {
    ForestSpec fs;
    fs.n_estimators = spec.at("n_estimators").get<std::size_t>();
    fs.max_depth = spec.at("max_depth").get<int>();
    fs.seed = spec.at("seed").get<std::uint64_t>();
    fs.min_samples_leaf = spec.at("min_samples_leaf").get<std::size_t>();
    fs.bootstrap = spec.at("bootstrap").get<bool>();
    std::vector<RegressionTree> trees;
    for (const auto& jt : j.at("trees")) trees.push_back(detail::tree_from_json(jt, n_features));
    return RandomForest::assemble(fs, std::move(trees), n_features);
  }
  if (kind == "boosted_trees") {
    BoostSpec bs;
    bs.n_estimators = spec.at("n_estimators").get<std::size_t>();
    bs.learning_rate = spec.at("learning_rate").get<double>();
    bs.max_depth = spec.at("max_depth").get<int>();
    bs.l2_lambda = spec.at("l2_lambda").get<double>();
    bs.seed = spec.at("seed").get<std::uint64_t>();
    bs.min_samples_leaf = spec.at("min_samples_leaf").get<std::size_t>();
    std::vector<RegressionTree> trees;
    for (const auto& jt : j.at("trees")) trees.push_back(detail::tree_from_json(jt, n_features));
    return BoostedTrees::assemble(bs, j.at("base").get<double>(), std::move(trees), n_features);
  }
  if (kind == "mlp") {
    MlpSpec ms;
    ms.layer_widths = spec.at("layer_widths").get<std::vector<std::size_t>>();
    ms.activations.clear();
    for (const auto& a : spec.at("activations"))
      ms.activations.push_back(a.get<std::string>() == "relu" ? Activation::relu
                                                              : Activation::linear);
    ms.epochs = spec.at("epochs").get<std::size_t>();
    ms.batch_size = spec.at("batch_size").get<std::size_t>();
    ms.learning_rate = spec.at("learning_rate").get<double>();
    ms.seed = spec.at("seed").get<std::uint64_t>();
    MlpModel mm;
    mm.spec = ms;
    mm.net = Mlp(n_features, ms);
    mm.net.set_parameters(j.at("parameters").get<std::vector<double>>());
    mm.scaler.means = j.at("standardizer").at("means").get<std::vector<double>>();
    mm.scaler.stds = j.at("standardizer").at("stds").get<std::vector<double>>();
    mm.scaler.constant_flags =
        j.at("standardizer").at("constant_flags").get<std::vector<std::uint8_t>>();
    return mm;
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

}  // namespace epilag
