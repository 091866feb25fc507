#ifndef VRFBML_MODEL_IO_HPP
#define VRFBML_MODEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"
#include "vrfbml/gbt.hpp"
#include "vrfbml/linear_regression.hpp"
#include "vrfbml/metrics.hpp"
#include "vrfbml/svr.hpp"

namespace vrfbml {

enum class ModelKind { Lr, Svr, Gbt };

inline std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::Lr: return "lr";
    case ModelKind::Svr: return "svr";
    default: return "gbt";
    }
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "lr") return ModelKind::Lr;
    if (s == "svr") return ModelKind::Svr;
    if (s == "gbt") return ModelKind::Gbt;
    throw ValueError("unknown model kind '" + s + "' (expected lr|svr|gbt)");
}

using RegressionModel = std::variant<LinearModel, SvrModel, GbtModel>;

inline ModelKind kind_of(const RegressionModel& model) {
    if (std::holds_alternative<LinearModel>(model)) return ModelKind::Lr;
    if (std::holds_alternative<SvrModel>(model)) return ModelKind::Svr;
    return ModelKind::Gbt;
}

inline double predict(const RegressionModel& model, double time_s) {
    return std::visit(
        [time_s](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) return predict_lr(m, time_s);
            else if constexpr (std::is_same_v<T, SvrModel>) return predict_svr(m, time_s);
            else return predict_gbt(m, time_s);
        },
        model);
}

/// 64-bit FNV-1a over raw bytes; used to pin a model to the dataset it was
/// split from.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

/// How the training split was produced, so evaluation can reproduce it.
struct ModelProvenance {
    std::string dataset_hash; // fnv1a64 hex of the raw CSV bytes
    std::uint64_t split_seed = 0;
    double split_ratio = 0.75;
    SplitStrategy split_strategy = SplitStrategy::Shuffled;
    bool rebase_time = false;
};

struct LoadedModel {
    RegressionModel model;
    std::optional<ModelProvenance> provenance;
};

constexpr int kModelFormatVersion = 1;

namespace model_io_detail {

using json = nlohmann::json;

inline json to_json(const LinearModel& m) {
    return json{{"hyperparameters", json::object()},
                {"parameters", {{"slope", m.slope}, {"intercept", m.intercept}}}};
}

inline json to_json(const SvrModel& m) {
    return json{{"hyperparameters",
                 {{"c", m.c},
                  {"epsilon", m.epsilon},
                  {"gamma", m.gamma},
                  {"kernel", to_string(m.kernel)}}},
                {"parameters",
                 {{"support_x", m.support_x},
                  {"dual_coefs", m.dual_coefs},
                  {"bias", m.bias},
                  {"x_mean", m.x_mean},
                  {"x_std", m.x_std},
                  {"training",
                   {{"converged", m.training.converged},
                    {"kkt_violation", m.training.kkt_violation},
                    {"iterations", m.training.iterations}}}}}};
}

inline json tree_to_json(const RegressionTree& tree) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) {
        if (node.is_leaf()) {
            nodes.push_back(json{{"leaf", node.value}});
        } else {
            nodes.push_back(json{{"split", node.threshold}, {"left", node.left},
                                 {"right", node.right}});
        }
    }
    return json{{"nodes", nodes}};
}

inline json to_json(const GbtModel& m) {
    json trees = json::array();
    for (const auto& tree : m.trees) trees.push_back(tree_to_json(tree));
    return json{{"hyperparameters",
                 {{"learning_rate", m.learning_rate},
                  {"lambda", m.lambda},
                  {"max_depth", m.max_depth},
                  {"min_child_count", m.min_child_count},
                  {"min_split_gain", m.min_split_gain}}},
                {"parameters", {{"base_score", m.base_score}, {"trees", trees}}}};
}

inline LinearModel lr_from_json(const json& j) {
    LinearModel m;
    m.slope = j.at("parameters").at("slope").get<double>();
    m.intercept = j.at("parameters").at("intercept").get<double>();
    return m;
}

inline SvrModel svr_from_json(const json& j) {
    SvrModel m;
    const json& hyper = j.at("hyperparameters");
    m.c = hyper.at("c").get<double>();
    m.epsilon = hyper.at("epsilon").get<double>();
    m.gamma = hyper.at("gamma").get<double>();
    m.kernel = svr_kernel_from_string(hyper.at("kernel").get<std::string>());
    const json& params = j.at("parameters");
    m.support_x = params.at("support_x").get<std::vector<double>>();
    m.dual_coefs = params.at("dual_coefs").get<std::vector<double>>();
    if (m.support_x.size() != m.dual_coefs.size())
        throw DataError("svr model: support_x and dual_coefs lengths differ");
    m.bias = params.at("bias").get<double>();
    m.x_mean = params.at("x_mean").get<double>();
    m.x_std = params.at("x_std").get<double>();
    if (params.contains("training")) {
        const json& t = params.at("training");
        m.training.converged = t.at("converged").get<bool>();
        m.training.kkt_violation = t.at("kkt_violation").get<double>();
        m.training.iterations = t.at("iterations").get<std::size_t>();
    }
    return m;
}

inline RegressionTree tree_from_json(const json& j) {
    RegressionTree tree;
    for (const json& node_json : j.at("nodes")) {
        TreeNode node;
        if (node_json.contains("leaf")) {
            node.value = node_json.at("leaf").get<double>();
        } else {
            node.threshold = node_json.at("split").get<double>();
            node.left = node_json.at("left").get<int>();
            node.right = node_json.at("right").get<int>();
        }
        tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw DataError("gbt model: tree has no nodes");
    for (const auto& node : tree.nodes) {
        if (!node.is_leaf() &&
            (node.left < 0 || node.right < 0 ||
             node.left >= static_cast<int>(tree.nodes.size()) ||
             node.right >= static_cast<int>(tree.nodes.size())))
            throw DataError("gbt model: node child index out of range");
    }
    return tree;
}

inline GbtModel gbt_from_json(const json& j) {
    GbtModel m;
    const json& hyper = j.at("hyperparameters");
    m.learning_rate = hyper.at("learning_rate").get<double>();
    m.lambda = hyper.at("lambda").get<double>();
    m.max_depth = hyper.at("max_depth").get<int>();
    m.min_child_count = hyper.at("min_child_count").get<int>();
    m.min_split_gain = hyper.at("min_split_gain").get<double>();
    const json& params = j.at("parameters");
    m.base_score = params.at("base_score").get<double>();
    for (const json& tree_json : params.at("trees")) m.trees.push_back(tree_from_json(tree_json));
    return m;
}

inline json provenance_to_json(const ModelProvenance& prov) {
    return json{{"dataset_hash", prov.dataset_hash},
                {"split_seed", prov.split_seed},
                {"split_ratio", prov.split_ratio},
                {"split_strategy", to_string(prov.split_strategy)},
                {"rebase_time", prov.rebase_time}};
}

inline ModelProvenance provenance_from_json(const json& j) {
    ModelProvenance prov;
    prov.dataset_hash = j.at("dataset_hash").get<std::string>();
    prov.split_seed = j.at("split_seed").get<std::uint64_t>();
    prov.split_ratio = j.at("split_ratio").get<double>();
    prov.split_strategy = split_strategy_from_string(j.at("split_strategy").get<std::string>());
    prov.rebase_time = j.at("rebase_time").get<bool>();
    return prov;
}

} // namespace model_io_detail

/// Self-describing JSON model file with a kind tag and format version.
/// Numbers round-trip exactly.
inline void save_model(const RegressionModel& model, const std::filesystem::path& path,
                       const std::optional<ModelProvenance>& provenance = std::nullopt) {
    using model_io_detail::json;
    json body = std::visit([](const auto& m) { return model_io_detail::to_json(m); }, model);
    body["format_version"] = kModelFormatVersion;
    body["kind"] = to_string(kind_of(model));
    if (provenance) body["provenance"] = model_io_detail::provenance_to_json(*provenance);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
    file << body.dump(2) << '\n';
    if (!file) throw IoError("failed writing '" + path.string() + "'");
}

/// Load a model file; optionally require a specific kind.
inline LoadedModel load_model(const std::filesystem::path& path,
                              std::optional<ModelKind> expected_kind = std::nullopt) {
    using model_io_detail::json;
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path.string() + "' for reading");
    json body;
    try {
        body = json::parse(file);
    } catch (const json::exception& e) {
        throw DataError("corrupted model file '" + path.string() + "': " + e.what());
    }
    try {
        const int version = body.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw DataError("model file '" + path.string() + "' has format_version " +
                            std::to_string(version) + ", expected " +
                            std::to_string(kModelFormatVersion));
        const ModelKind kind = model_kind_from_string(body.at("kind").get<std::string>());
        if (expected_kind && kind != *expected_kind)
            throw DataError("model file '" + path.string() + "' holds a " + to_string(kind) +
                            " model, expected " + to_string(*expected_kind));
        LoadedModel out{LinearModel{}, std::nullopt};
        switch (kind) {
        case ModelKind::Lr: out.model = model_io_detail::lr_from_json(body); break;
        case ModelKind::Svr: out.model = model_io_detail::svr_from_json(body); break;
        case ModelKind::Gbt: out.model = model_io_detail::gbt_from_json(body); break;
        }
        if (body.contains("provenance"))
            out.provenance = model_io_detail::provenance_from_json(body.at("provenance"));
        return out;
    } catch (const json::exception& e) {
        throw DataError("corrupted model file '" + path.string() + "': " + e.what());
    }
}

/// Evaluation summary for one (model, scenario) pair. The relative percent
/// error compares the mean predicted to the mean actual temperature.
struct MetricsReport {
    double r2 = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
    double mean_actual = 0.0;
    double mean_predicted = 0.0;
    double rel_err_pct = 0.0; // signed; magnitude is std::abs(rel_err_pct)
    ScenarioMeta scenario;
    ModelKind model_kind = ModelKind::Lr;
};

inline MetricsReport evaluate(const RegressionModel& model, const TimeSeriesDataset& test) {
    if (test.empty()) throw DataError("evaluate: empty test set");
    const std::vector<double> actual = test.temperatures();
    std::vector<double> predicted;
    predicted.reserve(test.size());
    for (const auto& s : test.samples) predicted.push_back(predict(model, s.time_s));

    MetricsReport report;
    report.r2 = r2(actual, predicted);
    report.mae = mae(actual, predicted);
    report.rmse = rmse(actual, predicted);
    report.n = test.size();
    double sum_a = 0.0, sum_p = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        sum_a += actual[i];
        sum_p += predicted[i];
    }
    report.mean_actual = sum_a / static_cast<double>(actual.size());
    report.mean_predicted = sum_p / static_cast<double>(actual.size());
    report.rel_err_pct = relative_percent_error(report.mean_actual, report.mean_predicted);
    report.scenario = test.meta;
    report.model_kind = kind_of(model);
    return report;
}

} // namespace vrfbml

#endif // VRFBML_MODEL_IO_HPP
