#include "retiomics/models.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace retiomics::models {

namespace {
const std::vector<std::string> kKindNames = {"LR", "LDA", "SVC-linear", "SVC-rbf", "RF"};

void check_finite(const Matrix& X) {
    for (double v : X.data) {
        if (!std::isfinite(v)) throw TrainError("training matrix contains non-finite values");
    }
}

void check_two_classes(std::span<const int> y) {
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v == 0) has0 = true;
        else if (v == 1) has1 = true;
        else throw TrainError("labels must be 0/1, got " + std::to_string(v));
    }
    if (!has0 || !has1) throw TrainError("training labels contain a single class");
}
}  // namespace

const std::string& to_string(ModelKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

ModelKind parse_model_kind(const std::string& name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<ModelKind>(i);
    }
    throw UsageError("unknown model '" + name +
                     "' (expected LR, LDA, SVC-linear, SVC-rbf, or RF)");
}

void ModelSpec::validate() const {
    switch (kind) {
        case ModelKind::LR:
            if (!(lambda > 0.0)) throw UsageError("LR lambda must be > 0");
            if (!(lr_tol > 0.0) || lr_max_iter < 1) throw UsageError("invalid LR tolerance/iterations");
            break;
        case ModelKind::LDA:
            if (shrinkage < 0.0 || shrinkage > 1.0) {
                throw UsageError("LDA shrinkage must be in [0, 1]");
            }
            break;
        case ModelKind::SvcLinear:
        case ModelKind::SvcRbf:
            if (!(C > 0.0)) throw UsageError("SVC C must be > 0");
            if (kind == ModelKind::SvcRbf && !(gamma > 0.0)) {
                throw UsageError("SVC-rbf gamma must be > 0");
            }
            if (!(svc_tol > 0.0) || max_passes < 1) throw UsageError("invalid SVC tolerance/passes");
            break;
        case ModelKind::RF:
            if (n_trees < 1) throw UsageError("RF needs n_trees >= 1");
            if (max_depth < -1) throw UsageError("RF max_depth must be -1 (unbounded) or >= 0");
            if (min_leaf < 1) throw UsageError("RF min_leaf must be >= 1");
            if (features_per_split < 0) throw UsageError("RF features_per_split must be >= 0");
            break;
    }
}

std::string ModelSpec::describe() const {
    switch (kind) {
        case ModelKind::LR: return "LR(lambda=" + format_double(lambda) + ")";
        case ModelKind::LDA: return "LDA(shrinkage=" + format_double(shrinkage) + ")";
        case ModelKind::SvcLinear: return "SVC-linear(C=" + format_double(C) + ")";
        case ModelKind::SvcRbf:
            return "SVC-rbf(C=" + format_double(C) + ",gamma=" + format_double(gamma) + ")";
        case ModelKind::RF:
            return "RF(trees=" + std::to_string(n_trees) + ",depth=" + std::to_string(max_depth) +
                   ",min_leaf=" + std::to_string(min_leaf) + ")";
    }
    return "?";
}

double ModelSpec::regularization_rank() const {
    switch (kind) {
        case ModelKind::LR: return lambda;
        case ModelKind::LDA: return shrinkage;
        case ModelKind::SvcLinear:
        case ModelKind::SvcRbf: return -C;
        case ModelKind::RF: return -static_cast<double>(n_trees);
    }
    return 0.0;
}

double Tree::predict(std::span<const double> x) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        const auto& n = nodes[node];
        node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[node].leaf_value;
}

double TrainedModel::score_row(std::span<const double> x) const {
    if (x.size() != n_features) {
        throw DataError("score: expected " + std::to_string(n_features) + " features, got " +
                        std::to_string(x.size()));
    }
    switch (spec.kind) {
        case ModelKind::LR:
        case ModelKind::LDA:
        case ModelKind::SvcLinear: {
            double z = intercept;
            for (std::size_t j = 0; j < n_features; ++j) z += weights[j] * x[j];
            return z;
        }
        case ModelKind::SvcRbf: {
            double z = intercept;
            for (std::size_t s = 0; s < support_vectors.rows; ++s) {
                double d2 = 0.0;
                const auto sv = support_vectors.row(s);
                for (std::size_t j = 0; j < n_features; ++j) {
                    const double d = x[j] - sv[j];
                    d2 += d * d;
                }
                z += dual_coef[s] * std::exp(-spec.gamma * d2);
            }
            return z;
        }
        case ModelKind::RF: {
            double total = 0.0;
            for (const auto& tree : trees) total += tree.predict(x);
            return total / static_cast<double>(trees.size());
        }
    }
    return 0.0;
}

std::vector<double> TrainedModel::score(const Matrix& X) const {
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = score_row(X.row(r));
    return out;
}

std::vector<double> inverse_frequency_weights(std::span<const int> y) {
    double n1 = 0.0;
    for (int v : y) n1 += v;
    const double n = static_cast<double>(y.size());
    const double n0 = n - n1;
    std::vector<double> w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        w[i] = y[i] == 1 ? n / (2.0 * n1) : n / (2.0 * n0);
    }
    return w;
}

TrainedModel train(const Matrix& X, std::span<const int> y, const ModelSpec& spec,
                   std::span<const double> sample_weights) {
    spec.validate();
    if (X.rows != y.size()) throw TrainError("row/label count mismatch");
    if (X.rows == 0 || X.cols == 0) throw TrainError("empty training matrix");
    check_finite(X);
    check_two_classes(y);
    switch (spec.kind) {
        case ModelKind::LR: return train_logistic(X, y, spec, sample_weights);
        case ModelKind::LDA: return train_lda(X, y, spec);
        case ModelKind::SvcLinear:
        case ModelKind::SvcRbf: return train_svc(X, y, spec, sample_weights);
        case ModelKind::RF: return train_rf(X, y, spec);
    }
    throw TrainError("unknown model kind");
}

namespace {

nlohmann::ordered_json hyperparameters_to_json(const ModelSpec& spec) {
    nlohmann::ordered_json hp;
    switch (spec.kind) {
        case ModelKind::LR:
            hp["lambda"] = spec.lambda;
            hp["tol"] = spec.lr_tol;
            hp["max_iter"] = spec.lr_max_iter;
            break;
        case ModelKind::LDA:
            hp["shrinkage"] = spec.shrinkage;
            break;
        case ModelKind::SvcLinear:
        case ModelKind::SvcRbf:
            hp["C"] = spec.C;
            if (spec.kind == ModelKind::SvcRbf) hp["gamma"] = spec.gamma;
            hp["tol"] = spec.svc_tol;
            hp["max_passes"] = spec.max_passes;
            break;
        case ModelKind::RF:
            hp["n_trees"] = spec.n_trees;
            hp["max_depth"] = spec.max_depth;
            hp["min_leaf"] = spec.min_leaf;
            hp["features_per_split"] = spec.features_per_split;
            hp["seed"] = spec.seed;
            break;
    }
    return hp;
}

void hyperparameters_from_json(const nlohmann::ordered_json& hp, ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::LR:
            spec.lambda = hp.at("lambda").get<double>();
            spec.lr_tol = hp.at("tol").get<double>();
            spec.lr_max_iter = hp.at("max_iter").get<int>();
            break;
        case ModelKind::LDA:
            spec.shrinkage = hp.at("shrinkage").get<double>();
            break;
        case ModelKind::SvcLinear:
        case ModelKind::SvcRbf:
            spec.C = hp.at("C").get<double>();
            if (spec.kind == ModelKind::SvcRbf) spec.gamma = hp.at("gamma").get<double>();
            spec.svc_tol = hp.at("tol").get<double>();
            spec.max_passes = hp.at("max_passes").get<int>();
            break;
        case ModelKind::RF:
            spec.n_trees = hp.at("n_trees").get<int>();
            spec.max_depth = hp.at("max_depth").get<int>();
            spec.min_leaf = hp.at("min_leaf").get<int>();
            spec.features_per_split = hp.at("features_per_split").get<int>();
            spec.seed = hp.at("seed").get<std::uint64_t>();
            break;
    }
}

}  // namespace

nlohmann::ordered_json spec_to_json(const ModelSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(spec.kind);
    j["hyperparameters"] = hyperparameters_to_json(spec);
    return j;
}

ModelSpec spec_from_json(const nlohmann::ordered_json& j) {
    ModelSpec spec;
    spec.kind = parse_model_kind(j.at("kind").get<std::string>());
    hyperparameters_from_json(j.at("hyperparameters"), spec);
    return spec;
}

nlohmann::ordered_json model_to_json(const TrainedModel& model) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(model.spec.kind);
    j["hyperparameters"] = hyperparameters_to_json(model.spec);
    j["n_features"] = model.n_features;
    nlohmann::ordered_json params;
    switch (model.spec.kind) {
        case ModelKind::LR:
        case ModelKind::LDA:
        case ModelKind::SvcLinear:
            params["weights"] = model.weights;
            params["intercept"] = model.intercept;
            break;
        case ModelKind::SvcRbf: {
            nlohmann::ordered_json svs = nlohmann::ordered_json::array();
            for (std::size_t s = 0; s < model.support_vectors.rows; ++s) {
                const auto row = model.support_vectors.row(s);
                svs.push_back(std::vector<double>(row.begin(), row.end()));
            }
            params["support_vectors"] = std::move(svs);
            params["dual_coef"] = model.dual_coef;
            params["intercept"] = model.intercept;
            break;
        }
        case ModelKind::RF: {
            nlohmann::ordered_json trees = nlohmann::ordered_json::array();
            for (const auto& tree : model.trees) {
                nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
                for (const auto& n : tree.nodes) {
                    nodes.push_back({{"feature", n.feature},
                                     {"threshold", n.threshold},
                                     {"left", n.left},
                                     {"right", n.right},
                                     {"leaf_value", n.leaf_value}});
                }
                trees.push_back({{"nodes", std::move(nodes)}});
            }
            params["trees"] = std::move(trees);
            break;
        }
    }
    j["parameters"] = std::move(params);
    return j;
}

TrainedModel model_from_json(const nlohmann::ordered_json& j) {
    TrainedModel model;
    model.spec.kind = parse_model_kind(j.at("kind").get<std::string>());
    hyperparameters_from_json(j.at("hyperparameters"), model.spec);
    model.n_features = j.at("n_features").get<std::size_t>();
    const auto& params = j.at("parameters");
    switch (model.spec.kind) {
        case ModelKind::LR:
        case ModelKind::LDA:
        case ModelKind::SvcLinear:
            model.weights = params.at("weights").get<std::vector<double>>();
            model.intercept = params.at("intercept").get<double>();
            break;
        case ModelKind::SvcRbf: {
            const auto& svs = params.at("support_vectors");
            model.support_vectors = Matrix(svs.size(), model.n_features);
            for (std::size_t s = 0; s < svs.size(); ++s) {
                const auto row = svs[s].get<std::vector<double>>();
                for (std::size_t c = 0; c < row.size(); ++c) model.support_vectors(s, c) = row[c];
            }
            model.dual_coef = params.at("dual_coef").get<std::vector<double>>();
            model.intercept = params.at("intercept").get<double>();
            break;
        }
        case ModelKind::RF:
            for (const auto& jt : params.at("trees")) {
                Tree tree;
                for (const auto& jn : jt.at("nodes")) {
                    TreeNode n;
                    n.feature = jn.at("feature").get<int>();
                    n.threshold = jn.at("threshold").get<double>();
                    n.left = jn.at("left").get<int>();
                    n.right = jn.at("right").get<int>();
                    n.leaf_value = jn.at("leaf_value").get<double>();
                    tree.nodes.push_back(n);
                }
                model.trees.push_back(std::move(tree));
            }
            break;
    }
    return model;
}

}  // namespace retiomics::models
