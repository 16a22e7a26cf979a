#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "retiomics/common.hpp"

namespace retiomics::models {

/// Raised when a fit cannot satisfy its contract (degenerate data,
/// non-convergence). Grid search treats it as "this setting failed".
struct TrainError : DataError {
    using DataError::DataError;
};

enum class ModelKind { LR, LDA, SvcLinear, SvcRbf, RF };
const std::string& to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelSpec {
    ModelKind kind = ModelKind::LR;
    // LR
    double lambda = 1.0;  // L2 strength on the mean log-loss
    double lr_tol = 1e-8;
    int lr_max_iter = 100;
    // LDA
    double shrinkage = 0.0;  // gamma_s in [0, 1]
    // SVC
    double C = 1.0;
    double gamma = 1.0;  // rbf only
    double svc_tol = 1e-3;
    int max_passes = 200;  // cap on examine-all sweeps
    // RF
    int n_trees = 100;
    int max_depth = -1;  // -1 unbounded, 0 = root leaf
    int min_leaf = 1;
    int features_per_split = 0;  // 0 = ceil(sqrt(p))
    std::uint64_t seed = 0;

    void validate() const;
    /// Human-readable hyperparameter summary, e.g. "LR(lambda=0.1)".
    std::string describe() const;
    /// Larger = more regularized; grid-search tie-break key.
    double regularization_rank() const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;  // positive fraction at the leaf
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double predict(std::span<const double> x) const;
};

struct TrainedModel {
    ModelSpec spec;
    std::size_t n_features = 0;
    // LR / LDA / SVC-linear
    std::vector<double> weights;
    double intercept = 0.0;
    // SVC (both kernels keep duals so solutions can be audited; linear also
    // collapses them into weights/intercept for O(p) scoring)
    Matrix support_vectors;
    std::vector<double> dual_coef;          // alpha_i * y_i per support vector
    std::vector<std::size_t> sv_indices;    // training-row index per support vector
    // RF
    std::vector<Tree> trees;

    double score_row(std::span<const double> x) const;
    std::vector<double> score(const Matrix& X) const;
};

/// y is 0/1. Optional per-sample weights (inverse class frequency) are used
/// by LR and SVC when class weighting is enabled; empty = unweighted.
TrainedModel train(const Matrix& X, std::span<const int> y, const ModelSpec& spec,
                   std::span<const double> sample_weights = {});

TrainedModel train_logistic(const Matrix& X, std::span<const int> y, const ModelSpec& spec,
                            std::span<const double> sample_weights = {});
TrainedModel train_lda(const Matrix& X, std::span<const int> y, const ModelSpec& spec);
TrainedModel train_svc(const Matrix& X, std::span<const int> y, const ModelSpec& spec,
                       std::span<const double> sample_weights = {});
TrainedModel train_rf(const Matrix& X, std::span<const int> y, const ModelSpec& spec);

/// Inverse-frequency weights: w_i = n / (2 * n_{class(i)}).
std::vector<double> inverse_frequency_weights(std::span<const int> y);

/// Penalized LR objective and gradient at (w, b) — exposed for the
/// finite-difference audit in tests.
double lr_loss(const Matrix& X, std::span<const int> y, std::span<const double> w, double b,
               double lambda, std::span<const double> sample_weights = {});
void lr_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w, double b,
                 double lambda, std::span<double> grad_w, double& grad_b,
                 std::span<const double> sample_weights = {});

/// Max KKT violation of an SVC solution over its own training set (0 = clean).
double svc_kkt_violation(const TrainedModel& model, const Matrix& X, std::span<const int> y,
                         std::span<const double> sample_weights = {});
/// |sum alpha_i y_i| of an SVC-rbf solution (linear collapses duals).
double svc_dual_balance(const TrainedModel& model);

nlohmann::ordered_json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::ordered_json& j);

/// Hyperparameter setting as {"kind": ..., "hyperparameters": {...}}.
nlohmann::ordered_json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::ordered_json& j);

}  // namespace retiomics::models
