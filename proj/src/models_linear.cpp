#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "retiomics/models.hpp"

namespace retiomics::models {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

}  // namespace

double lr_loss(const Matrix& X, std::span<const int> y, std::span<const double> w, double b,
               double lambda, std::span<const double> sample_weights) {
    const double n = static_cast<double>(X.rows);
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double z = b;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < X.cols; ++j) z += w[j] * row[j];
        const double li = log1pexp(z) - static_cast<double>(y[i]) * z;
        loss += sample_weights.empty() ? li : sample_weights[i] * li;
    }
    loss /= n;
    double penalty = 0.0;
    for (double wj : w) penalty += wj * wj;
    return loss + 0.5 * lambda * penalty;
}

void lr_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w, double b,
                 double lambda, std::span<double> grad_w, double& grad_b,
                 std::span<const double> sample_weights) {
    const double n = static_cast<double>(X.rows);
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double z = b;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < X.cols; ++j) z += w[j] * row[j];
        double r = sigmoid(z) - static_cast<double>(y[i]);
        if (!sample_weights.empty()) r *= sample_weights[i];
        for (std::size_t j = 0; j < X.cols; ++j) grad_w[j] += r * row[j];
        grad_b += r;
    }
    for (std::size_t j = 0; j < X.cols; ++j) grad_w[j] = grad_w[j] / n + lambda * w[j];
    grad_b /= n;
}

TrainedModel train_logistic(const Matrix& X, std::span<const int> y, const ModelSpec& spec,
                            std::span<const double> sample_weights) {
    const std::size_t p = X.cols;
    const double n = static_cast<double>(X.rows);
    std::vector<double> w(p, 0.0);
    double b = 0.0;

    std::vector<double> grad_w(p, 0.0);
    double grad_b = 0.0;
    double loss = lr_loss(X, y, w, b, spec.lambda, sample_weights);

    // Newton iterations on the (w, b) block with step-halving; the problem is
    // strictly convex for lambda > 0, so this terminates quickly.
    for (int iter = 0; iter < spec.lr_max_iter; ++iter) {
        lr_gradient(X, y, w, b, spec.lambda, grad_w, grad_b, sample_weights);
        double gmax = std::abs(grad_b);
        for (double g : grad_w) gmax = std::max(gmax, std::abs(g));
        if (gmax <= spec.lr_tol) {
            TrainedModel model;
            model.spec = spec;
            model.n_features = p;
            model.weights = std::move(w);
            model.intercept = b;
            return model;
        }

        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p + 1, p + 1);
        for (std::size_t i = 0; i < X.rows; ++i) {
            double z = b;
            const auto row = X.row(i);
            for (std::size_t j = 0; j < p; ++j) z += w[j] * row[j];
            const double s = sigmoid(z);
            double r = s * (1.0 - s);
            if (!sample_weights.empty()) r *= sample_weights[i];
            r /= n;
            for (std::size_t j = 0; j < p; ++j) {
                const double rj = r * row[j];
                for (std::size_t k = j; k < p; ++k) {
                    H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) += rj * row[k];
                }
                H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p)) += rj;
            }
            H(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) += r;
        }
        for (std::size_t j = 0; j < p; ++j) {
            H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += spec.lambda;
            for (std::size_t k = j + 1; k <= p; ++k) {
                H(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                    H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
            }
        }

        Eigen::VectorXd g(p + 1);
        for (std::size_t j = 0; j < p; ++j) g(static_cast<Eigen::Index>(j)) = grad_w[j];
        g(static_cast<Eigen::Index>(p)) = grad_b;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() != Eigen::Success) {
            throw TrainError("LR Newton system could not be factorized");
        }
        Eigen::VectorXd step = ldlt.solve(g);
        if (!step.allFinite()) throw TrainError("LR Newton step is not finite");

        double t = 1.0;
        bool moved = false;
        for (int halving = 0; halving < 60; ++halving) {
            std::vector<double> w_new(p);
            for (std::size_t j = 0; j < p; ++j) {
                w_new[j] = w[j] - t * step(static_cast<Eigen::Index>(j));
            }
            const double b_new = b - t * step(static_cast<Eigen::Index>(p));
            const double loss_new = lr_loss(X, y, w_new, b_new, spec.lambda, sample_weights);
            if (loss_new <= loss + 1e-14) {
                w = std::move(w_new);
                b = b_new;
                loss = loss_new;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) throw TrainError("LR line search failed to make progress");
    }

    // Accept if the stationarity condition holds at the iteration cap.
    lr_gradient(X, y, w, b, spec.lambda, grad_w, grad_b, sample_weights);
    double gmax = std::abs(grad_b);
    for (double g2 : grad_w) gmax = std::max(gmax, std::abs(g2));
    if (gmax <= spec.lr_tol) {
        TrainedModel model;
        model.spec = spec;
        model.n_features = p;
        model.weights = std::move(w);
        model.intercept = b;
        return model;
    }
    throw TrainError("LR did not reach gradient tolerance " + format_double(spec.lr_tol) +
                     " within " + std::to_string(spec.lr_max_iter) +
                     " iterations (residual " + format_double(gmax) + ")");
}

TrainedModel train_lda(const Matrix& X, std::span<const int> y, const ModelSpec& spec) {
    const std::size_t p = X.cols;
    const auto n = static_cast<Eigen::Index>(X.rows);
    std::size_t n0 = 0, n1 = 0;
    Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < X.rows; ++i) {
        const auto row = X.row(i);
        auto& mu = y[i] == 1 ? mu1 : mu0;
        for (std::size_t j = 0; j < p; ++j) mu(static_cast<Eigen::Index>(j)) += row[j];
        ++(y[i] == 1 ? n1 : n0);
    }
    if (X.rows < 3) throw TrainError("LDA needs at least 3 rows");
    mu0 /= static_cast<double>(n0);
    mu1 /= static_cast<double>(n1);

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                              static_cast<Eigen::Index>(p));
    Eigen::VectorXd d(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < X.rows; ++i) {
        const auto row = X.row(i);
        const auto& mu = y[i] == 1 ? mu1 : mu0;
        for (std::size_t j = 0; j < p; ++j) {
            d(static_cast<Eigen::Index>(j)) = row[j] - mu(static_cast<Eigen::Index>(j));
        }
        S.selfadjointView<Eigen::Lower>().rankUpdate(d, 1.0);
    }
    S = S.selfadjointView<Eigen::Lower>();
    S /= static_cast<double>(n - 2);

    const double g = spec.shrinkage;
    Eigen::MatrixXd sigma = (1.0 - g) * S;
    const double ridge = g * S.trace() / static_cast<double>(p);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j) sigma(j, j) += ridge;

    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw TrainError("LDA within-class covariance is singular; increase shrinkage");
    }
    Eigen::VectorXd wv = llt.solve(mu1 - mu0);
    if (!wv.allFinite()) {
        throw TrainError("LDA within-class covariance is singular; increase shrinkage");
    }

    TrainedModel model;
    model.spec = spec;
    model.n_features = p;
    model.weights.resize(p);
    for (std::size_t j = 0; j < p; ++j) model.weights[j] = wv(static_cast<Eigen::Index>(j));
    const Eigen::VectorXd mid = 0.5 * (mu0 + mu1);
    model.intercept = -wv.dot(mid) + std::log(static_cast<double>(n1) / static_cast<double>(n0));
    return model;
}

}  // namespace retiomics::models
