#include <algorithm>
#include <cmath>
#include <vector>

#include "retiomics/models.hpp"

namespace retiomics::models {

namespace {

/// Sequential minimal optimization (Platt) for the soft-margin dual.
/// Deterministic: candidate scans are index-ordered and the second-choice
/// heuristic breaks ties by lowest index; no randomness anywhere.
class SmoSolver {
  public:
    SmoSolver(const Matrix& X, std::span<const int> y01, const ModelSpec& spec,
              std::span<const double> sample_weights)
        : X_(X), spec_(spec), n_(X.rows) {
        y_.resize(n_);
        c_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            y_[i] = y01[i] == 1 ? 1.0 : -1.0;
            c_[i] = spec.C * (sample_weights.empty() ? 1.0 : sample_weights[i]);
        }
        alpha_.assign(n_, 0.0);
        errors_.resize(n_);
        kernel_rows_.resize(n_);
        b_ = 0.0;
        recompute_errors();
    }

    void solve() {
        // max_passes caps the examine-all sweeps; the free-multiplier sweeps
        // in between each require dual progress, so they are bounded by a
        // loose total-sweep backstop only to guarantee termination.
        int examine_all_sweeps = 0;
        long total_sweeps = 0;
        const long total_cap = 50L * spec_.max_passes;
        bool examine_all = true;
        std::size_t num_changed = 0;
        while (num_changed > 0 || examine_all) {
            if ((examine_all && ++examine_all_sweeps > spec_.max_passes) ||
                ++total_sweeps > total_cap) {
                throw TrainError("SMO did not converge within " +
                                 std::to_string(spec_.max_passes) +
                                 " passes (max KKT residual " + format_double(kkt_residual()) +
                                 ")");
            }
            num_changed = 0;
            if (examine_all) {
                // Periodic full error refresh; incremental updates accumulate
                // rounding drift over long runs.
                recompute_errors();
                for (std::size_t i = 0; i < n_; ++i) num_changed += examine(i);
                examine_all = false;
            } else {
                for (std::size_t i = 0; i < n_; ++i) {
                    if (is_free(i)) num_changed += examine(i);
                }
                if (num_changed == 0) examine_all = true;
            }
        }
    }

    TrainedModel finish() const {
        TrainedModel model;
        model.spec = spec_;
        model.n_features = X_.cols;
        std::vector<std::size_t> sv;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] > 1e-12) sv.push_back(i);
        }
        model.support_vectors = Matrix(sv.size(), X_.cols);
        for (std::size_t s = 0; s < sv.size(); ++s) {
            const auto row = X_.row(sv[s]);
            for (std::size_t j = 0; j < X_.cols; ++j) model.support_vectors(s, j) = row[j];
            model.dual_coef.push_back(alpha_[sv[s]] * y_[sv[s]]);
            model.sv_indices.push_back(sv[s]);
        }
        model.intercept = b_;
        if (spec_.kind == ModelKind::SvcLinear) {
            model.weights.assign(X_.cols, 0.0);
            for (std::size_t s = 0; s < sv.size(); ++s) {
                const auto row = X_.row(sv[s]);
                for (std::size_t j = 0; j < X_.cols; ++j) {
                    model.weights[j] += model.dual_coef[s] * row[j];
                }
            }
        }
        return model;
    }

  private:
    bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_[i]; }

    double kernel(std::size_t i, std::size_t j) const {
        const auto a = X_.row(i);
        const auto b = X_.row(j);
        if (spec_.kind == ModelKind::SvcLinear) {
            double dot = 0.0;
            for (std::size_t k = 0; k < X_.cols; ++k) dot += a[k] * b[k];
            return dot;
        }
        double d2 = 0.0;
        for (std::size_t k = 0; k < X_.cols; ++k) {
            const double d = a[k] - b[k];
            d2 += d * d;
        }
        return std::exp(-spec_.gamma * d2);
    }

    // Lazily materialized kernel rows; only rows SMO touches get computed.
    const std::vector<double>& kernel_row(std::size_t i) {
        auto& row = kernel_rows_[i];
        if (row.empty()) {
            row.resize(n_);
            for (std::size_t j = 0; j < n_; ++j) row[j] = kernel(i, j);
        }
        return row;
    }

    double decision(std::size_t i) {
        double f = b_;
        const auto& ki = kernel_row(i);
        for (std::size_t j = 0; j < n_; ++j) {
            if (alpha_[j] > 0.0) f += alpha_[j] * y_[j] * ki[j];
        }
        return f;
    }

    void recompute_errors() {
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = decision(i) - y_[i];
    }

    double kkt_residual() {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double yf = y_[i] * (errors_[i] + y_[i]);
            if (alpha_[i] <= 0.0) {
                worst = std::max(worst, 1.0 - yf);
            } else if (alpha_[i] >= c_[i]) {
                worst = std::max(worst, yf - 1.0);
            } else {
                worst = std::max(worst, std::abs(yf - 1.0));
            }
        }
        return worst;
    }

    std::size_t examine(std::size_t i2) {
        const double y2 = y_[i2];
        const double a2 = alpha_[i2];
        const double e2 = errors_[i2];
        const double r2 = e2 * y2;
        const bool violated = (r2 < -spec_.svc_tol && a2 < c_[i2]) ||
                              (r2 > spec_.svc_tol && a2 > 0.0);
        if (!violated) return 0;

        // Second-choice heuristic: free multiplier maximizing |E1 - E2|.
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == i2 || !is_free(i)) continue;
            const double gap = std::abs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == i2 || !is_free(i)) continue;
            if (take_step(i, i2)) return 1;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == i2 || is_free(i)) continue;
            if (take_step(i, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = errors_[i1], e2 = errors_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c_[i2], c_[i1] + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c_[i1]);
            hi = std::min(c_[i2], a1 + a2);
        }
        if (lo >= hi) return false;

        const double k11 = kernel_row(i1)[i1];
        const double k12 = kernel_row(i1)[i2];
        const double k22 = kernel_row(i2)[i2];
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // eta <= 0 means the dual objective is linear (or flat) along the
            // feasible segment; move to the end the slope points at.
            const double slope = y2 * (e1 - e2);
            if (slope > 1e-12) {
                a2_new = hi;
            } else if (slope < -1e-12) {
                a2_new = lo;
            } else {
                return false;
            }
        }
        if (std::abs(a2_new - a2) < 1e-10 * (a2_new + a2 + 1e-10)) return false;

        const double a1_new = a1 + s * (a2 - a2_new);
        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);

        const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < c_[i1]) {
            b_new = b1;
        } else if (a2_new > 0.0 && a2_new < c_[i2]) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        const double db = b_new - b_;
        b_ = b_new;
        const auto& k1 = kernel_row(i1);
        const auto& k2 = kernel_row(i2);
        for (std::size_t i = 0; i < n_; ++i) {
            errors_[i] += d1 * k1[i] + d2 * k2[i] + db;
        }
        errors_[i1] = decision(i1) - y1;
        errors_[i2] = decision(i2) - y2;
        return true;
    }

    const Matrix& X_;
    const ModelSpec& spec_;
    std::size_t n_;
    std::vector<double> y_;       // labels in {-1, +1}
    std::vector<double> c_;       // per-sample box bound
    std::vector<double> alpha_;
    std::vector<double> errors_;  // E_i = f(x_i) - y_i
    std::vector<std::vector<double>> kernel_rows_;
    double b_;
};

}  // namespace

TrainedModel train_svc(const Matrix& X, std::span<const int> y, const ModelSpec& spec,
                       std::span<const double> sample_weights) {
    SmoSolver solver(X, y, spec, sample_weights);
    solver.solve();
    return solver.finish();
}

double svc_kkt_violation(const TrainedModel& model, const Matrix& X, std::span<const int> y,
                         std::span<const double> sample_weights) {
    std::vector<double> alpha(X.rows, 0.0);
    for (std::size_t s = 0; s < model.sv_indices.size(); ++s) {
        alpha[model.sv_indices[s]] = std::abs(model.dual_coef[s]);
    }
    const auto scores = model.score(X);
    double worst = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double yi = y[i] == 1 ? 1.0 : -1.0;
        const double ci = model.spec.C * (sample_weights.empty() ? 1.0 : sample_weights[i]);
        const double yf = yi * scores[i];
        if (alpha[i] <= 1e-12) {
            worst = std::max(worst, 1.0 - yf);
        } else if (alpha[i] >= ci - 1e-12) {
            worst = std::max(worst, yf - 1.0);
        } else {
            worst = std::max(worst, std::abs(yf - 1.0));
        }
    }
    return worst;
}

double svc_dual_balance(const TrainedModel& model) {
    double total = 0.0;
    for (double d : model.dual_coef) total += d;
    return std::abs(total);
}

}  // namespace retiomics::models
