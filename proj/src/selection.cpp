#include "retiomics/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "retiomics/evaluation.hpp"
#include "retiomics/rng.hpp"

namespace retiomics::selection {

using models::ModelKind;
using models::ModelSpec;

Grid default_grid(ModelKind kind, std::size_t feature_count) {
    Grid grid;
    grid.kind = kind;
    auto add = [&](auto&& tweak) {
        ModelSpec spec;
        spec.kind = kind;
        tweak(spec);
        grid.settings.push_back(spec);
    };
    switch (kind) {
        case ModelKind::LR:
            for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
                add([&](ModelSpec& s) { s.lambda = lambda; });
            }
            break;
        case ModelKind::LDA:
            // One-hot indicators make the pooled covariance singular at 0, so
            // the default family starts at 0.1.
            for (double g : {0.1, 0.5, 0.9}) {
                add([&](ModelSpec& s) { s.shrinkage = g; });
            }
            break;
        case ModelKind::SvcLinear:
            for (double c : {0.1, 1.0, 10.0, 100.0}) {
                add([&](ModelSpec& s) { s.C = c; });
            }
            break;
        case ModelKind::SvcRbf: {
            const double p = feature_count > 0 ? static_cast<double>(feature_count) : 1.0;
            for (double c : {0.1, 1.0, 10.0, 100.0}) {
                for (double scale : {0.1, 1.0, 10.0}) {
                    add([&](ModelSpec& s) {
                        s.C = c;
                        s.gamma = scale / p;
                    });
                }
            }
            break;
        }
        case ModelKind::RF:
            for (int trees : {100, 300}) {
                for (int depth : {-1, 8}) {
                    for (int leaf : {1, 5}) {
                        add([&](ModelSpec& s) {
                            s.n_trees = trees;
                            s.max_depth = depth;
                            s.min_leaf = leaf;
                        });
                    }
                }
            }
            break;
    }
    return grid;
}

double inner_mean_auc(const InnerSplit& split, const ModelSpec& setting,
                      std::span<const std::string> features) {
    if (split.X == nullptr || split.y == nullptr || split.inner_fold == nullptr ||
        split.prep == nullptr) {
        throw UsageError("inner split is not fully initialized");
    }
    if (features.empty()) throw UsageError("inner evaluation requires a non-empty feature set");
    const std::vector<std::size_t> cols = split.prep->expanded_for_sources(features);

    double total = 0.0;
    int used = 0;
    for (int f = 0; f < split.m; ++f) {
        std::vector<std::size_t> train_rows, val_rows;
        for (std::size_t r = 0; r < split.X->rows; ++r) {
            ((*split.inner_fold)[r] == f ? val_rows : train_rows).push_back(r);
        }
        if (train_rows.empty() || val_rows.empty()) continue;
        bool val0 = false, val1 = false;
        for (std::size_t r : val_rows) ((*split.y)[r] == 1 ? val1 : val0) = true;
        if (!val0 || !val1) continue;  // AUC undefined on this fold; skip deterministically

        Matrix X_train = subset(*split.X, train_rows, cols);
        Matrix X_val = subset(*split.X, val_rows, cols);
        std::vector<int> y_train, y_val;
        y_train.reserve(train_rows.size());
        y_val.reserve(val_rows.size());
        for (std::size_t r : train_rows) y_train.push_back((*split.y)[r]);
        for (std::size_t r : val_rows) y_val.push_back((*split.y)[r]);

        ModelSpec spec = setting;
        if (spec.kind == ModelKind::RF) {
            spec.seed = derive_seed(split.seed, "inner_rf", static_cast<std::uint64_t>(f));
        }
        std::vector<double> weights;
        if (split.class_weights &&
            (spec.kind == ModelKind::LR || spec.kind == ModelKind::SvcLinear ||
             spec.kind == ModelKind::SvcRbf)) {
            weights = models::inverse_frequency_weights(y_train);
        }
        models::TrainedModel model = models::train(X_train, y_train, spec, weights);
        total += evaluation::auc(model.score(X_val), y_val);
        ++used;
    }
    if (used == 0) {
        throw models::TrainError("no inner validation fold contains both classes");
    }
    return total / static_cast<double>(used);
}

GridResult grid_search(const InnerSplit& split, const Grid& grid,
                       std::span<const std::string> features) {
    if (grid.settings.empty()) throw UsageError("hyperparameter grid is empty");
    GridResult result;
    result.mean_auc.assign(grid.settings.size(), std::numeric_limits<double>::quiet_NaN());

    bool any = false;
    std::size_t best = 0;
    std::string failures;
    for (std::size_t i = 0; i < grid.settings.size(); ++i) {
        try {
            result.mean_auc[i] = inner_mean_auc(split, grid.settings[i], features);
        } catch (const models::TrainError& e) {
            if (!failures.empty()) failures += "; ";
            failures += grid.settings[i].describe() + ": " + e.what();
            continue;
        }
        if (!any) {
            any = true;
            best = i;
            continue;
        }
        const double cur = result.mean_auc[best];
        const double cand = result.mean_auc[i];
        if (cand > cur) {
            best = i;
        } else if (cand == cur &&
                   grid.settings[i].regularization_rank() >
                       grid.settings[best].regularization_rank()) {
            best = i;
        }
    }
    if (!any) {
        throw models::TrainError("every grid setting failed to train: " + failures);
    }
    result.best_index = best;
    result.best = grid.settings[best];
    return result;
}

SelectionTrace backward_eliminate(const InnerSplit& split, const ModelSpec& setting,
                                  std::vector<std::string> features, double epsilon) {
    SelectionTrace trace;
    if (features.empty()) {
        trace.stopping_reason = "empty_start";
        return trace;
    }
    if (features.size() == 1) {
        trace.final_features = std::move(features);
        trace.stopping_reason = "single_feature_left";
        return trace;
    }
    double current = inner_mean_auc(split, setting, features);
    while (features.size() > 1) {
        double best_auc = -1.0;
        std::size_t best_idx = features.size();
        for (std::size_t i = 0; i < features.size(); ++i) {
            std::vector<std::string> candidate;
            candidate.reserve(features.size() - 1);
            for (std::size_t j = 0; j < features.size(); ++j) {
                if (j != i) candidate.push_back(features[j]);
            }
            double a;
            try {
                a = inner_mean_auc(split, setting, candidate);
            } catch (const models::TrainError&) {
                continue;  // this removal is invalid
            }
            // Ties keep the earlier candidate (the lexicographically first
            // feature, since `features` stays sorted).
            if (a > best_auc) {
                best_auc = a;
                best_idx = i;
            }
        }
        if (best_idx == features.size() || best_auc < current - epsilon) {
            trace.stopping_reason = "no_removal_qualified";
            break;
        }
        trace.steps.push_back({features[best_idx], current, best_auc});
        features.erase(features.begin() + static_cast<std::ptrdiff_t>(best_idx));
        current = best_auc;
    }
    if (trace.stopping_reason.empty()) trace.stopping_reason = "single_feature_left";
    trace.final_features = std::move(features);
    return trace;
}

TwoStageResult two_stage_select(const InnerSplit& split, const ModelSpec& setting,
                                double epsilon) {
    if (split.prep == nullptr) throw UsageError("inner split is not fully initialized");
    std::vector<std::string> radiomic, other;
    for (std::size_t c = 0; c < split.prep->source_columns.size(); ++c) {
        (split.prep->source_groups[c] == cohort::Group::R ? radiomic : other)
            .push_back(split.prep->source_columns[c]);
    }
    std::sort(radiomic.begin(), radiomic.end());
    std::sort(other.begin(), other.end());

    TwoStageResult result;
    result.stage1 = backward_eliminate(split, setting, radiomic, epsilon);

    std::vector<std::string> stage2_start = result.stage1.final_features;
    stage2_start.insert(stage2_start.end(), other.begin(), other.end());
    std::sort(stage2_start.begin(), stage2_start.end());
    result.stage2 = backward_eliminate(split, setting, std::move(stage2_start), epsilon);
    result.final_features = result.stage2.final_features;
    if (result.final_features.empty()) {
        throw DataError("feature selection produced an empty final set");
    }
    return result;
}

std::vector<std::string> rf_feature_union(const std::vector<std::vector<std::string>>& lists) {
    if (lists.empty()) throw UsageError("rf_feature_union requires at least one input list");
    std::set<std::string> pool;
    for (const auto& list : lists) pool.insert(list.begin(), list.end());
    if (pool.empty()) throw DataError("rf_feature_union: all input feature lists are empty");
    return {pool.begin(), pool.end()};
}

}  // namespace retiomics::selection
