#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "retiomics/cohort.hpp"
#include "retiomics/common.hpp"
#include "retiomics/models.hpp"
#include "retiomics/preprocess.hpp"

namespace retiomics::selection {

/// One hyperparameter grid: candidate settings in declaration order. Ties on
/// mean inner AUC resolve toward the more regularized setting, then toward
/// the earlier declaration.
struct Grid {
    models::ModelKind kind = models::ModelKind::LR;
    std::vector<models::ModelSpec> settings;
};

/// Library defaults. `feature_count` sizes the rbf gamma = scale / p family.
Grid default_grid(models::ModelKind kind, std::size_t feature_count);

/// An outer-train split prepared for inner cross-validation. `X` is the full
/// preprocessed outer-train matrix; feature subsets are expressed as source
/// column names and mapped to expanded columns through `prep`.
struct InnerSplit {
    const Matrix* X = nullptr;
    const std::vector<int>* y = nullptr;
    const std::vector<int>* inner_fold = nullptr;  // inner fold id per row
    int m = 4;
    const preprocess::Preprocessor* prep = nullptr;
    bool class_weights = false;
    std::uint64_t seed = 0;  // base for per-fold RF seeds
};

/// Mean inner-validation AUC of one setting on one source-feature subset.
/// Inner validation folds missing a class are skipped; throws TrainError when
/// no fold is usable or training fails on a usable fold.
double inner_mean_auc(const InnerSplit& split, const models::ModelSpec& setting,
                      std::span<const std::string> features);

struct GridResult {
    models::ModelSpec best;
    std::size_t best_index = 0;
    std::vector<double> mean_auc;  // per setting; NaN when that setting failed to train
};

GridResult grid_search(const InnerSplit& split, const Grid& grid,
                       std::span<const std::string> features);

struct SelectionStep {
    std::string removed;
    double auc_before = 0.0;
    double auc_after = 0.0;
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;
    std::vector<std::string> final_features;
    std::string stopping_reason;  // "no_removal_qualified" | "single_feature_left" | "empty_start"
};

/// Greedy backward elimination: each round evaluates every single-feature
/// removal; the best removal is accepted when its AUC >= current - epsilon.
/// Candidates whose training fails are skipped.
SelectionTrace backward_eliminate(const InnerSplit& split, const models::ModelSpec& setting,
                                  std::vector<std::string> features, double epsilon);

struct TwoStageResult {
    SelectionTrace stage1;  // radiomic columns only; empty trace when the combination has none
    SelectionTrace stage2;  // stage-1 survivors plus the non-radiomic columns
    std::vector<std::string> final_features;
};

/// Stage 1 eliminates over the radiomic (group R) columns of the split's
/// preprocessor; stage 2 starts from the survivors plus every non-radiomic
/// column and eliminates again.
TwoStageResult two_stage_select(const InnerSplit& split, const models::ModelSpec& setting,
                                double epsilon);

/// Sorted set union of per-model selected feature lists (the RF rule).
std::vector<std::string> rf_feature_union(const std::vector<std::vector<std::string>>& lists);

}  // namespace retiomics::selection
