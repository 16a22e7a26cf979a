#pragma once

#include <string>
#include <vector>

#include "retiomics/nested_cv.hpp"

namespace retiomics::report {

/// AUC matrix shaped like the paper's per-task performance table: one row per
/// data combination, one "mean ± SD" column per (model, eye mode). Only
/// unfiltered (no modality filter) runs of `task` participate. Missing cells
/// stay empty and are listed in `warnings`.
std::string table2_csv(const std::vector<engine::RunResult>& runs, int task,
                       std::vector<std::string>& warnings);

/// Per-fold ROC points plus the vertically averaged mean curve
/// (fold column = "mean", threshold left empty).
std::string roc_csv(const engine::RunResult& run);

/// Standalone SVG plot of the same curves.
std::string roc_svg(const engine::RunResult& run);

/// Image-type ablation matrix: one row per (combination, modality filter)
/// among the modality-filtered runs of `task`, one mean-AUC column per model.
/// Returns an empty string when no filtered runs exist.
std::string ablation_csv(const std::vector<engine::RunResult>& runs, int task,
                         std::vector<std::string>& warnings);

/// Feature ranking embedded in the manifest, as "feature,mean_abs_shap".
std::string shap_csv(const engine::RunResult& run);

/// Paired DeLong p-values between models: one row per data combination held
/// in `runs`, one column per unordered model pair. All runs must share task
/// and eye mode, and pair only against identical (patient, eye) key sets.
/// p-values below 0.05 are flagged with '*'.
std::string compare_models_csv(const std::vector<engine::RunResult>& runs,
                               std::vector<std::string>& warnings);

/// Paired DeLong p-values between data combinations for one model: a square
/// combination x combination matrix (diagonal 1).
std::string compare_combinations_csv(const std::vector<engine::RunResult>& runs,
                                     models::ModelKind model,
                                     std::vector<std::string>& warnings);

/// DeLong on two runs' pooled scores, paired on sorted (patient, eye) keys.
/// Key-set or label mismatches are hard errors naming the offending eyes.
evaluation::DeLongResult delong_between(const engine::RunResult& a, const engine::RunResult& b);

}  // namespace retiomics::report
