#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "retiomics/attribution.hpp"
#include "retiomics/cohort.hpp"
#include "retiomics/common.hpp"
#include "retiomics/evaluation.hpp"
#include "retiomics/models.hpp"
#include "retiomics/selection.hpp"

namespace retiomics::engine {

struct ShapOptions {
    bool enabled = true;
    std::size_t max_rows = 0;        // per-fold cap on explained test rows; 0 = all
    std::size_t permutations = 200;  // sampled mode (feature count > 15)
    bool full_background = false;    // false = single median-of-train row
};

struct EngineOptions {
    int k = 5;
    int m = 4;
    std::uint64_t master_seed = 0;
    bool selection = true;
    double epsilon = 0.001;
    bool stratified = false;
    bool class_weights = false;
    bool permute_labels = false;  // patient-level null control
    ShapOptions shap;
    // Empty = library default grid for the kind.
    std::map<models::ModelKind, selection::Grid> grid_overrides;
};

/// One experiment cell: (task, data combination, model, eye mode).
struct CellSpec {
    cohort::Task task = cohort::Task::Task1;
    cohort::DataCombination combination;
    models::ModelKind model = models::ModelKind::LR;
    std::string eyes = "both";  // "both" | "single"

    std::string id() const;  // e.g. "task1_R+D_LR_both"
};

/// Seed of one cell; every stochastic choice inside the cell derives from it.
std::uint64_t cell_seed(std::uint64_t master_seed, const CellSpec& cell);
/// Fold-plan seed — deliberately independent of model and combination so the
/// folds align across cells of one (task, eye mode).
std::uint64_t fold_plan_seed(std::uint64_t master_seed, cohort::Task task,
                             const std::string& eyes);

struct FoldOutcome {
    int fold = 0;
    double auc = 0.0;
    models::ModelSpec initial_setting;
    models::ModelSpec final_setting;
    std::vector<std::string> selected_features;  // source columns
    std::string selection_source;  // "two_stage" | "rf_union" | "rf_fallback" | "all_features"
    selection::SelectionTrace stage1;
    selection::SelectionTrace stage2;
    std::size_t test_rows = 0;
};

struct PooledScore {
    std::string patient;
    std::string eye;
    int fold = 0;
    int label = 0;
    double score = 0.0;
};

struct RunResult {
    CellSpec cell;
    int k = 5;
    int m = 4;
    std::uint64_t seed = 0;       // cell seed
    std::uint64_t fold_seed = 0;  // fold-plan seed
    std::size_t n_patients = 0;
    std::size_t n_rows = 0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::vector<FoldOutcome> folds;
    std::vector<PooledScore> pooled;  // fold order, then cohort row order
    double mean_auc = 0.0;
    double sd_auc = 0.0;  // sample SD over the k outer folds
    std::string shap_mode;  // "off" | "exact" | "sampled" | "mixed"
    std::size_t shap_rows = 0;
    std::vector<attribution::RankedFeature> shap;
    std::vector<std::string> warnings;
};

/// Per-outer-fold preset feature lists (the RF union rule); one list per fold.
using PresetFeatures = std::vector<std::vector<std::string>>;

/// Grouped nested cross-validation over an assembled design matrix. `plan`
/// must cover every patient of `dm`. For RF cells, `rf_union` supplies the
/// per-fold feature unions collected from the sibling models.
RunResult run_nested_cv(const cohort::DesignMatrix& dm, const evaluation::FoldPlan& plan,
                        const CellSpec& cell, const EngineOptions& options,
                        const PresetFeatures* rf_union = nullptr);

/// Run-manifest round trip (schema "retiomics.run/1", documented in docs).
nlohmann::ordered_json manifest_to_json(const RunResult& result, const std::string& config_echo);
RunResult manifest_from_json(const nlohmann::ordered_json& j);

}  // namespace retiomics::engine
