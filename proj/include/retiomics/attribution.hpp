#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "retiomics/common.hpp"
#include "retiomics/models.hpp"

namespace retiomics::attribution {

/// Shapley values in model-score units under marginal replacement against a
/// background set. Exact mode satisfies local accuracy:
/// base + sum(values) == score(row) within 1e-6.
struct Attribution {
    std::vector<double> values;  // phi_i per feature
    double base = 0.0;           // phi_0 = expected score over the background
    std::string row_key;         // caller-assigned identifier of the explained row
    std::string mode;            // "exact" | "sampled"
    std::size_t samples = 0;     // permutations drawn (sampled mode only)
};

/// Exact mode enumerates all coalitions (feature count <= 15); sampled mode
/// averages marginal contributions over seeded random permutations.
Attribution shap_explain(const models::TrainedModel& model, std::span<const double> row,
                         const Matrix& background, bool exact, std::uint64_t seed,
                         std::size_t n_permutations = 2000);

struct RankedFeature {
    std::string name;
    double mean_abs = 0.0;
};

/// Mean |phi| per feature over all rows, sorted descending (ties by name).
std::vector<RankedFeature> mean_abs_shap(const models::TrainedModel& model, const Matrix& rows,
                                         std::span<const std::string> names,
                                         const Matrix& background, bool exact,
                                         std::uint64_t seed,
                                         std::size_t n_permutations = 2000);

/// Background row holding each training column's median — the default
/// single-row background.
Matrix median_background(const Matrix& train);

}  // namespace retiomics::attribution
