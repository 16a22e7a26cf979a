#pragma once

#include <span>
#include <string>
#include <vector>

#include "retiomics/cohort.hpp"
#include "retiomics/common.hpp"

namespace retiomics::preprocess {

/// Median imputation + z-normalization + one-hot encoding, fitted strictly on
/// training rows. Immutable after fit; safe to share across threads.
struct Preprocessor {
    struct NumericStats {
        double median = 0.0;
        double mean = 0.0;
        double sd = 1.0;  // population SD; constant columns recorded as 1 (no-op scale)
    };

    std::vector<std::string> source_columns;
    std::vector<cohort::ColumnKind> kinds;
    std::vector<cohort::Group> source_groups;
    std::vector<NumericStats> numeric;                // per source column (unused slots for categoricals)
    std::vector<std::vector<std::string>> levels;     // per source column, sorted; categoricals only
    std::vector<std::string> impute_level;            // mode level per categorical column
    std::size_t fitted_rows = 0;

    // Expanded (post one-hot) schema. Numeric columns keep their name;
    // categorical level indicators are named "{column}={level}" plus a
    // reserved "{column}=unseen".
    std::vector<std::string> expanded_names;
    std::vector<cohort::Group> expanded_groups;
    std::vector<bool> expanded_is_indicator;
    std::vector<std::size_t> expanded_source;  // source column index per expanded column

    int expanded_index(const std::string& name) const;  // -1 when absent

    /// Expanded column indices backing the given source columns, in expanded
    /// order. Unknown source names are an error.
    std::vector<std::size_t> expanded_for_sources(std::span<const std::string> sources) const;
};

Preprocessor fit_preprocessor(const cohort::DesignMatrix& dm,
                              std::span<const std::size_t> train_rows);

/// Returns a fully numeric matrix with rows in the order of `rows`. Missing
/// numeric cells take the training median (then scale); missing categoricals
/// take the training mode. Indicator columns are not z-scaled.
Matrix apply_preprocessor(const Preprocessor& pre, const cohort::DesignMatrix& dm,
                          std::span<const std::size_t> rows);

}  // namespace retiomics::preprocess
