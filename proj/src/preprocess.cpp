#include "retiomics/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "retiomics/radiomics.hpp"

namespace retiomics::preprocess {

using cohort::CellValue;
using cohort::ColumnKind;

int Preprocessor::expanded_index(const std::string& name) const {
    for (std::size_t i = 0; i < expanded_names.size(); ++i) {
        if (expanded_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<std::size_t> Preprocessor::expanded_for_sources(
    std::span<const std::string> sources) const {
    std::vector<bool> keep(source_columns.size(), false);
    for (const auto& name : sources) {
        auto it = std::find(source_columns.begin(), source_columns.end(), name);
        if (it == source_columns.end()) {
            throw DataError("unknown source column in feature subset: " + name);
        }
        keep[static_cast<std::size_t>(it - source_columns.begin())] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < expanded_names.size(); ++e) {
        if (keep[expanded_source[e]]) out.push_back(e);
    }
    return out;
}

Preprocessor fit_preprocessor(const cohort::DesignMatrix& dm,
                              std::span<const std::size_t> train_rows) {
    if (train_rows.empty()) throw DataError("preprocessor fit requires non-empty training rows");
    Preprocessor pre;
    pre.source_columns = dm.columns;
    pre.kinds = dm.kinds;
    pre.source_groups = dm.groups;
    pre.numeric.resize(dm.cols());
    pre.levels.resize(dm.cols());
    pre.impute_level.resize(dm.cols());
    pre.fitted_rows = train_rows.size();

    for (std::size_t c = 0; c < dm.cols(); ++c) {
        if (dm.kinds[c] == ColumnKind::Numeric) {
            std::vector<double> present;
            for (std::size_t r : train_rows) {
                const CellValue& cell = dm.cells[r][c];
                if (!cell.is_missing()) present.push_back(cell.number);
            }
            if (present.empty()) {
                throw DataError("column " + dm.columns[c] +
                                " has no non-missing training values to impute from");
            }
            std::sort(present.begin(), present.end());
            auto& stats = pre.numeric[c];
            stats.median = radiomics::percentile_sorted(present, 50.0);
            double sum = 0.0;
            for (std::size_t r : train_rows) {
                const CellValue& cell = dm.cells[r][c];
                sum += cell.is_missing() ? stats.median : cell.number;
            }
            stats.mean = sum / static_cast<double>(train_rows.size());
            double ss = 0.0;
            for (std::size_t r : train_rows) {
                const CellValue& cell = dm.cells[r][c];
                const double v = cell.is_missing() ? stats.median : cell.number;
                ss += (v - stats.mean) * (v - stats.mean);
            }
            const double sd = std::sqrt(ss / static_cast<double>(train_rows.size()));
            stats.sd = sd > 0.0 ? sd : 1.0;
            pre.expanded_names.push_back(dm.columns[c]);
            pre.expanded_groups.push_back(dm.groups[c]);
            pre.expanded_is_indicator.push_back(false);
            pre.expanded_source.push_back(c);
        } else {
            std::map<std::string, std::size_t> counts;
            for (std::size_t r : train_rows) {
                const CellValue& cell = dm.cells[r][c];
                if (!cell.is_missing()) ++counts[cell.category];
            }
            if (counts.empty()) {
                throw DataError("categorical column " + dm.columns[c] +
                                " has no non-missing training values to impute from");
            }
            auto& lv = pre.levels[c];
            std::size_t best_count = 0;
            for (const auto& [level, count] : counts) {  // lexicographic walk
                lv.push_back(level);
                if (count > best_count) {
                    best_count = count;
                    pre.impute_level[c] = level;  // ties keep the lexicographically first
                }
            }
            for (const auto& level : lv) {
                pre.expanded_names.push_back(dm.columns[c] + "=" + level);
                pre.expanded_groups.push_back(dm.groups[c]);
                pre.expanded_is_indicator.push_back(true);
                pre.expanded_source.push_back(c);
            }
            pre.expanded_names.push_back(dm.columns[c] + "=unseen");
            pre.expanded_groups.push_back(dm.groups[c]);
            pre.expanded_is_indicator.push_back(true);
            pre.expanded_source.push_back(c);
        }
    }
    return pre;
}

Matrix apply_preprocessor(const Preprocessor& pre, const cohort::DesignMatrix& dm,
                          std::span<const std::size_t> rows) {
    if (pre.source_columns != dm.columns) {
        throw DataError("preprocessor columns do not match the design matrix");
    }
    Matrix out(rows.size(), pre.expanded_names.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        std::size_t e = 0;
        for (std::size_t c = 0; c < dm.cols(); ++c) {
            const CellValue& cell = dm.cells[r][c];
            if (pre.kinds[c] == ColumnKind::Numeric) {
                const auto& stats = pre.numeric[c];
                const double v = cell.is_missing() ? stats.median : cell.number;
                out(i, e) = (v - stats.mean) / stats.sd;
                ++e;
            } else {
                const auto& lv = pre.levels[c];
                const std::string& level = cell.is_missing() ? pre.impute_level[c] : cell.category;
                auto it = std::lower_bound(lv.begin(), lv.end(), level);
                std::size_t hit;  // index among [levels..., unseen]
                if (it != lv.end() && *it == level) {
                    hit = static_cast<std::size_t>(it - lv.begin());
                } else {
                    hit = lv.size();  // reserved "unseen" indicator
                }
                for (std::size_t j = 0; j <= lv.size(); ++j) {
                    out(i, e + j) = j == hit ? 1.0 : 0.0;
                }
                e += lv.size() + 1;
            }
        }
    }
    return out;
}

}  // namespace retiomics::preprocess
