#include "retiomics/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "retiomics/radiomics.hpp"
#include "retiomics/rng.hpp"

namespace retiomics::attribution {

namespace {

constexpr std::size_t kExactLimit = 15;

/// Mean model score over the background with the masked features taken from
/// `row`. `member` flags which features belong to the coalition.
double coalition_value(const models::TrainedModel& model, std::span<const double> row,
                       const Matrix& background, const std::vector<bool>& member,
                       std::vector<double>& scratch) {
    const std::size_t p = row.size();
    double total = 0.0;
    for (std::size_t b = 0; b < background.rows; ++b) {
        const auto bg = background.row(b);
        for (std::size_t i = 0; i < p; ++i) scratch[i] = member[i] ? row[i] : bg[i];
        total += model.score_row(scratch);
    }
    return total / static_cast<double>(background.rows);
}

Attribution explain_exact(const models::TrainedModel& model, std::span<const double> row,
                          const Matrix& background) {
    const std::size_t p = row.size();
    if (p > kExactLimit) {
        throw UsageError("exact Shapley mode supports at most " + std::to_string(kExactLimit) +
                         " features, got " + std::to_string(p));
    }
    const std::size_t n_masks = std::size_t{1} << p;

    // v(S) for every coalition bitmask.
    std::vector<double> value(n_masks);
    std::vector<bool> member(p);
    std::vector<double> scratch(p);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        for (std::size_t i = 0; i < p; ++i) member[i] = (mask >> i) & 1;
        value[mask] = coalition_value(model, row, background, member, scratch);
    }

    // weight(s) = s! (p-s-1)! / p!  — exact in double for p <= 15.
    std::vector<double> factorial(p + 1, 1.0);
    for (std::size_t i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
    std::vector<double> weight(p);
    for (std::size_t s = 0; s < p; ++s) {
        weight[s] = factorial[s] * factorial[p - s - 1] / factorial[p];
    }

    Attribution out;
    out.mode = "exact";
    out.base = value[0];
    out.values.assign(p, 0.0);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
        for (std::size_t i = 0; i < p; ++i) {
            if ((mask >> i) & 1) continue;
            out.values[i] += weight[size] * (value[mask | (std::size_t{1} << i)] - value[mask]);
        }
    }
    return out;
}

Attribution explain_sampled(const models::TrainedModel& model, std::span<const double> row,
                            const Matrix& background, std::uint64_t seed,
                            std::size_t n_permutations) {
    const std::size_t p = row.size();
    Attribution out;
    out.mode = "sampled";
    out.samples = n_permutations;
    out.values.assign(p, 0.0);

    std::vector<bool> member(p, false);
    std::vector<double> scratch(p);
    out.base = coalition_value(model, row, background, member, scratch);

    Rng rng(seed);
    std::vector<std::size_t> perm(p);
    for (std::size_t t = 0; t < n_permutations; ++t) {
        for (std::size_t i = 0; i < p; ++i) perm[i] = i;
        rng.shuffle(perm);
        std::fill(member.begin(), member.end(), false);
        double prev = out.base;
        for (std::size_t j = 0; j < p; ++j) {
            member[perm[j]] = true;
            const double cur = coalition_value(model, row, background, member, scratch);
            out.values[perm[j]] += cur - prev;
            prev = cur;
        }
    }
    for (auto& v : out.values) v /= static_cast<double>(n_permutations);
    return out;
}

}  // namespace

Attribution shap_explain(const models::TrainedModel& model, std::span<const double> row,
                         const Matrix& background, bool exact, std::uint64_t seed,
                         std::size_t n_permutations) {
    if (background.rows == 0) throw DataError("Shapley background set is empty");
    if (row.size() != model.n_features || background.cols != model.n_features) {
        throw UsageError("Shapley input width does not match the model's feature count");
    }
    return exact ? explain_exact(model, row, background)
                 : explain_sampled(model, row, background, seed, n_permutations);
}

std::vector<RankedFeature> mean_abs_shap(const models::TrainedModel& model, const Matrix& rows,
                                         std::span<const std::string> names,
                                         const Matrix& background, bool exact,
                                         std::uint64_t seed, std::size_t n_permutations) {
    if (rows.rows == 0) throw DataError("mean_abs_shap requires at least one row");
    if (names.size() != rows.cols) {
        throw UsageError("feature name count does not match the matrix width");
    }
    std::vector<double> acc(rows.cols, 0.0);
    for (std::size_t r = 0; r < rows.rows; ++r) {
        const Attribution a = shap_explain(model, rows.row(r), background, exact,
                                           derive_seed(seed, "row", r), n_permutations);
        for (std::size_t i = 0; i < rows.cols; ++i) acc[i] += std::abs(a.values[i]);
    }
    std::vector<RankedFeature> ranked(rows.cols);
    for (std::size_t i = 0; i < rows.cols; ++i) {
        ranked[i].name = names[i];
        ranked[i].mean_abs = acc[i] / static_cast<double>(rows.rows);
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
        if (a.mean_abs != b.mean_abs) return a.mean_abs > b.mean_abs;
        return a.name < b.name;
    });
    return ranked;
}

Matrix median_background(const Matrix& train) {
    if (train.rows == 0) throw DataError("cannot build a background from an empty matrix");
    Matrix out(1, train.cols);
    std::vector<double> column(train.rows);
    for (std::size_t c = 0; c < train.cols; ++c) {
        for (std::size_t r = 0; r < train.rows; ++r) column[r] = train(r, c);
        std::sort(column.begin(), column.end());
        out(0, c) = radiomics::percentile_sorted(column, 50.0);
    }
    return out;
}

}  // namespace retiomics::attribution
