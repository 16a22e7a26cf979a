#include "retiomics/radiomics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace retiomics::radiomics {

std::vector<std::pair<std::string, double>> FirstOrderFeatures::to_pairs() const {
    std::vector<std::pair<std::string, double>> out = {
        {"p10", p10},
        {"p90", p90},
        {"energy", energy},
        {"total_energy", total_energy},
        {"interquartile_range", interquartile_range},
        {"kurtosis", kurtosis},
        {"maximum", maximum},
        {"minimum", minimum},
        {"mean", mean},
        {"median", median},
        {"range", range},
        {"mean_absolute_deviation", mean_absolute_deviation},
        {"robust_mean_absolute_deviation", robust_mean_absolute_deviation},
        {"root_mean_squared", root_mean_squared},
        {"skewness", skewness},
        {"variance", variance},
    };
    if (entropy) out.emplace_back("entropy", *entropy);
    if (uniformity) out.emplace_back("uniformity", *uniformity);
    return out;
}

std::vector<std::string> feature_names(const FeatureConfig& config) {
    std::vector<std::string> names = {"p10",
                                      "p90",
                                      "energy",
                                      "total_energy",
                                      "interquartile_range",
                                      "kurtosis",
                                      "maximum",
                                      "minimum",
                                      "mean",
                                      "median",
                                      "range",
                                      "mean_absolute_deviation",
                                      "robust_mean_absolute_deviation",
                                      "root_mean_squared",
                                      "skewness",
                                      "variance"};
    if (config.entropy) names.emplace_back("entropy");
    if (config.uniformity) names.emplace_back("uniformity");
    return names;
}

double percentile_sorted(std::span<const double> sorted_sample, double p) {
    if (sorted_sample.empty()) throw DataError("percentile of an empty sample");
    if (p < 0.0 || p > 100.0) {
        throw UsageError("percentile p must be in [0, 100], got " + format_double(p));
    }
    const std::size_t n = sorted_sample.size();
    const double h = static_cast<double>(n - 1) * p / 100.0;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n || frac == 0.0) return sorted_sample[lo];
    return sorted_sample[lo] + frac * (sorted_sample[lo + 1] - sorted_sample[lo]);
}

double percentile(std::span<const double> sample, double p) {
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    return percentile_sorted(sorted, p);
}

FirstOrderFeatures extract_first_order(std::span<const double> sample, double spacing_x,
                                       double spacing_y, const FeatureConfig& config) {
    if (sample.empty()) throw DataError("feature extraction requires a non-empty sample");
    const std::size_t n = sample.size();
    const double dn = static_cast<double>(n);

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    FirstOrderFeatures f;
    f.minimum = sorted.front();
    f.maximum = sorted.back();
    f.range = f.maximum - f.minimum;
    f.p10 = percentile_sorted(sorted, 10.0);
    f.p90 = percentile_sorted(sorted, 90.0);
    f.median = percentile_sorted(sorted, 50.0);
    f.interquartile_range = percentile_sorted(sorted, 75.0) - percentile_sorted(sorted, 25.0);

    double sum = 0.0, sum_sq = 0.0;
    for (double x : sorted) {
        sum += x;
        sum_sq += x * x;
    }
    f.mean = sum / dn;
    f.energy = sum_sq;
    f.total_energy = spacing_x * spacing_y * sum_sq;
    f.root_mean_squared = std::sqrt(sum_sq / dn);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0, abs_dev = 0.0;
    for (double x : sorted) {
        const double d = x - f.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        abs_dev += std::abs(d);
    }
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;
    f.variance = m2;
    f.mean_absolute_deviation = abs_dev / dn;
    if (m2 > 0.0) {
        f.skewness = m3 / std::pow(m2, 1.5);
        f.kurtosis = m4 / (m2 * m2);
    } else {
        // Zero-variance convention: finite values instead of NaN.
        f.skewness = 0.0;
        f.kurtosis = 0.0;
    }

    // Robust MAD: deviation of [p10, p90]-clipped sub-sample around its own mean.
    double sub_sum = 0.0;
    std::size_t sub_n = 0;
    for (double x : sorted) {
        if (x >= f.p10 && x <= f.p90) {
            sub_sum += x;
            ++sub_n;
        }
    }
    if (sub_n > 0) {
        const double sub_mean = sub_sum / static_cast<double>(sub_n);
        double sub_dev = 0.0;
        for (double x : sorted) {
            if (x >= f.p10 && x <= f.p90) sub_dev += std::abs(x - sub_mean);
        }
        f.robust_mean_absolute_deviation = sub_dev / static_cast<double>(sub_n);
    } else {
        f.robust_mean_absolute_deviation = 0.0;
    }

    if (config.entropy || config.uniformity) {
        if (!(config.bin_width > 0.0)) {
            throw UsageError("histogram bin width must be positive, got " +
                             format_double(config.bin_width));
        }
        const std::size_t nbins =
            static_cast<std::size_t>(std::floor(f.range / config.bin_width)) + 1;
        std::vector<std::size_t> counts(nbins, 0);
        for (double x : sorted) {
            auto idx = static_cast<std::size_t>(std::floor((x - f.minimum) / config.bin_width));
            if (idx >= nbins) idx = nbins - 1;
            ++counts[idx];
        }
        double ent = 0.0, uni = 0.0;
        for (std::size_t c : counts) {
            if (c == 0) continue;
            const double p = static_cast<double>(c) / dn;
            ent -= p * std::log2(p);
            uni += p * p;
        }
        if (config.entropy) f.entropy = ent;
        if (config.uniformity) f.uniformity = uni;
    }
    return f;
}

EyeFeatureRow build_eye_feature_row(
    const std::string& patient_id, const std::string& eye,
    const std::vector<std::pair<imaging::Modality, std::pair<imaging::GrayImage, imaging::RoiMask>>>&
        images,
    const FeatureConfig& config) {
    if (images.empty()) {
        throw DataError("eye " + patient_id + "/" + eye + " has no modalities to extract");
    }
    std::set<imaging::Modality> seen;
    EyeFeatureRow row;
    row.patient_id = patient_id;
    row.eye = eye;
    for (const auto& [modality, pair] : images) {
        if (!seen.insert(modality).second) {
            throw DataError("duplicate modality " + imaging::to_string(modality) + " for eye " +
                            patient_id + "/" + eye);
        }
        const auto& [image, mask] = pair;
        const auto values = imaging::sample_intensities(image, mask);
        const auto feats = extract_first_order(values, image.spacing_x, image.spacing_y, config);
        const std::string prefix = imaging::to_string(modality) + "_";
        for (const auto& [name, value] : feats.to_pairs()) {
            row.values[prefix + name] = value;
        }
    }
    return row;
}

std::vector<std::string> all_radiomic_columns(const FeatureConfig& config) {
    std::vector<std::string> columns;
    const auto names = feature_names(config);
    for (auto modality : imaging::kAllModalities) {
        for (const auto& name : names) {
            columns.push_back(imaging::to_string(modality) + "_" + name);
        }
    }
    std::sort(columns.begin(), columns.end());
    return columns;
}

}  // namespace retiomics::radiomics
