#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "retiomics/imaging.hpp"

namespace retiomics::radiomics {

/// Controls the optional histogram features and their binning.
struct FeatureConfig {
    bool entropy = false;
    bool uniformity = false;
    double bin_width = 25.0;  // intensity units, first bin anchored at the sample minimum
};

struct FirstOrderFeatures {
    double p10 = 0;
    double p90 = 0;
    double energy = 0;
    double total_energy = 0;
    double interquartile_range = 0;
    double kurtosis = 0;  // Pearson, non-excess: Gaussian -> 3
    double maximum = 0;
    double minimum = 0;
    double mean = 0;
    double median = 0;
    double range = 0;
    double mean_absolute_deviation = 0;
    double robust_mean_absolute_deviation = 0;
    double root_mean_squared = 0;
    double skewness = 0;
    double variance = 0;  // population (divisor N)
    std::optional<double> entropy;     // bits; present when configured
    std::optional<double> uniformity;  // present when configured

    /// Name/value pairs in declaration order (optional stats last, only when set).
    std::vector<std::pair<std::string, double>> to_pairs() const;
};

/// Feature names produced for the given config, in declaration order.
std::vector<std::string> feature_names(const FeatureConfig& config = {});

/// Linear interpolation between closest ranks: h = (N-1)*p/100 over sorted
/// values. `p` is a percentage in [0, 100].
double percentile(std::span<const double> sample, double p);
double percentile_sorted(std::span<const double> sorted_sample, double p);

FirstOrderFeatures extract_first_order(std::span<const double> sample, double spacing_x = 1.0,
                                       double spacing_y = 1.0, const FeatureConfig& config = {});

/// Radiomic row for one eye: keys "{modality}_{feature}" for every modality
/// present in `images`. Absent modalities contribute no keys; downstream CSV
/// export leaves their columns empty (missing).
struct EyeFeatureRow {
    std::string patient_id;
    std::string eye;  // OD | OS
    std::map<std::string, double> values;
};

EyeFeatureRow build_eye_feature_row(
    const std::string& patient_id, const std::string& eye,
    const std::vector<std::pair<imaging::Modality, std::pair<imaging::GrayImage, imaging::RoiMask>>>&
        images,
    const FeatureConfig& config = {});

/// All "{modality}_{feature}" keys over the six modalities, byte-wise
/// lexicographic — the fixed column order of the features CSV.
std::vector<std::string> all_radiomic_columns(const FeatureConfig& config = {});

}  // namespace retiomics::radiomics
