#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "oracles.hpp"
#include "retiomics/imaging.hpp"
#include "retiomics/radiomics.hpp"
#include "retiomics/rng.hpp"

using namespace retiomics;
using namespace retiomics::radiomics;

namespace {

double rel_diff(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) / scale;
}

}  // namespace

TEST_SUITE("radiomics") {

TEST_CASE("percentile uses linear interpolation between closest ranks") {
    const std::vector<double> s = {4, 2, 1, 3};  // unsorted on purpose
    CHECK(percentile(s, 25) == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(percentile(s, 75) == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(percentile(s, 10) == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(percentile(s, 90) == doctest::Approx(3.7).epsilon(1e-12));
    CHECK(percentile(s, 0) == 1.0);
    CHECK(percentile(s, 100) == 4.0);
    CHECK(percentile(std::vector<double>{7.0}, 50) == 7.0);
    CHECK_THROWS_AS(percentile(std::vector<double>{}, 50), DataError);
    CHECK_THROWS_AS(percentile(s, -1), UsageError);
    CHECK_THROWS_AS(percentile(s, 101), UsageError);
}

TEST_CASE("worked example: sample {1,2,3,4}") {
    const std::vector<double> s = {1, 2, 3, 4};
    const FirstOrderFeatures f = extract_first_order(s);
    CHECK(f.mean == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.variance == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(f.kurtosis == doctest::Approx(1.64).epsilon(1e-12));
    CHECK(f.skewness == doctest::Approx(0.0));
    CHECK(f.energy == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(f.root_mean_squared == doctest::Approx(std::sqrt(7.5)).epsilon(1e-12));
    CHECK(f.mean_absolute_deviation == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.interquartile_range == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(f.robust_mean_absolute_deviation == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.range == doctest::Approx(3.0));
    CHECK(f.minimum == 1.0);
    CHECK(f.maximum == 4.0);
    CHECK(f.median == doctest::Approx(2.5));
    CHECK(f.p10 == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(f.p90 == doctest::Approx(3.7).epsilon(1e-12));
    CHECK(f.total_energy == doctest::Approx(30.0).epsilon(1e-12));
    CHECK_FALSE(f.entropy.has_value());
    CHECK_FALSE(f.uniformity.has_value());

    const FirstOrderFeatures g = extract_first_order(s, 2.0, 0.5);
    CHECK(g.total_energy == doctest::Approx(30.0).epsilon(1e-12));  // 2.0*0.5*30
    CHECK(g.energy == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("constant samples have zero spread, skewness, and kurtosis") {
    const FirstOrderFeatures f = extract_first_order(std::vector<double>{5, 5, 5});
    CHECK(f.variance == 0.0);
    CHECK(f.skewness == 0.0);
    CHECK(f.kurtosis == 0.0);
    CHECK(f.range == 0.0);
    CHECK(f.mean_absolute_deviation == 0.0);
    CHECK(f.robust_mean_absolute_deviation == 0.0);
}

TEST_CASE("histogram features: fixed bin width anchored at the minimum") {
    FeatureConfig config;
    config.entropy = true;
    config.uniformity = true;
    config.bin_width = 25.0;
    // bins [0,25) [25,50) [50,75); the maximum lands in the last bin
    const FirstOrderFeatures f =
        extract_first_order(std::vector<double>{0, 30, 60}, 1.0, 1.0, config);
    REQUIRE(f.entropy.has_value());
    REQUIRE(f.uniformity.has_value());
    CHECK(*f.entropy == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
    CHECK(*f.uniformity == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // all values equal -> a single occupied bin
    const FirstOrderFeatures g =
        extract_first_order(std::vector<double>{7, 7, 7, 7}, 1.0, 1.0, config);
    CHECK(*g.entropy == 0.0);
    CHECK(*g.uniformity == 1.0);

    // empty bins are skipped: {0, 100} with width 25 -> two occupied of five
    const FirstOrderFeatures h =
        extract_first_order(std::vector<double>{0, 100}, 1.0, 1.0, config);
    CHECK(*h.entropy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*h.uniformity == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rmad of a sub-sample that would be empty is zero") {
    // With linear-interpolation percentiles, {0, 10} has p10 = 1 and
    // p90 = 9, so no value lies in [p10, p90]; the library must not
    // divide by zero and reports rmad = 0 for the empty sub-sample.
    const FirstOrderFeatures f = extract_first_order(std::vector<double>{0, 10});
    CHECK(f.robust_mean_absolute_deviation == 0.0);
}

TEST_CASE("feature_names order and optional features") {
    const std::vector<std::string> base = feature_names();
    REQUIRE(base.size() == 16);
    CHECK(base.front() == "p10");
    CHECK(base.back() == "variance");
    FeatureConfig config;
    config.entropy = true;
    config.uniformity = true;
    const std::vector<std::string> all = feature_names(config);
    REQUIRE(all.size() == 18);
    CHECK(all[16] == "entropy");
    CHECK(all[17] == "uniformity");

    const FirstOrderFeatures f = extract_first_order(std::vector<double>{1, 2}, 1, 1, config);
    const auto pairs = f.to_pairs();
    REQUIRE(pairs.size() == 18);
    for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(pairs[i].first == all[i]);
}

TEST_CASE("radiomic CSV columns are byte-lexicographic; OCTA33D_* precedes OCT_*") {
    const std::vector<std::string> cols = all_radiomic_columns();
    REQUIRE(cols.size() == 6 * 16);
    CHECK(std::is_sorted(cols.begin(), cols.end()));
    const auto pos = [&](const std::string& name) {
        return std::find(cols.begin(), cols.end(), name) - cols.begin();
    };
    CHECK(pos("FR_energy") == 0);
    CHECK(pos("OCTA33D_energy") < pos("OCT_energy"));
    CHECK(pos("OCTA33S_mean") < pos("OCTA66D_mean"));
}

TEST_CASE("agreement with the brute-force oracle on random samples") {
    Rng rng(20240601);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.uniform_int(196);
        std::vector<double> sample(n);
        for (double& v : sample) {
            // integer-valued with deliberate ties
            v = static_cast<double>(rng.uniform_int(256));
        }
        const double sx = rng.uniform(0.1, 3.0);
        const double sy = rng.uniform(0.1, 3.0);
        FeatureConfig config;
        config.entropy = true;
        config.uniformity = true;
        const FirstOrderFeatures f = extract_first_order(sample, sx, sy, config);
        const auto ref = oracles::first_order(sample, sx, sy, true, true, config.bin_width);
        for (const auto& [name, value] : f.to_pairs()) {
            INFO("feature ", name, " trial ", trial);
            CHECK(rel_diff(value, ref.at(name)) <= 1e-12);
        }
    }
}

TEST_CASE("build_eye_feature_row prefixes keys with the modality") {
    imaging::GrayImage oct;
    oct.width = 2;
    oct.height = 2;
    oct.max_value = 255;
    oct.pixels = {1, 2, 3, 4};
    oct.spacing_x = 2.0;
    oct.spacing_y = 0.5;
    imaging::GrayImage fr = oct;
    fr.pixels = {10, 20, 30, 40};
    fr.spacing_x = fr.spacing_y = 1.0;

    const EyeFeatureRow row = build_eye_feature_row(
        "P001", "OD",
        {{imaging::Modality::OCT, {oct, imaging::full_mask(oct)}},
         {imaging::Modality::FR, {fr, imaging::full_mask(fr)}}},
        {});
    CHECK(row.patient_id == "P001");
    CHECK(row.eye == "OD");
    CHECK(row.values.size() == 2 * 16);
    CHECK(row.values.at("OCT_mean") == doctest::Approx(2.5));
    CHECK(row.values.at("OCT_total_energy") == doctest::Approx(30.0));
    CHECK(row.values.at("FR_mean") == doctest::Approx(25.0));
    CHECK(row.values.count("FR_p90") == 1);

    CHECK_THROWS_AS(build_eye_feature_row("P001", "OD", {}, {}), DataError);
}

TEST_CASE("shift and scale behave as the formulas require") {
    Rng rng(7);
    std::vector<double> sample(64);
    for (double& v : sample) v = rng.uniform(0.0, 100.0);
    const FirstOrderFeatures f = extract_first_order(sample);

    std::vector<double> shifted = sample;
    for (double& v : shifted) v += 17.5;
    const FirstOrderFeatures fs = extract_first_order(shifted);
    CHECK(rel_diff(fs.mean, f.mean + 17.5) <= 1e-12);
    CHECK(rel_diff(fs.variance, f.variance) <= 1e-9);
    CHECK(rel_diff(fs.skewness, f.skewness) <= 1e-9);
    CHECK(rel_diff(fs.kurtosis, f.kurtosis) <= 1e-9);
    CHECK(rel_diff(fs.interquartile_range, f.interquartile_range) <= 1e-9);
    CHECK(rel_diff(fs.range, f.range) <= 1e-9);

    std::vector<double> scaled = sample;
    for (double& v : scaled) v *= 3.0;
    const FirstOrderFeatures fc = extract_first_order(scaled);
    CHECK(rel_diff(fc.mean, 3.0 * f.mean) <= 1e-12);
    CHECK(rel_diff(fc.variance, 9.0 * f.variance) <= 1e-12);
    CHECK(rel_diff(fc.skewness, f.skewness) <= 1e-9);
    CHECK(rel_diff(fc.kurtosis, f.kurtosis) <= 1e-9);
    CHECK(rel_diff(fc.mean_absolute_deviation, 3.0 * f.mean_absolute_deviation) <= 1e-12);
}

}  // TEST_SUITE
