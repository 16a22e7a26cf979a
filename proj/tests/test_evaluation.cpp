#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "oracles.hpp"
#include "retiomics/evaluation.hpp"
#include "retiomics/rng.hpp"

using namespace retiomics;
using namespace retiomics::evaluation;

namespace {

std::vector<std::string> make_patients(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("P" + std::to_string(100 + i));
    return out;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("grouped_kfold partitions patients with balanced folds") {
    const auto patients = make_patients(23);
    const FoldPlan plan = grouped_kfold(patients, 5, 4, 42);
    REQUIRE(plan.outer.size() == patients.size());
    std::map<int, int> fold_sizes;
    for (const auto& [id, f] : plan.outer) {
        CHECK(f >= 0);
        CHECK(f < 5);
        fold_sizes[f]++;
    }
    REQUIRE(fold_sizes.size() == 5);
    for (const auto& [f, n] : fold_sizes) {
        CHECK(n >= 23 / 5);
        CHECK(n <= 23 / 5 + 1);
    }

    // inner folds partition exactly the outer-train patients of each fold
    REQUIRE(plan.inner.size() == 5);
    for (int f = 0; f < 5; ++f) {
        const auto& inner = plan.inner[static_cast<std::size_t>(f)];
        std::size_t expected = 0;
        for (const auto& [id, of] : plan.outer) {
            if (of != f) {
                ++expected;
                REQUIRE(inner.count(id) == 1);
                CHECK(inner.at(id) >= 0);
                CHECK(inner.at(id) < 4);
            } else {
                CHECK(inner.count(id) == 0);
            }
        }
        CHECK(inner.size() == expected);
    }

    // determinism and seed sensitivity
    CHECK(grouped_kfold(patients, 5, 4, 42).outer == plan.outer);
    CHECK(grouped_kfold(patients, 5, 4, 43).outer != plan.outer);
}

TEST_CASE("stratified folding balances each class to within one patient") {
    const auto patients = make_patients(20);
    std::map<std::string, int> labels;
    for (int i = 0; i < 20; ++i) labels[patients[static_cast<std::size_t>(i)]] = i < 7 ? 1 : 0;
    const FoldPlan plan = grouped_kfold(patients, 5, 4, 9, true, labels);
    std::map<int, std::array<int, 2>> per_fold;
    for (const auto& [id, f] : plan.outer) {
        per_fold[f][static_cast<std::size_t>(labels.at(id))]++;
    }
    for (const auto& [f, counts] : per_fold) {
        CHECK(counts[1] >= 1);  // 7 positives over 5 folds -> 1 or 2 each
        CHECK(counts[1] <= 2);
        CHECK(counts[0] >= 2);  // 13 negatives over 5 folds -> 2 or 3 each
        CHECK(counts[0] <= 3);
    }
}

TEST_CASE("grouped_kfold input validation") {
    CHECK_THROWS_AS(grouped_kfold(make_patients(10), 1, 4, 0), UsageError);
    CHECK_THROWS_AS(grouped_kfold(make_patients(10), 5, 1, 0), UsageError);
    CHECK_THROWS_AS(grouped_kfold(make_patients(4), 5, 4, 0), DataError);
    std::vector<std::string> dup = {"A", "B", "A"};
    CHECK_THROWS_AS(grouped_kfold(dup, 2, 2, 0), UsageError);
    std::map<std::string, int> empty_labels;
    CHECK_THROWS_AS(grouped_kfold(make_patients(10), 2, 2, 0, true, empty_labels), UsageError);
}

TEST_CASE("auc counts ties at half credit") {
    const std::vector<double> perfect = {1, 2, 3, 4};
    const std::vector<int> labels = {0, 0, 1, 1};
    CHECK(auc(perfect, labels) == 1.0);
    const std::vector<double> inverted = {4, 3, 2, 1};
    CHECK(auc(inverted, labels) == 0.0);
    const std::vector<double> tied = {1, 1, 1, 1};
    CHECK(auc(tied, labels) == 0.5);
    const std::vector<double> mixed = {1, 2, 2, 3};
    // pairs: (2>1)=1, (2=2)=.5, (3>1)=1, (3>2)=1 -> 3.5/4
    CHECK(auc(mixed, labels) == doctest::Approx(0.875));
}

TEST_CASE("auc equals exhaustive pair counting on random ties-heavy data") {
    Rng rng(314);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 4 + rng.uniform_int(60);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        labels[0] = 0;
        labels[1] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.uniform_int(8));  // heavy ties
            if (i >= 2) labels[i] = rng.bernoulli(0.4) ? 1 : 0;
        }
        CHECK(auc(scores, labels) == oracles::auc_pairs(scores, labels));
    }
}

TEST_CASE("roc_curve sweeps distinct thresholds from (0,0)") {
    const std::vector<double> scores = {0.9, 0.8, 0.7};
    const std::vector<int> labels = {1, 0, 1};
    const RocCurve curve = roc_curve(scores, labels);
    REQUIRE(curve.fpr.size() == 4);
    CHECK(curve.fpr[0] == 0.0);
    CHECK(curve.tpr[0] == 0.0);
    CHECK(std::isinf(curve.threshold[0]));
    CHECK(curve.fpr == std::vector<double>{0, 0, 1, 1});
    CHECK(curve.tpr == std::vector<double>{0, 0.5, 0.5, 1});
    CHECK(curve.area() == doctest::Approx(0.5));
    CHECK(curve.area() == doctest::Approx(auc(scores, labels)).epsilon(1e-12));

    // tied scores collapse into a single point
    const std::vector<double> tied = {0.5, 0.5, 0.1};
    const std::vector<int> tl = {1, 0, 0};
    const RocCurve tc = roc_curve(tied, tl);
    CHECK(tc.fpr.size() == 3);  // (0,0), the tie block, then (1,1)
}

TEST_CASE("trapezoid area equals the pairwise auc on random data") {
    Rng rng(2718);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 6 + rng.uniform_int(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        labels[0] = 0;
        labels[1] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.uniform_int(6));
            if (i >= 2) labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        }
        const RocCurve curve = roc_curve(scores, labels);
        CHECK(std::fabs(curve.area() - auc(scores, labels)) <= 1e-12);
    }
}

TEST_CASE("mean_roc vertically averages on the 101-point grid") {
    // perfect classifier: (0,0) -> (0,1) -> (1,1)
    RocCurve perfect;
    perfect.fpr = {0, 0, 1};
    perfect.tpr = {0, 1, 1};
    // diagonal: (0,0) -> (1,1)
    RocCurve diagonal;
    diagonal.fpr = {0, 1};
    diagonal.tpr = {0, 1};

    const RocCurve mean_one = mean_roc({perfect});
    REQUIRE(mean_one.fpr.size() == 101);
    CHECK(mean_one.tpr.front() == 1.0);  // maximal TPR at FPR=0
    CHECK(mean_one.tpr.back() == 1.0);

    const RocCurve mean_two = mean_roc({perfect, diagonal});
    CHECK(mean_two.fpr[50] == doctest::Approx(0.5));
    CHECK(mean_two.tpr[50] == doctest::Approx(0.75));  // (1.0 + 0.5) / 2
    CHECK(mean_two.threshold.empty());
    CHECK(mean_two.tpr[0] == doctest::Approx(0.5));    // (1.0 + 0.0) / 2
}

TEST_CASE("delong worked example") {
    const std::vector<int> labels = {1, 1, 0, 0};
    const std::vector<double> a = {3, 4, 1, 2};
    const std::vector<double> b = {2, 4, 1, 3};
    const DeLongResult r = delong_paired(a, b, labels);
    CHECK(r.auc_a == 1.0);
    CHECK(r.auc_b == 0.75);
    CHECK(r.var_diff == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(r.z == doctest::Approx(0.7071).epsilon(1e-3));
    CHECK(r.p == doctest::Approx(0.4795).epsilon(1e-3));
}

TEST_CASE("delong antisymmetry and identical-score degeneracy") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 8 + rng.uniform_int(40);
        std::vector<double> a(n), b(n);
        std::vector<int> labels(n);
        labels[0] = labels[1] = 1;
        labels[2] = labels[3] = 0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform(0, 1);
            b[i] = rng.uniform(0, 1);
            if (i >= 4) labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        }
        const DeLongResult fwd = delong_paired(a, b, labels);
        const DeLongResult rev = delong_paired(b, a, labels);
        CHECK(fwd.z == doctest::Approx(-rev.z).epsilon(1e-12));
        CHECK(fwd.p == doctest::Approx(rev.p).epsilon(1e-12));

        const DeLongResult same = delong_paired(a, a, labels);
        CHECK(same.var_diff == 0.0);
        CHECK(same.z == 0.0);
        CHECK(same.p == 1.0);
    }
}

TEST_CASE("delong requires two samples per class") {
    const std::vector<int> labels = {1, 0, 0};
    const std::vector<double> s = {0.3, 0.2, 0.1};
    CHECK_THROWS_AS(delong_paired(s, s, labels), DataError);
}

TEST_CASE("normal_cdf reference points") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_cdf(-8.0) < 1e-14);
    CHECK(normal_cdf(8.0) > 1.0 - 1e-14);
}

}  // TEST_SUITE
