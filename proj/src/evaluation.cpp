#include "retiomics/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "retiomics/rng.hpp"

namespace retiomics::evaluation {

namespace {

void check_both_classes(std::span<const int> labels) {
    bool has0 = false, has1 = false;
    for (int v : labels) {
        if (v == 0) has0 = true;
        else if (v == 1) has1 = true;
        else throw DataError("labels must be 0/1, got " + std::to_string(v));
    }
    if (!has0 || !has1) throw DataError("both classes must be present");
}

// Round-robin assignment of an already shuffled patient list.
void deal(const std::vector<std::string>& shuffled, int folds, std::map<std::string, int>& out,
          std::size_t& counter) {
    for (const auto& id : shuffled) {
        out[id] = static_cast<int>(counter % static_cast<std::size_t>(folds));
        ++counter;
    }
}

std::vector<std::string> shuffled_ids(std::vector<std::string> ids, std::uint64_t seed) {
    std::sort(ids.begin(), ids.end());
    Rng rng(seed);
    rng.shuffle(ids);
    return ids;
}

}  // namespace

FoldPlan grouped_kfold(const std::vector<std::string>& patients, int k, int m,
                       std::uint64_t seed, bool stratified,
                       const std::map<std::string, int>& patient_labels) {
    if (k < 2 || m < 2) throw UsageError("fold counts k and m must both be >= 2");
    std::set<std::string> unique(patients.begin(), patients.end());
    if (unique.size() != patients.size()) {
        throw UsageError("grouped_kfold expects unique patient ids");
    }
    if (patients.size() < static_cast<std::size_t>(k)) {
        throw DataError("need at least k=" + std::to_string(k) + " patients, have " +
                        std::to_string(patients.size()));
    }
    FoldPlan plan;
    plan.k = k;
    plan.m = m;
    plan.seed = seed;
    plan.stratified = stratified;

    auto assign = [&](const std::vector<std::string>& ids, int folds, std::uint64_t s,
                      std::map<std::string, int>& out) {
        if (!stratified) {
            std::size_t counter = 0;
            deal(shuffled_ids(ids, s), folds, out, counter);
            return;
        }
        // Class by class with a running counter, so overall fold sizes stay
        // balanced and every class splits within +-1.
        std::set<int> classes;
        for (const auto& id : ids) {
            auto it = patient_labels.find(id);
            if (it == patient_labels.end()) {
                throw UsageError("stratified folding is missing a label for patient " + id);
            }
            classes.insert(it->second);
        }
        std::size_t counter = 0;
        for (int cls : classes) {
            std::vector<std::string> members;
            for (const auto& id : ids) {
                if (patient_labels.at(id) == cls) members.push_back(id);
            }
            deal(shuffled_ids(members, derive_seed(s, "class", static_cast<std::uint64_t>(cls))),
                 folds, out, counter);
        }
    };

    std::vector<std::string> all(unique.begin(), unique.end());
    assign(all, k, derive_seed(seed, "outer"), plan.outer);

    plan.inner.resize(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        std::vector<std::string> train;
        for (const auto& id : all) {
            if (plan.outer.at(id) != f) train.push_back(id);
        }
        if (train.size() < static_cast<std::size_t>(m)) {
            throw DataError("outer fold " + std::to_string(f) + " leaves fewer than m=" +
                            std::to_string(m) + " training patients");
        }
        assign(train, m, derive_seed(seed, "inner", static_cast<std::uint64_t>(f)),
               plan.inner[static_cast<std::size_t>(f)]);
    }
    return plan;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DataError("auc: score/label length mismatch");
    check_both_classes(labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        // 1-based midrank shared by the tie block [i, j].
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            if (labels[order[t]] == 1) {
                pos_rank_sum += rank;
                ++n_pos;
            }
        }
        i = j + 1;
    }
    const std::size_t n_neg = n - n_pos;
    const double m = static_cast<double>(n_pos);
    return (pos_rank_sum - m * (m + 1.0) / 2.0) / (m * static_cast<double>(n_neg));
}

double RocCurve::area() const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < fpr.size(); ++i) {
        total += (fpr[i + 1] - fpr[i]) * 0.5 * (tpr[i] + tpr[i + 1]);
    }
    return total;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DataError("roc_curve: score/label length mismatch");
    check_both_classes(labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double n_pos = 0, n_neg = 0;
    for (int v : labels) (v == 1 ? n_pos : n_neg) += 1.0;

    RocCurve curve;
    curve.fpr.push_back(0.0);
    curve.tpr.push_back(0.0);
    curve.threshold.push_back(std::numeric_limits<double>::infinity());
    double tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        const double t = scores[order[i]];
        while (i < n && scores[order[i]] == t) {
            (labels[order[i]] == 1 ? tp : fp) += 1.0;
            ++i;
        }
        curve.fpr.push_back(fp / n_neg);
        curve.tpr.push_back(tp / n_pos);
        curve.threshold.push_back(t);
    }
    return curve;
}

RocCurve mean_roc(const std::vector<RocCurve>& curves) {
    if (curves.empty()) throw DataError("mean_roc needs at least one curve");
    RocCurve mean;
    for (int g = 0; g <= 100; ++g) {
        const double x = static_cast<double>(g) / 100.0;
        double total = 0.0;
        for (const auto& curve : curves) {
            // Highest point with fpr <= x; interpolate toward the next point
            // when x falls inside a horizontal segment.
            std::size_t lo = 0;
            for (std::size_t i = 0; i < curve.fpr.size(); ++i) {
                if (curve.fpr[i] <= x) lo = i;
            }
            double t;
            if (curve.fpr[lo] == x || lo + 1 >= curve.fpr.size()) {
                t = curve.tpr[lo];
            } else {
                const double x0 = curve.fpr[lo], x1 = curve.fpr[lo + 1];
                const double y0 = curve.tpr[lo], y1 = curve.tpr[lo + 1];
                t = y0 + (x - x0) / (x1 - x0) * (y1 - y0);
            }
            total += t;
        }
        mean.fpr.push_back(x);
        mean.tpr.push_back(total / static_cast<double>(curves.size()));
    }
    return mean;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

DeLongResult delong_paired(std::span<const double> scores_a, std::span<const double> scores_b,
                           std::span<const int> labels) {
    if (scores_a.size() != scores_b.size() || scores_a.size() != labels.size()) {
        throw DataError("delong_paired: input lengths differ");
    }
    check_both_classes(labels);
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(i);
    }
    const std::size_t m = pos.size(), n = neg.size();
    if (m < 2 || n < 2) {
        throw DataError("delong_paired needs at least 2 samples per class");
    }

    auto psi = [](double sp, double sn) { return sp > sn ? 1.0 : (sp == sn ? 0.5 : 0.0); };

    // Structural components per curve.
    auto components = [&](std::span<const double> s, std::vector<double>& v10,
                          std::vector<double>& v01) {
        v10.assign(m, 0.0);
        v01.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double val = psi(s[pos[i]], s[neg[j]]);
                v10[i] += val;
                v01[j] += val;
            }
        }
        for (auto& v : v10) v /= static_cast<double>(n);
        for (auto& v : v01) v /= static_cast<double>(m);
    };

    std::vector<double> v10a, v01a, v10b, v01b;
    components(scores_a, v10a, v01a);
    components(scores_b, v10b, v01b);

    DeLongResult out;
    for (double v : v10a) out.auc_a += v;
    out.auc_a /= static_cast<double>(m);
    for (double v : v10b) out.auc_b += v;
    out.auc_b /= static_cast<double>(m);

    auto covariance = [](std::span<const double> x, std::span<const double> y, double mx,
                         double my) {
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) total += (x[i] - mx) * (y[i] - my);
        return total / static_cast<double>(x.size() - 1);
    };

    const double s10_aa = covariance(v10a, v10a, out.auc_a, out.auc_a);
    const double s10_bb = covariance(v10b, v10b, out.auc_b, out.auc_b);
    const double s10_ab = covariance(v10a, v10b, out.auc_a, out.auc_b);
    const double s01_aa = covariance(v01a, v01a, out.auc_a, out.auc_a);
    const double s01_bb = covariance(v01b, v01b, out.auc_b, out.auc_b);
    const double s01_ab = covariance(v01a, v01b, out.auc_a, out.auc_b);

    out.var_diff = (s10_aa + s10_bb - 2.0 * s10_ab) / static_cast<double>(m) +
                   (s01_aa + s01_bb - 2.0 * s01_ab) / static_cast<double>(n);
    if (out.var_diff < 0.0) out.var_diff = 0.0;  // numeric guard
    if (out.var_diff == 0.0) {
        out.z = 0.0;
        out.p = 1.0;
    } else {
        out.z = (out.auc_a - out.auc_b) / std::sqrt(out.var_diff);
        out.p = 2.0 * (1.0 - normal_cdf(std::abs(out.z)));
    }
    return out;
}

}  // namespace retiomics::evaluation
