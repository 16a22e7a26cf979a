#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "retiomics/common.hpp"

namespace retiomics::evaluation {

/// Patient-level fold assignments for the double k-m-fold scheme. Both eyes
/// of a patient always share every assignment because the unit is the
/// patient id.
struct FoldPlan {
    int k = 5;
    int m = 4;
    std::uint64_t seed = 0;
    bool stratified = false;
    std::map<std::string, int> outer;                // patient -> outer fold
    std::vector<std::map<std::string, int>> inner;   // [outer fold] patient -> inner fold
};

/// Seed-deterministic shuffle then round-robin by patient. When stratified,
/// the shuffle-and-deal runs class by class (labels required) so every fold
/// holds each class within +-1 patient.
FoldPlan grouped_kfold(const std::vector<std::string>& patients, int k, int m,
                       std::uint64_t seed, bool stratified = false,
                       const std::map<std::string, int>& patient_labels = {});

/// Mann-Whitney estimator with 0.5 credit for ties; computed via midranks,
/// which equals exhaustive pair counting bit-for-bit.
double auc(std::span<const double> scores, std::span<const int> labels);

struct RocCurve {
    std::vector<double> fpr;
    std::vector<double> tpr;
    std::vector<double> threshold;  // empty for averaged curves

    double area() const;  // trapezoidal
};

/// Threshold sweep through the distinct scores, descending; starts at (0,0).
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

/// Vertical averaging on the fixed FPR grid {0, 0.01, ..., 1.00}. At each
/// grid point every curve contributes its maximal TPR at that FPR
/// (interpolating across horizontal segments).
RocCurve mean_roc(const std::vector<RocCurve>& curves);

struct DeLongResult {
    double auc_a = 0.0;
    double auc_b = 0.0;
    double var_diff = 0.0;
    double z = 0.0;
    double p = 1.0;
};

/// Paired DeLong test on scores for the same eyes under the same labels.
DeLongResult delong_paired(std::span<const double> scores_a, std::span<const double> scores_b,
                           std::span<const int> labels);

double normal_cdf(double z);

}  // namespace retiomics::evaluation
