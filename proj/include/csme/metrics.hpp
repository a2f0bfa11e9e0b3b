#pragma once

#include <span>
#include <string>
#include <vector>

namespace csme {

/// Minority (label 1) is the positive class throughout.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

struct Summary {
    double se = 0.0;        // sensitivity, tp / (tp + fn)
    double sp = 0.0;        // specificity, tn / (tn + fp)
    double accuracy = 0.0;  // (tp + tn) / total
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

/// Threshold-sweep ROC: one point per distinct score (prediction positive iff
/// score > threshold) plus the (1,1) endpoint. Points are ordered by
/// ascending (fpr, tpr); the first is always (0,0). Class counts are kept so
/// operating points can report accuracy.
struct RocCurve {
    std::vector<RocPoint> points;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct OperatingPoint {
    double threshold = 0.0;
    double se = 0.0;
    double sp = 0.0;
    double accuracy = 0.0;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

Summary summary(const ConfusionMatrix& cm);

RocCurve roc_curve(std::span<const int> truth, std::span<const double> scores);

/// Trapezoidal area under the curve. Equals the Mann-Whitney concordance
/// statistic (ties weighted 0.5) for curves built by roc_curve.
double auc(const RocCurve& curve);

/// Best equal-cost compromise: the point maximizing Youden's index
/// (tpr - fpr); ties go to higher tpr, then lower threshold.
OperatingPoint operating_point_a(const RocCurve& curve);

/// High-sensitivity point: lowest fpr among points with tpr >= min_se, ties
/// to higher tpr. Used when disease prevalence is low and false negatives
/// cost more than false positives.
OperatingPoint operating_point_b(const RocCurve& curve, double min_se);

/// Relative criterion improvement of the selected subsets over the full set,
/// in percent: (j_prime - j_star_mean) / j_prime * 100.
double improvement_pi(double j_prime, double j_star_mean);

/// Relative cardinality reduction in percent: (n - xi_avg) / n * 100.
double reduction_xi(std::size_t n, double xi_avg);

/// Expected misclassification cost at an operating point, for prevalence pi:
/// cost_fn * pi * (1 - SE) + cost_fp * (1 - pi) * (1 - SP).
double expected_cost(const OperatingPoint& op, double prevalence, double cost_fn,
                     double cost_fp);

/// Writes `fpr,tpr,threshold` rows (with header) for external plotting.
void save_roc_csv(const RocCurve& curve, const std::string& path);

}  // namespace csme
