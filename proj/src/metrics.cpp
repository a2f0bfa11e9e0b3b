#include "csme/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace csme {

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("truth/predicted length mismatch");
    }
    if (truth.empty()) throw std::invalid_argument("empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if ((truth[i] != 0 && truth[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
            throw std::invalid_argument("labels must be 0 or 1");
        }
        if (truth[i] == 1) {
            predicted[i] == 1 ? ++cm.tp : ++cm.fn;
        } else {
            predicted[i] == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

Summary summary(const ConfusionMatrix& cm) {
    const std::size_t pos = cm.tp + cm.fn;
    const std::size_t neg = cm.tn + cm.fp;
    if (pos == 0 || neg == 0) {
        throw std::runtime_error("a class is absent from ground truth");
    }
    Summary s;
    s.se = static_cast<double>(cm.tp) / static_cast<double>(pos);
    s.sp = static_cast<double>(cm.tn) / static_cast<double>(neg);
    s.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(pos + neg);
    return s;
}

RocCurve roc_curve(std::span<const int> truth, std::span<const double> scores) {
    if (truth.size() != scores.size()) {
        throw std::invalid_argument("truth/scores length mismatch");
    }
    RocCurve curve;
    for (int t : truth) {
        if (t == 1) {
            ++curve.n_pos;
        } else if (t == 0) {
            ++curve.n_neg;
        } else {
            throw std::invalid_argument("labels must be 0 or 1");
        }
    }
    if (curve.n_pos == 0 || curve.n_neg == 0) {
        throw std::runtime_error("single-class ground truth");
    }

    std::vector<std::size_t> order(truth.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Descending sweep: the point at threshold t counts samples with score > t,
    // so each group of tied scores is emitted before being consumed.
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double t = scores[order[i]];
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(curve.n_neg),
                                static_cast<double>(tp) / static_cast<double>(curve.n_pos), t});
        while (i < order.size() && scores[order[i]] == t) {
            truth[order[i]] == 1 ? ++tp : ++fp;
            ++i;
        }
    }
    curve.points.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
    return curve;
}

double auc(const RocCurve& curve) {
    if (curve.points.size() < 2) throw std::invalid_argument("curve needs at least two points");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

namespace {

OperatingPoint make_point(const RocCurve& curve, const RocPoint& p) {
    OperatingPoint op;
    op.threshold = p.threshold;
    op.se = p.tpr;
    op.sp = 1.0 - p.fpr;
    const double total = static_cast<double>(curve.n_pos + curve.n_neg);
    if (total > 0.0) {
        op.accuracy = (p.tpr * static_cast<double>(curve.n_pos) +
                       (1.0 - p.fpr) * static_cast<double>(curve.n_neg)) /
                      total;
    } else {
        op.accuracy = 0.5 * (op.se + op.sp);  // class counts unknown
    }
    return op;
}

}  // namespace

OperatingPoint operating_point_a(const RocCurve& curve) {
    if (curve.points.empty()) throw std::invalid_argument("empty curve");
    const RocPoint* best = &curve.points.front();
    for (const auto& p : curve.points) {
        const double y = p.tpr - p.fpr;
        const double best_y = best->tpr - best->fpr;
        if (y > best_y || (y == best_y && (p.tpr > best->tpr ||
                                           (p.tpr == best->tpr && p.threshold < best->threshold)))) {
            best = &p;
        }
    }
    return make_point(curve, *best);
}

OperatingPoint operating_point_b(const RocCurve& curve, double min_se) {
    if (curve.points.empty()) throw std::invalid_argument("empty curve");
    if (!(min_se >= 0.0 && min_se <= 1.0)) {
        throw std::invalid_argument("min_se must be in [0,1]");
    }
    const RocPoint* best = nullptr;
    for (const auto& p : curve.points) {
        if (p.tpr < min_se) continue;
        if (best == nullptr || p.fpr < best->fpr ||
            (p.fpr == best->fpr && p.tpr > best->tpr)) {
            best = &p;
        }
    }
    if (best == nullptr) throw std::runtime_error("no curve point meets min_se");
    return make_point(curve, *best);
}

double improvement_pi(double j_prime, double j_star_mean) {
    if (!(j_prime > 0.0)) throw std::invalid_argument("j_prime must be > 0");
    return (j_prime - j_star_mean) / j_prime * 100.0;
}

double reduction_xi(std::size_t n, double xi_avg) {
    if (n == 0) throw std::invalid_argument("n must be > 0");
    if (!(xi_avg >= 0.0 && xi_avg <= static_cast<double>(n))) {
        throw std::invalid_argument("xi_avg must be in [0, n]");
    }
    return (static_cast<double>(n) - xi_avg) / static_cast<double>(n) * 100.0;
}

double expected_cost(const OperatingPoint& op, double prevalence, double cost_fn,
                     double cost_fp) {
    if (!(prevalence >= 0.0 && prevalence <= 1.0)) {
        throw std::invalid_argument("prevalence must be in [0,1]");
    }
    return cost_fn * prevalence * (1.0 - op.se) + cost_fp * (1.0 - prevalence) * (1.0 - op.sp);
}

void save_roc_csv(const RocCurve& curve, const std::string& path) {
    std::string out = "fpr,tpr,threshold\n";
    char buf[32];
    auto append = [&](double v, char sep) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, res.ptr);
        out += sep;
    };
    for (const auto& p : curve.points) {
        append(p.fpr, ',');
        append(p.tpr, ',');
        append(p.threshold, '\n');
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error(path + ": cannot open file for writing");
    file << out;
    if (!file) throw std::runtime_error(path + ": write failed");
}

}  // namespace csme
