#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "csme/metrics.hpp"
#include "csme/rng.hpp"
#include "oracles.hpp"

using namespace csme;

namespace {

// Random score/label set with deliberate ties (scores snap to a small grid).
std::pair<std::vector<int>, std::vector<double>> random_scored_set(std::size_t n,
                                                                   rng::SplitMix64& gen) {
    std::vector<int> truth(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        truth[i] = gen.next_bool() ? 1 : 0;
        scores[i] = static_cast<double>(gen.next_below(8)) / 7.0;
    }
    truth[0] = 1;
    truth[1] = 0;
    return {truth, scores};
}

}  // namespace

TEST_CASE("confusion counts the four cells") {
    const std::vector<int> t1 = {1, 0};
    const std::vector<int> p1 = {1, 0};
    ConfusionMatrix cm = confusion(t1, p1);
    CHECK(cm.tp == 1);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);

    const std::vector<int> p2 = {0, 1};
    cm = confusion(t1, p2);
    CHECK(cm.fn == 1);
    CHECK(cm.fp == 1);

    const std::vector<int> longer = {1, 0, 1};
    CHECK_THROWS_AS(confusion(t1, longer), std::invalid_argument);
    CHECK_THROWS_AS(confusion(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("confusion agrees with the counting oracle on random pairs") {
    rng::SplitMix64 gen(55);
    std::vector<int> truth(50);
    std::vector<int> predicted(50);
    for (int trial = 0; trial < 20; ++trial) {
        for (auto& v : truth) v = gen.next_bool() ? 1 : 0;
        for (auto& v : predicted) v = gen.next_bool() ? 1 : 0;
        const ConfusionMatrix a = confusion(truth, predicted);
        const ConfusionMatrix b = oracle::confusion_counting(truth, predicted);
        CHECK(a.tp == b.tp);
        CHECK(a.fp == b.fp);
        CHECK(a.tn == b.tn);
        CHECK(a.fn == b.fn);
    }
}

TEST_CASE("summary reproduces the reconstructed test-set metrics") {
    // 368 test samples: tp=60, fn=33, tn=256, fp=19.
    const Summary s = summary({.tp = 60, .fp = 19, .tn = 256, .fn = 33});
    CHECK(std::abs(s.se - 0.6452) <= 5e-5);
    CHECK(std::abs(s.sp - 0.9309) <= 5e-5);
    CHECK(std::abs(s.accuracy - 0.8587) <= 5e-5);
}

TEST_CASE("summary symmetry and perfection") {
    const Summary even = summary({.tp = 5, .fp = 5, .tn = 5, .fn = 5});
    CHECK(even.se == 0.5);
    CHECK(even.sp == 0.5);
    CHECK(even.accuracy == 0.5);

    const Summary perfect = summary({.tp = 7, .fp = 0, .tn = 13, .fn = 0});
    CHECK(perfect.se == 1.0);
    CHECK(perfect.sp == 1.0);
    CHECK(perfect.accuracy == 1.0);

    CHECK_THROWS_WITH_AS(summary({.tp = 0, .fp = 2, .tn = 3, .fn = 0}),
                         doctest::Contains("absent"), std::runtime_error);
}

TEST_CASE("summary of a self-confusion is perfect") {
    rng::SplitMix64 gen(9);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> truth(30);
        for (auto& v : truth) v = gen.next_bool() ? 1 : 0;
        truth[0] = 1;
        truth[1] = 0;
        const Summary s = summary(confusion(truth, truth));
        CHECK(s.se == 1.0);
        CHECK(s.sp == 1.0);
        CHECK(s.accuracy == 1.0);
    }
}

TEST_CASE("roc_curve endpoints and shapes") {
    SUBCASE("perfect separation passes through (0,1)") {
        const std::vector<int> truth = {1, 1, 0, 0};
        const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
        const RocCurve curve = roc_curve(truth, scores);
        CHECK(curve.points.front().fpr == 0.0);
        CHECK(curve.points.front().tpr == 0.0);
        CHECK(curve.points.back().fpr == 1.0);
        CHECK(curve.points.back().tpr == 1.0);
        bool hits_corner = false;
        for (const auto& p : curve.points) hits_corner |= p.fpr == 0.0 && p.tpr == 1.0;
        CHECK(hits_corner);
    }
    SUBCASE("identical scores collapse to the diagonal") {
        const std::vector<int> truth = {1, 0, 1, 0};
        const std::vector<double> scores = {0.4, 0.4, 0.4, 0.4};
        const RocCurve curve = roc_curve(truth, scores);
        REQUIRE(curve.points.size() == 2);
        CHECK(curve.points[0].fpr == 0.0);
        CHECK(curve.points[0].tpr == 0.0);
        CHECK(curve.points[1].fpr == 1.0);
        CHECK(curve.points[1].tpr == 1.0);
    }
    SUBCASE("3-NN style score grid, hand-enumerated") {
        const std::vector<int> truth = {1, 1, 0, 0, 1, 0};
        const std::vector<double> scores = {1.0, 2.0 / 3.0, 2.0 / 3.0,
                                            1.0 / 3.0, 1.0 / 3.0, 0.0};
        const RocCurve curve = roc_curve(truth, scores);
        REQUIRE(curve.points.size() == 5);  // 4 distinct scores + final endpoint
        CHECK(curve.points[0].fpr == 0.0);
        CHECK(curve.points[0].tpr == 0.0);
        CHECK(curve.points[1].fpr == 0.0);
        CHECK(curve.points[1].tpr == doctest::Approx(1.0 / 3.0));
        CHECK(curve.points[2].fpr == doctest::Approx(1.0 / 3.0));
        CHECK(curve.points[2].tpr == doctest::Approx(2.0 / 3.0));
        CHECK(curve.points[3].fpr == doctest::Approx(2.0 / 3.0));
        CHECK(curve.points[3].tpr == 1.0);
        CHECK(curve.points[4].fpr == 1.0);
        CHECK(curve.points[4].tpr == 1.0);
    }
    SUBCASE("single-class input is rejected") {
        const std::vector<int> truth = {1, 1};
        const std::vector<double> scores = {0.2, 0.7};
        CHECK_THROWS_WITH_AS(roc_curve(truth, scores), doctest::Contains("single-class"),
                             std::runtime_error);
    }
}

TEST_CASE("roc_curve is monotone in both coordinates") {
    rng::SplitMix64 gen(512);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [truth, scores] = random_scored_set(5 + gen.next_below(60), gen);
        const RocCurve curve = roc_curve(truth, scores);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
            CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        }
        const double area = auc(curve);
        CHECK(area >= 0.0);
        CHECK(area <= 1.0);
    }
}

TEST_CASE("auc basics") {
    const std::vector<int> perfect_truth = {1, 1, 0, 0};
    const std::vector<double> perfect_scores = {0.9, 0.8, 0.2, 0.1};
    CHECK(auc(roc_curve(perfect_truth, perfect_scores)) == 1.0);

    const std::vector<int> flat_truth = {1, 0};
    const std::vector<double> flat_scores = {0.4, 0.4};
    CHECK(auc(roc_curve(flat_truth, flat_scores)) == 0.5);

    // Positives score {0.9, 0.4}, negatives {0.6, 0.1}: 3 of 4 pairs concordant.
    const std::vector<int> truth = {1, 1, 0, 0};
    const std::vector<double> scores = {0.9, 0.4, 0.6, 0.1};
    CHECK(auc(roc_curve(truth, scores)) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("trapezoidal auc equals the concordance statistic") {
    rng::SplitMix64 gen(2718);
    for (int trial = 0; trial < 200; ++trial) {
        const auto [truth, scores] = random_scored_set(5 + gen.next_below(96), gen);
        const double trapezoid = auc(roc_curve(truth, scores));
        const double concordance = oracle::auc_concordance(truth, scores);
        CHECK(std::abs(trapezoid - concordance) <= 1e-12);
    }
}

TEST_CASE("operating point A maximizes Youden's index") {
    SUBCASE("perfect classifier") {
        const std::vector<int> truth = {1, 1, 0, 0};
        const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
        const OperatingPoint a = operating_point_a(roc_curve(truth, scores));
        CHECK(a.se == 1.0);
        CHECK(a.sp == 1.0);
        CHECK(a.accuracy == 1.0);
    }
    SUBCASE("flat curve resolves ties toward the high-tpr end") {
        const std::vector<int> truth = {1, 0};
        const std::vector<double> scores = {0.4, 0.4};
        const OperatingPoint a = operating_point_a(roc_curve(truth, scores));
        CHECK(a.se == 1.0);
        CHECK(a.sp == 0.0);
    }
    SUBCASE("matches the brute-force scan on random curves") {
        rng::SplitMix64 gen(31337);
        for (int trial = 0; trial < 50; ++trial) {
            const auto [truth, scores] = random_scored_set(8 + gen.next_below(40), gen);
            const RocCurve curve = roc_curve(truth, scores);
            const RocPoint expected = oracle::youden_argmax(curve);
            const OperatingPoint a = operating_point_a(curve);
            CHECK(a.se == expected.tpr);
            CHECK(a.sp == 1.0 - expected.fpr);
            CHECK(a.threshold == expected.threshold);
        }
    }
}

TEST_CASE("operating point B minimizes FPR above the sensitivity floor") {
    SUBCASE("perfect classifier at min_se 0.95") {
        const std::vector<int> truth = {1, 1, 0, 0};
        const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
        const OperatingPoint b = operating_point_b(roc_curve(truth, scores), 0.95);
        CHECK(b.se == 1.0);
        CHECK(b.sp == 1.0);
    }
    SUBCASE("min_se boundary 0 returns the best tpr at the lowest fpr") {
        const std::vector<int> truth = {1, 1, 0, 0};
        const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
        const OperatingPoint b = operating_point_b(roc_curve(truth, scores), 0.0);
        CHECK(b.sp == 1.0);
        CHECK(b.se == 1.0);  // fpr 0 is attainable with tpr up to 1 here
    }
    SUBCASE("matches the brute-force scan on random curves") {
        rng::SplitMix64 gen(40432);
        for (int trial = 0; trial < 50; ++trial) {
            const auto [truth, scores] = random_scored_set(8 + gen.next_below(40), gen);
            const RocCurve curve = roc_curve(truth, scores);
            const RocPoint expected = oracle::min_fpr_above(curve, 0.95);
            const OperatingPoint b = operating_point_b(curve, 0.95);
            CHECK(b.se == expected.tpr);
            CHECK(b.sp == 1.0 - expected.fpr);
            CHECK(b.threshold == expected.threshold);
        }
    }
    SUBCASE("invalid min_se rejected") {
        const std::vector<int> truth = {1, 0};
        const std::vector<double> scores = {0.8, 0.2};
        CHECK_THROWS_AS(operating_point_b(roc_curve(truth, scores), 1.5),
                        std::invalid_argument);
    }
}

TEST_CASE("curve and operating point A ignore monotone score transforms") {
    rng::SplitMix64 gen(808);
    for (int trial = 0; trial < 20; ++trial) {
        const auto [truth, scores] = random_scored_set(10 + gen.next_below(30), gen);
        std::vector<double> transformed(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            transformed[i] = std::exp(3.0 * scores[i]) + 2.0;
        }
        const RocCurve a = roc_curve(truth, scores);
        const RocCurve b = roc_curve(truth, transformed);
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i].fpr == b.points[i].fpr);
            CHECK(a.points[i].tpr == b.points[i].tpr);
        }
        const OperatingPoint pa = operating_point_a(a);
        const OperatingPoint pb = operating_point_a(b);
        CHECK(pa.se == pb.se);
        CHECK(pa.sp == pb.sp);
    }
}

TEST_CASE("improvement_pi reproduces published percentages") {
    CHECK(std::abs(improvement_pi(0.0566, 0.0323) - 42.9) <= 0.05);
    CHECK(std::abs(improvement_pi(0.0436, 0.0339) - 22.2) <= 0.05);

    // Exact formula outputs, frozen by hand arithmetic.
    CHECK(improvement_pi(0.0566, 0.0323) ==
          doctest::Approx((0.0566 - 0.0323) / 0.0566 * 100.0).epsilon(1e-12));
    CHECK(improvement_pi(1.0, 1.0) == 0.0);
    CHECK(improvement_pi(0.25, 0.25) == 0.0);
    CHECK_THROWS_AS(improvement_pi(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(improvement_pi(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("reduction_xi reproduces published percentages") {
    CHECK(std::abs(reduction_xi(1000, 483.3) - 51.7) <= 0.05);
    CHECK(std::abs(reduction_xi(1000, 538.2) - 46.2) <= 0.05);
    CHECK(reduction_xi(12, 12.0) == 0.0);
    CHECK_THROWS_AS(reduction_xi(0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(reduction_xi(10, 11.0), std::invalid_argument);
    CHECK_THROWS_AS(reduction_xi(10, -1.0), std::invalid_argument);
}

TEST_CASE("expected cost weights misses by prevalence") {
    const OperatingPoint perfect{.threshold = 0.5, .se = 1.0, .sp = 1.0, .accuracy = 1.0};
    CHECK(expected_cost(perfect, 0.015, 1.0, 1.0) == 0.0);

    const OperatingPoint op{.threshold = 0.5, .se = 0.9, .sp = 0.8, .accuracy = 0.85};
    const double expected = 1.0 * 0.015 * 0.1 + 1.0 * 0.985 * 0.2;
    CHECK(expected_cost(op, 0.015, 1.0, 1.0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK_THROWS_AS(expected_cost(op, 1.5, 1.0, 1.0), std::invalid_argument);
}
