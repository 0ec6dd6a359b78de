#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qdr/metrics.hpp"

using namespace qdr;

TEST_CASE("scored_predictions enforces the 20/1 weight rule") {
    scored_predictions p({0.3, 0.8}, {0, 1});
    REQUIRE(p.weights[0] == 20.0);
    REQUIRE(p.weights[1] == 1.0);
    REQUIRE_THROWS_AS(scored_predictions({0.2}, {0, 1}), validation_error);
    REQUIRE_THROWS_AS(scored_predictions({0.2}, {2}), validation_error);
}

TEST_CASE("normalized weighted gini of perfect and reversed orderings") {
    std::vector<int> labels{1, 0, 0, 1, 0, 0, 0, 1};
    std::vector<double> perfect(labels.begin(), labels.end());
    REQUIRE(normalized_weighted_gini({perfect, labels}) == Catch::Approx(1.0).margin(1e-15));

    std::vector<double> reversed;
    for (int y : labels) reversed.push_back(1.0 - y);
    REQUIRE(normalized_weighted_gini({reversed, labels}) == Catch::Approx(-1.0).margin(1e-15));
}

TEST_CASE("normalized weighted gini hand-enumerated six-row case") {
    // labels  [1, 0, 1, 0, 0, 0], scores [.9, .8, .7, .3, .2, .1],
    // weights [1, 20, 1, 20, 20, 20]; ranking = original order.
    // Total weight 82, positives 2. Lorenz points (cum weight frac, cum
    // positive frac) after each row:
    //   (1/82, 1/2) (21/82, 1/2) (22/82, 1) (42/82, 1) (62/82, 1) (1, 1)
    // Trapezoid area = (0.25 + 10 + 0.75 + 20 + 20 + 20)/82 = 71/82,
    // raw Gini = 2*71/82 - 1 = 60/82.
    // Perfect ordering (rows 0,2 then 1,3,4,5):
    //   area = (0.25 + 0.75 + 80)/82 = 81/82, raw = 80/82.
    // Normalized = (60/82)/(80/82) = 3/4.
    scored_predictions p({0.9, 0.8, 0.7, 0.3, 0.2, 0.1}, {1, 0, 1, 0, 0, 0});
    REQUIRE(normalized_weighted_gini(p) == Catch::Approx(0.75).margin(1e-15));
}

TEST_CASE("gini requires both classes") {
    REQUIRE_THROWS_AS(normalized_weighted_gini({{0.1, 0.2}, {1, 1}}), validation_error);
    REQUIRE_THROWS_AS(normalized_weighted_gini({{0.1, 0.2}, {0, 0}}), validation_error);
}

TEST_CASE("capture rate budget arithmetic") {
    // 50 positives (weight 1) scored highest, then 50 negatives (weight 20).
    // Total weight 1050, budget = 42. The first 42 positives have cumulative
    // weight <= 42; row 43 crosses and is excluded. Rate = 42/50.
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
        scores.push_back(1000.0 - i);
        labels.push_back(1);
    }
    for (int i = 0; i < 50; ++i) {
        scores.push_back(100.0 - i);
        labels.push_back(0);
    }
    scored_predictions p(scores, labels);

    // Independent re-derivation of the budget walk.
    double budget = 0.04 * (50.0 * 1.0 + 50.0 * 20.0);
    double cum = 0.0;
    int expected_fit = 0;
    for (int i = 0; i < 50; ++i) {
        cum += 1.0;
        if (cum > budget) break;
        ++expected_fit;
    }
    REQUIRE(expected_fit == 42);
    REQUIRE(capture_rate_at_4pct(p) == Catch::Approx(42.0 / 50.0).margin(1e-15));
}

TEST_CASE("capture rate edge rules") {
    // All positives ranked last -> 0.
    scored_predictions worst({0.1, 0.2, 0.9, 0.8}, {1, 1, 0, 0});
    REQUIRE(capture_rate_at_4pct(worst) == 0.0);

    // Budget smaller than the first row's weight -> 0 (exclusive boundary).
    scored_predictions tiny({0.9, 0.1}, {1, 0});  // budget = 0.04*21 = 0.84 < 1
    REQUIRE(capture_rate_at_4pct(tiny) == 0.0);

    REQUIRE_THROWS_AS(capture_rate_at_4pct({{0.5, 0.4}, {0, 0}}), validation_error);
}

TEST_CASE("cdr is the mean of gini and capture rate") {
    // Perfect ranking, all positives within the 4% budget: 2 positives with
    // weight 1 against enough negative weight that 0.04*W >= 2.
    std::vector<double> scores{1.0, 0.99};
    std::vector<int> labels{1, 1};
    for (int i = 0; i < 10; ++i) {
        scores.push_back(0.5 - 0.01 * i);
        labels.push_back(0);
    }
    scored_predictions p(scores, labels);  // W = 202, budget = 8.08
    REQUIRE(cdr(p) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("cdr of random scores on unbalanced data is near zero") {
    const std::size_t m = 10000;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        rng_engine rng(derive_seed(1234, seed));
        std::vector<double> scores(m);
        std::vector<int> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            scores[i] = rng_u01(rng);
            labels[i] = i < m / 5 ? 1 : 0;
        }
        const double value = cdr(scored_predictions(scores, labels));
        REQUIRE(std::abs(value) <= 0.05);
    }
}

TEST_CASE("cdr stays within [-0.5, 1]") {
    rng_engine rng(5150);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> scores(200);
        std::vector<int> labels(200);
        int pos = 0;
        for (std::size_t i = 0; i < 200; ++i) {
            scores[i] = rng_u01(rng);
            labels[i] = rng_u01(rng) < 0.3 ? 1 : 0;
            pos += labels[i];
        }
        if (pos == 0 || pos == 200) continue;
        const double value = cdr(scored_predictions(scores, labels));
        REQUIRE(value >= -0.5);
        REQUIRE(value <= 1.0);
    }
}

TEST_CASE("gini and capture rate are rank invariant") {
    rng_engine rng(808);
    std::vector<double> scores(300);
    std::vector<int> labels(300);
    for (std::size_t i = 0; i < 300; ++i) {
        scores[i] = rng_u01(rng);
        labels[i] = rng_u01(rng) < 0.25 ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    scored_predictions base(scores, labels);

    auto exp_scores = scores;
    for (auto& s : exp_scores) s = std::exp(3.0 * s);
    auto affine_scores = scores;
    for (auto& s : affine_scores) s = 0.2 * s + 5.0;

    for (const auto& transformed : {exp_scores, affine_scores}) {
        scored_predictions p(transformed, labels);
        REQUIRE(normalized_weighted_gini(p) == normalized_weighted_gini(base));
        REQUIRE(capture_rate_at_4pct(p) == capture_rate_at_4pct(base));
    }
}

TEST_CASE("gini antisymmetry under ranking reversal") {
    rng_engine rng(4096);
    std::vector<double> scores(150);
    std::vector<int> labels(150);
    for (std::size_t i = 0; i < 150; ++i) {
        scores[i] = rng_u01(rng);  // continuous: ties have measure zero
        labels[i] = rng_u01(rng) < 0.3 ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    auto negated = scores;
    for (auto& s : negated) s = -s;
    const double forward = normalized_weighted_gini({scores, labels});
    const double backward = normalized_weighted_gini({negated, labels});
    REQUIRE(backward == Catch::Approx(-forward).margin(1e-12));
}

TEST_CASE("standard metrics on the hand four-row case") {
    // scores [.9, .6, .4, .1], labels [1, 0, 1, 0], threshold 0.5:
    // predictions [1, 1, 0, 0] -> TP=1 FP=1 FN=1 TN=1:
    // accuracy 1/2, precision 1/2, recall 1/2, F1 1/2.
    // AUC pairs: (.9,.6) ok, (.9,.1) ok, (.4,.6) wrong, (.4,.1) ok -> 3/4.
    scored_predictions p({0.9, 0.6, 0.4, 0.1}, {1, 0, 1, 0});
    const auto m = standard_metrics(p);
    REQUIRE(m.accuracy == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(m.precision == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(m.recall == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(m.f1 == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(m.auc == Catch::Approx(0.75).margin(1e-15));
}

TEST_CASE("standard metrics on perfect and constant scores") {
    scored_predictions perfect({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0});
    const auto mp = standard_metrics(perfect);
    REQUIRE(mp.accuracy == 1.0);
    REQUIRE(mp.precision == 1.0);
    REQUIRE(mp.recall == 1.0);
    REQUIRE(mp.f1 == 1.0);
    REQUIRE(mp.auc == 1.0);

    scored_predictions constant({0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 0});
    REQUIRE(standard_metrics(constant).auc == Catch::Approx(0.5).margin(1e-15));

    REQUIRE_THROWS_AS(auc_score({0.1, 0.4}, {1, 1}), validation_error);
}
