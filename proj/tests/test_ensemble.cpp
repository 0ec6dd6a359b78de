#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qdr/dataset.hpp"
#include "qdr/ensemble.hpp"
#include "qdr/metrics.hpp"

using namespace qdr;

TEST_CASE("means ensemble averages elementwise") {
    REQUIRE(means_ensemble({0.2}, {0.8}) == std::vector<double>{0.5});
    const std::vector<double> same{0.1, 0.6, 0.9};
    REQUIRE(means_ensemble(same, same) == same);
    REQUIRE_THROWS_AS(means_ensemble({0.1}, {0.1, 0.2}), validation_error);
}

TEST_CASE("means ensemble brackets its inputs rowwise") {
    rng_engine rng(44);
    std::vector<double> a(500), b(500);
    for (std::size_t i = 0; i < 500; ++i) {
        a[i] = rng_u01(rng);
        b[i] = rng_u01(rng);
    }
    const auto mean = means_ensemble(a, b);
    for (std::size_t i = 0; i < 500; ++i) {
        REQUIRE(mean[i] >= std::min(a[i], b[i]));
        REQUIRE(mean[i] <= std::max(a[i], b[i]));
    }
}

TEST_CASE("meta ensemble refuses in-sample base scores") {
    base_scores scores;
    scores.classical = {0.2, 0.8, 0.3, 0.7};
    scores.quantum = {0.3, 0.7, 0.2, 0.9};
    scores.provenance = score_provenance::in_sample;
    const std::vector<int> labels{0, 1, 0, 1};
    REQUIRE_THROWS_AS(meta_ensemble_fit(scores, labels, 0.2), validation_error);
    // Explicit override is allowed.
    REQUIRE_NOTHROW(meta_ensemble_fit(scores, labels, 0.2, true));
}

namespace {

base_scores make_oof_scores(std::size_t m, std::uint64_t seed, std::vector<int>* labels_out) {
    rng_engine rng(seed);
    base_scores scores;
    scores.provenance = score_provenance::out_of_fold;
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) {
        labels[i] = rng_u01(rng) < 0.3 ? 1 : 0;
        const double signal = labels[i] ? 0.65 : 0.35;
        scores.classical.push_back(std::clamp(signal + 0.3 * (rng_u01(rng) - 0.5), 0.0, 1.0));
        scores.quantum.push_back(std::clamp(signal + 0.3 * (rng_u01(rng) - 0.5), 0.0, 1.0));
    }
    *labels_out = labels;
    return scores;
}

}  // namespace

TEST_CASE("meta ensemble over a constant quantum column preserves classical ranking") {
    std::vector<int> labels;
    auto scores = make_oof_scores(400, 7, &labels);
    std::fill(scores.quantum.begin(), scores.quantum.end(), 0.5);

    const auto model = meta_ensemble_fit(scores, labels, 0.2);
    base_scores test = scores;  // reuse as stand-in test scores
    const auto meta = meta_ensemble_predict(model, test);

    // The meta model is a monotone transform of the classical column, so the
    // rank metric is preserved exactly.
    const double meta_cdr = cdr(scored_predictions(meta, labels));
    const double classical_cdr = cdr(scored_predictions(scores.classical, labels));
    REQUIRE(meta_cdr == Catch::Approx(classical_cdr).margin(1e-12));
}

TEST_CASE("meta ensemble over identical columns matches the means ensemble ranking") {
    std::vector<int> labels;
    auto scores = make_oof_scores(400, 8, &labels);
    scores.quantum = scores.classical;

    const auto model = meta_ensemble_fit(scores, labels, 0.04);
    const auto meta = meta_ensemble_predict(model, scores);
    const auto means = means_ensemble(scores.classical, scores.quantum);
    REQUIRE(cdr(scored_predictions(meta, labels)) ==
            Catch::Approx(cdr(scored_predictions(means, labels))).margin(1e-12));
}

TEST_CASE("meta ensemble improves on degenerate base models it can reweight") {
    // Classical column carries all the signal, quantum column is noise; the
    // meta learner should not do worse than the plain mean.
    std::vector<int> labels;
    auto scores = make_oof_scores(600, 9, &labels);
    rng_engine rng(10);
    for (auto& q : scores.quantum) q = rng_u01(rng);

    const auto model = meta_ensemble_fit(scores, labels, 0.2);
    const auto meta = meta_ensemble_predict(model, scores);
    const double meta_auc = auc_score(meta, labels);
    const double means_auc = auc_score(means_ensemble(scores.classical, scores.quantum), labels);
    REQUIRE(meta_auc >= means_auc - 1e-9);
}

TEST_CASE("diversity report on identical scores") {
    std::vector<double> scores(120);
    std::vector<double> features(120 * 2);
    rng_engine rng(3);
    for (std::size_t i = 0; i < 120; ++i) {
        scores[i] = rng_u01(rng);
        features[2 * i] = rng_u01(rng);
        features[2 * i + 1] = rng_u01(rng);
    }
    const auto report =
        diversity_report(scores, scores, features, 2, {"a", "b"}, 100);
    REQUIRE(report.score_correlation == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(report.top_k_jaccard == 1.0);
    for (const auto& cmp : report.feature_comparison) {
        REQUIRE(cmp.classical_mean == cmp.quantum_mean);
    }
}

TEST_CASE("diversity report on anti-ranked scores") {
    std::vector<double> scores(200), anti(200);
    std::vector<double> features(200);
    rng_engine rng(5);
    for (std::size_t i = 0; i < 200; ++i) {
        scores[i] = rng_u01(rng);
        anti[i] = 1.0 - scores[i];
        features[i] = scores[i];
    }
    const auto report = diversity_report(scores, anti, features, 1, {"f"}, 50);
    REQUIRE(report.score_correlation <= 0.0);
    REQUIRE(report.top_k_jaccard <= 0.1);
    REQUIRE(report.feature_comparison[0].classical_mean >
            report.feature_comparison[0].quantum_mean);
}

TEST_CASE("diversity report ranks features by mean difference and validates k") {
    std::vector<double> classical{0.9, 0.1, 0.8, 0.2};
    std::vector<double> quantum{0.1, 0.9, 0.2, 0.8};
    // Feature 0 separates the two top sets, feature 1 is identical.
    std::vector<double> features{1.0, 5.0, 0.0, 5.0, 1.0, 5.0, 0.0, 5.0};
    const auto report = diversity_report(classical, quantum, features, 2, {"sep", "flat"}, 2);
    REQUIRE(report.feature_comparison[0].name == "sep");
    REQUIRE(report.feature_comparison[1].name == "flat");
    REQUIRE(report.feature_comparison[1].classical_mean ==
            report.feature_comparison[1].quantum_mean);
    REQUIRE_THROWS_AS(diversity_report(classical, quantum, features, 2, {}, 10),
                      validation_error);
}
