// Classical-quantum model combination: elementwise means, a stacked logistic
// meta-learner over out-of-fold base scores, and the score/feature diversity
// report.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/dataset.hpp"
#include "qdr/linear.hpp"

namespace qdr {

inline std::vector<double> means_ensemble(const std::vector<double>& classical,
                                          const std::vector<double>& quantum) {
    if (classical.size() != quantum.size()) {
        throw validation_error("means_ensemble: score lengths differ");
    }
    std::vector<double> out(classical.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (classical[i] + quantum[i]);
    return out;
}

enum class score_provenance { out_of_fold, in_sample };

// Two-column base scores with their provenance recorded, so the stacking
// leakage guard is enforceable at the type level.
struct base_scores {
    std::vector<double> classical;
    std::vector<double> quantum;
    score_provenance provenance = score_provenance::in_sample;

    std::vector<double> as_features() const {
        std::vector<double> out(classical.size() * 2);
        for (std::size_t i = 0; i < classical.size(); ++i) {
            out[2 * i] = classical[i];
            out[2 * i + 1] = quantum[i];
        }
        return out;
    }
};

// Stacking meta-learner: logistic regression over the two base probability
// columns. Training scores must be out-of-fold CV predictions; in-sample
// scores leak the base models' training fit and are rejected unless
// explicitly overridden.
inline logistic_model meta_ensemble_fit(const base_scores& train_scores,
                                        const std::vector<int>& labels,
                                        double inverse_regularization,
                                        bool allow_in_sample = false) {
    if (train_scores.classical.size() != labels.size() ||
        train_scores.quantum.size() != labels.size()) {
        throw validation_error("meta_ensemble_fit: score/label lengths differ");
    }
    if (train_scores.provenance == score_provenance::in_sample && !allow_in_sample) {
        throw validation_error(
            "meta_ensemble_fit: refusing in-sample base scores (stacking leakage); "
            "pass out-of-fold predictions or override explicitly");
    }
    dataset meta_train;
    meta_train.num_rows = labels.size();
    meta_train.num_features = 2;
    meta_train.features = train_scores.as_features();
    meta_train.labels = labels;
    meta_train.weights.assign(labels.size(), 1.0);
    meta_train.feature_names = {"classical_score", "quantum_score"};
    return logreg_fit(meta_train, inverse_regularization);
}

inline std::vector<double> meta_ensemble_predict(const logistic_model& model,
                                                 const base_scores& test_scores) {
    return logreg_predict_proba(model, test_scores.as_features(), 2);
}

struct feature_mean_comparison {
    std::size_t feature = 0;
    std::string name;
    double classical_mean = 0.0;
    double quantum_mean = 0.0;
};

struct diversity_report_data {
    double score_correlation = 0.0;          // Pearson, in [-1, 1]
    double top_k_jaccard = 0.0;              // agreement of the two top-k sets
    std::size_t k = 0;
    std::vector<feature_mean_comparison> feature_comparison;  // ranked by |diff|
};

namespace detail {

inline std::vector<std::size_t> top_k_rows(const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(k);
    return order;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

}  // namespace detail

// Quantifies classical/quantum disagreement: score correlation, per-feature
// means over each model's top-k rows (ranked by absolute difference), and
// the Jaccard agreement of the two top-k sets. `features` should hold the
// scaled feature matrix the comparison is reported in.
inline diversity_report_data diversity_report(const std::vector<double>& classical_scores,
                                              const std::vector<double>& quantum_scores,
                                              const std::vector<double>& features,
                                              std::size_t num_features,
                                              const std::vector<std::string>& feature_names,
                                              std::size_t k = 100) {
    const std::size_t m = classical_scores.size();
    if (quantum_scores.size() != m) {
        throw validation_error("diversity_report: score lengths differ");
    }
    if (k > m) throw validation_error("diversity_report: k exceeds row count");

    diversity_report_data report;
    report.k = k;
    report.score_correlation = detail::pearson(classical_scores, quantum_scores);

    const auto top_c = detail::top_k_rows(classical_scores, k);
    const auto top_q = detail::top_k_rows(quantum_scores, k);
    std::vector<char> in_c(m, 0), in_q(m, 0);
    for (auto r : top_c) in_c[r] = 1;
    for (auto r : top_q) in_q[r] = 1;
    std::size_t inter = 0, uni = 0;
    for (std::size_t r = 0; r < m; ++r) {
        if (in_c[r] && in_q[r]) ++inter;
        if (in_c[r] || in_q[r]) ++uni;
    }
    report.top_k_jaccard = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);

    report.feature_comparison.resize(num_features);
    for (std::size_t c = 0; c < num_features; ++c) {
        auto& cmp = report.feature_comparison[c];
        cmp.feature = c;
        cmp.name = c < feature_names.size() ? feature_names[c] : "f" + std::to_string(c);
        for (auto r : top_c) cmp.classical_mean += features[r * num_features + c];
        for (auto r : top_q) cmp.quantum_mean += features[r * num_features + c];
        cmp.classical_mean /= static_cast<double>(k);
        cmp.quantum_mean /= static_cast<double>(k);
    }
    std::stable_sort(report.feature_comparison.begin(), report.feature_comparison.end(),
                     [](const feature_mean_comparison& a, const feature_mean_comparison& b) {
                         return std::abs(a.classical_mean - a.quantum_mean) >
                                std::abs(b.classical_mean - b.quantum_mean);
                     });
    return report;
}

}  // namespace qdr
