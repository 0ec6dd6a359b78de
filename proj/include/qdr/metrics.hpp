// Ranking metrics for the default-prediction task: weighted normalized Gini,
// default capture rate within the top 4% of cumulative weight, their mean
// (the composite default-risk score), and threshold/rank classification
// metrics.
//
// Ranking convention everywhere: scores descending, ties broken by ascending
// original index. The 4% boundary row is excluded (inclusion requires
// cumulative weight <= budget). Capture-rate numerators count positives
// unweighted; weights enter only through the budget.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qdr/common.hpp"

namespace qdr {

inline constexpr double kNegativeLabelWeight = 20.0;
inline constexpr double kPositiveLabelWeight = 1.0;
inline constexpr double kCaptureBudgetFraction = 0.04;

struct scored_predictions {
    std::vector<double> scores;
    std::vector<int> labels;
    std::vector<double> weights;  // 20 for label 0, 1 for label 1

    scored_predictions(std::vector<double> scores_in, std::vector<int> labels_in)
        : scores(std::move(scores_in)), labels(std::move(labels_in)) {
        if (scores.size() != labels.size()) {
            throw validation_error("scored_predictions: scores/labels length mismatch");
        }
        weights.resize(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] != 0 && labels[i] != 1) {
                throw validation_error("scored_predictions: labels must be 0 or 1");
            }
            weights[i] = labels[i] == 0 ? kNegativeLabelWeight : kPositiveLabelWeight;
        }
    }

    std::size_t size() const { return scores.size(); }
};

namespace detail {

inline std::vector<std::size_t> ranking_order(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

// Raw weighted Gini of a given ranking: twice the trapezoidal area under the
// Lorenz curve (cumulative positive-count fraction vs cumulative weight
// fraction), minus one.
inline double raw_weighted_gini(const scored_predictions& p,
                                const std::vector<std::size_t>& order) {
    double total_weight = 0.0;
    double total_pos = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        total_weight += p.weights[i];
        total_pos += p.labels[i];
    }
    double cum_w = 0.0, cum_pos = 0.0, area = 0.0;
    double prev_y = 0.0;
    for (const std::size_t idx : order) {
        const double dx = p.weights[idx] / total_weight;
        cum_pos += p.labels[idx];
        const double y = cum_pos / total_pos;
        area += dx * 0.5 * (y + prev_y);
        prev_y = y;
        cum_w += p.weights[idx];
    }
    (void)cum_w;
    return 2.0 * area - 1.0;
}

}  // namespace detail

inline double normalized_weighted_gini(const scored_predictions& p) {
    bool has_pos = false, has_neg = false;
    for (int label : p.labels) (label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw validation_error("normalized_weighted_gini: need both classes");
    }
    const double raw = detail::raw_weighted_gini(p, detail::ranking_order(p.scores));
    std::vector<double> perfect_scores(p.labels.begin(), p.labels.end());
    const double perfect =
        detail::raw_weighted_gini(p, detail::ranking_order(perfect_scores));
    return raw / perfect;
}

inline double capture_rate_at_4pct(const scored_predictions& p) {
    double total_weight = 0.0;
    double total_pos = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        total_weight += p.weights[i];
        total_pos += p.labels[i];
    }
    if (total_pos == 0.0) throw validation_error("capture_rate_at_4pct: no positives");
    const double budget = kCaptureBudgetFraction * total_weight;
    double cum_w = 0.0;
    double captured = 0.0;
    for (const std::size_t idx : detail::ranking_order(p.scores)) {
        cum_w += p.weights[idx];
        if (cum_w > budget) break;
        captured += p.labels[idx];
    }
    return captured / total_pos;
}

inline double cdr(const scored_predictions& p) {
    return 0.5 * (normalized_weighted_gini(p) + capture_rate_at_4pct(p));
}

struct classification_metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

// Rank-statistic AUC with ties averaged (Mann-Whitney).
inline double auc_score(const std::vector<double>& scores, const std::vector<int>& labels) {
    double pos = 0.0, neg = 0.0;
    for (int label : labels) (label ? pos : neg) += 1.0;
    if (pos == 0.0 || neg == 0.0) throw validation_error("auc_score: need both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    return (rank_sum_pos - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

inline classification_metrics standard_metrics(const scored_predictions& p,
                                               double threshold = 0.5) {
    classification_metrics m;
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool predicted = p.scores[i] >= threshold;
        if (predicted && p.labels[i]) ++tp;
        else if (predicted && !p.labels[i]) ++fp;
        else if (!predicted && p.labels[i]) ++fn;
        else ++tn;
    }
    const double total = tp + tn + fp + fn;
    m.accuracy = (tp + tn) / total;
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                      : 0.0;
    m.auc = auc_score(p.scores, p.labels);
    return m;
}

}  // namespace qdr
