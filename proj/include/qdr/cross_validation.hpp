// Stratified k-fold splitting and seeded exhaustive hyperparameter search.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/dataset.hpp"

namespace qdr {

struct fold_split {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
};

// Seeded shuffle within each class, then round-robin dealing: per-fold class
// counts stay within one sample of the global proportions.
inline std::vector<fold_split> stratified_kfold(const std::vector<int>& labels, int k,
                                                std::uint64_t seed) {
    if (k < 2) throw validation_error("stratified_kfold: k must be >= 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] ? pos : neg).push_back(i);
    }
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
        throw validation_error("stratified_kfold: each class needs at least k members");
    }
    rng_engine rng(derive_seed(seed, 0xf01d));
    detail::seeded_shuffle(pos, rng);
    detail::seeded_shuffle(neg, rng);

    std::vector<std::vector<std::size_t>> fold_members(k);
    for (std::size_t i = 0; i < pos.size(); ++i) fold_members[i % k].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) fold_members[i % k].push_back(neg[i]);

    std::vector<fold_split> folds(k);
    for (int fold = 0; fold < k; ++fold) {
        folds[fold].validation_indices = fold_members[fold];
        for (int other = 0; other < k; ++other) {
            if (other == fold) continue;
            folds[fold].train_indices.insert(folds[fold].train_indices.end(),
                                             fold_members[other].begin(),
                                             fold_members[other].end());
        }
        std::sort(folds[fold].train_indices.begin(), folds[fold].train_indices.end());
        std::sort(folds[fold].validation_indices.begin(),
                  folds[fold].validation_indices.end());
    }
    return folds;
}

using param_map = std::map<std::string, double>;

// Trains on the first dataset, returns scores for the second.
using fit_score_fn = std::function<std::vector<double>(const dataset&, const dataset&)>;
// Builds a pipeline for one hyperparameter candidate.
using pipeline_factory = std::function<fit_score_fn(const param_map&)>;
// Higher is better.
using metric_fn = std::function<double(const std::vector<double>&, const dataset&)>;

struct search_candidate_result {
    param_map params;
    double metric_mean = 0.0;
    double metric_stddev = 0.0;
};

struct search_result {
    search_candidate_result best;
    std::size_t best_index = 0;
    std::vector<search_candidate_result> all;
};

// Cartesian product of per-parameter value lists, in deterministic
// lexicographic order of parameter names.
inline std::vector<param_map> grid_candidates(
    const std::map<std::string, std::vector<double>>& grid) {
    std::vector<param_map> candidates{param_map{}};
    for (const auto& [name, values] : grid) {
        if (values.empty()) throw validation_error("grid_candidates: empty list for " + name);
        std::vector<param_map> expanded;
        expanded.reserve(candidates.size() * values.size());
        for (const auto& base : candidates) {
            for (const double v : values) {
                param_map next = base;
                next[name] = v;
                expanded.push_back(std::move(next));
            }
        }
        candidates = std::move(expanded);
    }
    return candidates;
}

// Evaluates every candidate by k-fold cross-validation on the metric and
// returns the argmax of the mean; ties keep the lowest candidate index.
inline search_result hyper_search(const pipeline_factory& factory,
                                  const std::vector<param_map>& candidates, const dataset& data,
                                  int k, std::uint64_t seed, const metric_fn& metric) {
    if (candidates.empty()) throw validation_error("hyper_search: empty candidate space");
    const auto folds = stratified_kfold(data.labels, k, seed);

    search_result result;
    result.all.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        auto pipeline = factory(candidates[c]);
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& fold : folds) {
            const dataset fold_train = data.take_rows(fold.train_indices);
            const dataset fold_val = data.take_rows(fold.validation_indices);
            const auto scores = pipeline(fold_train, fold_val);
            const double value = metric(scores, fold_val);
            sum += value;
            sum_sq += value * value;
        }
        const double mean = sum / k;
        const double variance = std::max(0.0, sum_sq / k - mean * mean);
        result.all[c] = {candidates[c], mean, std::sqrt(variance)};
    }
    result.best_index = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c) {
        if (result.all[c].metric_mean > result.all[result.best_index].metric_mean) {
            result.best_index = c;
        }
    }
    result.best = result.all[result.best_index];
    return result;
}

}  // namespace qdr
