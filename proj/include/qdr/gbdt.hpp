// Gradient-boosted trees with second-order logistic-loss boosting: exact
// greedy splits on presorted columns, ridge term fixed at lambda = 1, split
// gain gated by `gamma` and child hessian sums by `min_child_weight`,
// seeded per-tree row/column subsampling, and learned default directions
// for missing values.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/dataset.hpp"

namespace qdr {

struct gbdt_params {
    double learning_rate = 0.3;
    int n_estimators = 100;
    int max_depth = 4;
    double min_child_weight = 1.0;
    double subsample = 1.0;
    double colsample_bytree = 1.0;
    double gamma = 0.0;

    void validate() const {
        if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
            throw validation_error("gbdt: learning_rate must lie in (0, 1]");
        }
        if (n_estimators < 0) throw validation_error("gbdt: n_estimators must be >= 0");
        if (max_depth < 1) throw validation_error("gbdt: max_depth must be >= 1");
        if (!(subsample > 0.0 && subsample <= 1.0) ||
            !(colsample_bytree > 0.0 && colsample_bytree <= 1.0)) {
            throw validation_error("gbdt: subsample fractions must lie in (0, 1]");
        }
        if (min_child_weight < 0.0) throw validation_error("gbdt: min_child_weight must be >= 0");
        if (gamma < 0.0) throw validation_error("gbdt: gamma must be >= 0");
    }
};

inline constexpr double kGbdtRidge = 1.0;  // fixed L2 term in the split gain

struct gbdt_node {
    int feature = -1;         // -1 marks a leaf
    double threshold = 0.0;   // value < threshold goes left
    bool default_left = true; // route for missing values
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;  // log-odds increment, shrinkage included
};

struct gbdt_tree {
    std::vector<gbdt_node> nodes;

    double predict_row(const double* row) const {
        int at = 0;
        while (nodes[at].feature >= 0) {
            const double v = row[nodes[at].feature];
            const bool go_left = is_missing(v) ? nodes[at].default_left : v < nodes[at].threshold;
            at = go_left ? nodes[at].left : nodes[at].right;
        }
        return nodes[at].leaf_value;
    }
};

struct gbdt_model {
    gbdt_params params;
    std::size_t num_features = 0;
    double base_score = 0.0;  // log-odds of the weighted class prior
    std::vector<gbdt_tree> trees;
    std::vector<double> train_loss;    // weighted logistic loss after each round
    std::vector<double> feature_gain;  // accumulated split gain per feature
};

namespace detail {

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

inline double log1p_exp(double z) {  // ln(1 + e^z), overflow safe
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct split_candidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool default_left = true;
    bool valid = false;
};

inline double split_gain(double gl, double hl, double g, double h, double min_child_weight,
                         double gamma) {
    const double gr = g - gl;
    const double hr = h - hl;
    if (hl < min_child_weight || hr < min_child_weight) {
        return -std::numeric_limits<double>::infinity();
    }
    return 0.5 * (gl * gl / (hl + kGbdtRidge) + gr * gr / (hr + kGbdtRidge) -
                  g * g / (h + kGbdtRidge)) -
           gamma;
}

}  // namespace detail

inline gbdt_model gbdt_fit(const dataset& train, const gbdt_params& params, std::uint64_t seed) {
    params.validate();
    train.validate();
    const std::size_t m = train.num_rows;
    const std::size_t f = train.num_features;
    const std::size_t pos = train.positives();
    if (pos == 0 || pos == m) {
        throw validation_error("gbdt_fit: training set must contain both classes");
    }

    gbdt_model model;
    model.params = params;
    model.num_features = f;
    model.feature_gain.assign(f, 0.0);

    double w_pos = 0.0, w_neg = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        (train.labels[i] ? w_pos : w_neg) += train.weights[i];
    }
    model.base_score = std::log(w_pos / w_neg);

    // Presorted non-missing row indices per feature, missing rows separately.
    std::vector<std::vector<std::uint32_t>> sorted(f);
    std::vector<std::vector<std::uint32_t>> missing(f);
    for (std::size_t c = 0; c < f; ++c) {
        auto& idx = sorted[c];
        for (std::size_t r = 0; r < m; ++r) {
            (is_missing(train.at(r, c)) ? missing[c] : idx).push_back(
                static_cast<std::uint32_t>(r));
        }
        std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
            return train.at(a, c) < train.at(b, c);
        });
    }

    std::vector<double> margin(m, model.base_score);
    std::vector<double> grad(m), hess(m);
    std::vector<int> node_of(m);          // current node id; -1 = not in tree sample
    std::vector<int> slot_of_node;        // node id -> active slot at current level

    auto weighted_loss = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            loss += train.weights[i] *
                    (detail::log1p_exp(margin[i]) - train.labels[i] * margin[i]);
        }
        return loss;
    };

    for (int round = 0; round < params.n_estimators; ++round) {
        rng_engine tree_rng(derive_seed(seed, 0x9bd7, static_cast<std::uint64_t>(round)));

        for (std::size_t i = 0; i < m; ++i) {
            const double p = detail::sigmoid(margin[i]);
            grad[i] = train.weights[i] * (p - train.labels[i]);
            hess[i] = train.weights[i] * p * (1.0 - p);
        }

        // Row sample (Bernoulli per row) and column sample (without replacement).
        std::fill(node_of.begin(), node_of.end(), -1);
        for (std::size_t i = 0; i < m; ++i) {
            if (params.subsample >= 1.0 || rng_u01(tree_rng) < params.subsample) node_of[i] = 0;
        }
        std::vector<std::uint32_t> columns(f);
        std::iota(columns.begin(), columns.end(), 0u);
        if (params.colsample_bytree < 1.0) {
            const std::size_t take = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(params.colsample_bytree * f)));
            for (std::size_t i = 0; i < take; ++i) {
                std::swap(columns[i], columns[i + rng_below(tree_rng, f - i)]);
            }
            columns.resize(take);
            std::sort(columns.begin(), columns.end());
        }

        gbdt_tree tree;
        tree.nodes.emplace_back();
        std::vector<int> level_nodes{0};

        for (int depth = 0; depth < params.max_depth && !level_nodes.empty(); ++depth) {
            const std::size_t slots = level_nodes.size();
            slot_of_node.assign(tree.nodes.size(), -1);
            for (std::size_t s = 0; s < slots; ++s) slot_of_node[level_nodes[s]] = static_cast<int>(s);

            std::vector<double> g_total(slots, 0.0), h_total(slots, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                if (node_of[i] < 0) continue;
                const int s = slot_of_node[node_of[i]];
                if (s < 0) continue;
                g_total[s] += grad[i];
                h_total[s] += hess[i];
            }

            std::vector<std::size_t> row_count(slots, 0);
            for (std::size_t i = 0; i < m; ++i) {
                if (node_of[i] < 0) continue;
                const int s = slot_of_node[node_of[i]];
                if (s >= 0) ++row_count[s];
            }

            std::vector<detail::split_candidate> best(slots);
            std::vector<double> g_seen(slots), h_seen(slots), g_run(slots), h_run(slots);
            std::vector<std::size_t> count_seen(slots);
            std::vector<double> last_value(slots);
            std::vector<char> has_last(slots);

            for (const std::uint32_t c : columns) {
                // Pass 1: non-missing totals per node, to get missing-block stats.
                std::fill(g_seen.begin(), g_seen.end(), 0.0);
                std::fill(h_seen.begin(), h_seen.end(), 0.0);
                std::fill(count_seen.begin(), count_seen.end(), std::size_t{0});
                for (const std::uint32_t r : sorted[c]) {
                    if (node_of[r] < 0) continue;
                    const int s = slot_of_node[node_of[r]];
                    if (s < 0) continue;
                    g_seen[s] += grad[r];
                    h_seen[s] += hess[r];
                    ++count_seen[s];
                }
                // Pass 2: prefix scan with candidates at value changes.
                std::fill(g_run.begin(), g_run.end(), 0.0);
                std::fill(h_run.begin(), h_run.end(), 0.0);
                std::fill(has_last.begin(), has_last.end(), 0);
                for (const std::uint32_t r : sorted[c]) {
                    if (node_of[r] < 0) continue;
                    const int s = slot_of_node[node_of[r]];
                    if (s < 0) continue;
                    const double v = train.at(r, c);
                    if (has_last[s] && v > last_value[s]) {
                        const double threshold = 0.5 * (last_value[s] + v);
                        const double g_miss = g_total[s] - g_seen[s];
                        const double h_miss = h_total[s] - h_seen[s];
                        // Missing block on the right…
                        const double gain_r =
                            detail::split_gain(g_run[s], h_run[s], g_total[s], h_total[s],
                                               params.min_child_weight, params.gamma);
                        // …or on the left.
                        const double gain_l = detail::split_gain(
                            g_run[s] + g_miss, h_run[s] + h_miss, g_total[s], h_total[s],
                            params.min_child_weight, params.gamma);
                        const double gain = std::max(gain_l, gain_r);
                        if (gain > 0.0 && gain > best[s].gain) {
                            best[s] = {gain, static_cast<int>(c), threshold, gain_l >= gain_r,
                                       true};
                        }
                    }
                    g_run[s] += grad[r];
                    h_run[s] += hess[r];
                    last_value[s] = v;
                    has_last[s] = 1;
                }
                // Boundary candidate: every non-missing row left, the missing
                // block alone on the right.
                for (std::size_t s = 0; s < slots; ++s) {
                    if (!has_last[s] || count_seen[s] == row_count[s]) continue;
                    const double gain =
                        detail::split_gain(g_seen[s], h_seen[s], g_total[s], h_total[s],
                                           params.min_child_weight, params.gamma);
                    if (gain > 0.0 && gain > best[s].gain) {
                        const double threshold =
                            std::nextafter(last_value[s], std::numeric_limits<double>::infinity());
                        best[s] = {gain, static_cast<int>(c), threshold, false, true};
                    }
                }
            }

            // Materialize splits; nodes without one become leaves.
            std::vector<int> next_level;
            for (std::size_t s = 0; s < slots; ++s) {
                const int node_id = level_nodes[s];
                if (!best[s].valid) {
                    tree.nodes[node_id].leaf_value =
                        -params.learning_rate * g_total[s] / (h_total[s] + kGbdtRidge);
                    continue;
                }
                model.feature_gain[best[s].feature] += best[s].gain;
                tree.nodes[node_id].feature = best[s].feature;
                tree.nodes[node_id].threshold = best[s].threshold;
                tree.nodes[node_id].default_left = best[s].default_left;
                tree.nodes[node_id].left = static_cast<int>(tree.nodes.size());
                tree.nodes[node_id].right = static_cast<int>(tree.nodes.size() + 1);
                tree.nodes.emplace_back();
                tree.nodes.emplace_back();
                next_level.push_back(tree.nodes[node_id].left);
                next_level.push_back(tree.nodes[node_id].right);
            }

            for (std::size_t i = 0; i < m; ++i) {
                if (node_of[i] < 0) continue;
                const int s = node_of[i] < static_cast<int>(slot_of_node.size())
                                  ? slot_of_node[node_of[i]]
                                  : -1;
                if (s < 0) continue;
                const auto& node = tree.nodes[level_nodes[s]];
                if (node.feature < 0) {
                    node_of[i] = -1;  // settled in a leaf
                } else {
                    const double v = train.at(i, node.feature);
                    const bool go_left = is_missing(v) ? node.default_left : v < node.threshold;
                    node_of[i] = go_left ? node.left : node.right;
                }
            }
            level_nodes = std::move(next_level);
        }

        // Depth cap reached: remaining nodes close as leaves.
        if (!level_nodes.empty()) {
            std::vector<double> g_total(tree.nodes.size(), 0.0), h_total(tree.nodes.size(), 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                if (node_of[i] < 0) continue;
                g_total[node_of[i]] += grad[i];
                h_total[node_of[i]] += hess[i];
            }
            for (const int node_id : level_nodes) {
                tree.nodes[node_id].leaf_value =
                    -params.learning_rate * g_total[node_id] / (h_total[node_id] + kGbdtRidge);
            }
        }

        for (std::size_t i = 0; i < m; ++i) {
            margin[i] += tree.predict_row(train.row(i));
        }
        model.trees.push_back(std::move(tree));
        model.train_loss.push_back(weighted_loss());
    }
    return model;
}

inline std::vector<double> gbdt_predict_proba(const gbdt_model& model,
                                              const std::vector<double>& features,
                                              std::size_t num_features) {
    if (num_features != model.num_features) {
        throw validation_error("gbdt_predict_proba: feature count mismatch");
    }
    const std::size_t rows = features.size() / num_features;
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double margin = model.base_score;
        const double* row = features.data() + r * num_features;
        for (const auto& tree : model.trees) margin += tree.predict_row(row);
        out[r] = detail::sigmoid(margin);
    }
    return out;
}

inline std::vector<double> gbdt_predict_proba(const gbdt_model& model, const dataset& data) {
    return gbdt_predict_proba(model, data.features, data.num_features);
}

// Indices of the k features with the largest accumulated split gain.
inline std::vector<std::size_t> gbdt_top_features(const gbdt_model& model, std::size_t k) {
    std::vector<std::size_t> order(model.feature_gain.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.feature_gain[a] > model.feature_gain[b];
    });
    order.resize(std::min(k, order.size()));
    return order;
}

}  // namespace qdr
