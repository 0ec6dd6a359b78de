// Preprocessing for the quantum pipeline: median imputation, min-max scaling
// into an angle-safe range (default [0.3, 0.8], avoiding equivalent rotation
// angles for distinct values), and seeded feature-order shuffling.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/dataset.hpp"

namespace qdr {

struct scaler_params {
    std::vector<double> col_min;
    std::vector<double> col_max;
    double lo = 0.3;
    double hi = 0.8;
};

// Column minima/maxima from training data only; missing cells are ignored.
// Constant (or all-missing) columns map to the midpoint.
inline scaler_params fit_minmax(const dataset& train, double lo = 0.3, double hi = 0.8) {
    if (train.num_rows == 0) throw validation_error("fit_minmax: empty training set");
    if (!(hi > lo)) throw validation_error("fit_minmax: range upper bound must exceed lower");
    scaler_params params;
    params.lo = lo;
    params.hi = hi;
    params.col_min.assign(train.num_features, std::numeric_limits<double>::infinity());
    params.col_max.assign(train.num_features, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < train.num_rows; ++r) {
        for (std::size_t c = 0; c < train.num_features; ++c) {
            const double v = train.at(r, c);
            if (is_missing(v)) continue;
            params.col_min[c] = std::min(params.col_min[c], v);
            params.col_max[c] = std::max(params.col_max[c], v);
        }
    }
    return params;
}

// Linear map onto [lo, hi]; test values outside the training range
// extrapolate (no clipping). Missing values pass through.
inline std::vector<double> transform_minmax(const scaler_params& params,
                                            const std::vector<double>& features,
                                            std::size_t num_features) {
    if (num_features != params.col_min.size()) {
        throw validation_error("transform_minmax: feature count mismatch");
    }
    std::vector<double> out(features.size());
    const std::size_t rows = features.size() / num_features;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < num_features; ++c) {
            const double v = features[r * num_features + c];
            if (is_missing(v)) {
                out[r * num_features + c] = v;
                continue;
            }
            const double span = params.col_max[c] - params.col_min[c];
            if (!std::isfinite(span) || span == 0.0) {
                out[r * num_features + c] = 0.5 * (params.lo + params.hi);
            } else {
                out[r * num_features + c] =
                    params.lo + (v - params.col_min[c]) * (params.hi - params.lo) / span;
            }
        }
    }
    return out;
}

// Per-column training medians (lower median for even counts); columns with no
// observed values impute to 0.
struct impute_params {
    std::vector<double> medians;
};

inline impute_params fit_median_impute(const dataset& train) {
    impute_params params;
    params.medians.assign(train.num_features, 0.0);
    std::vector<double> column;
    for (std::size_t c = 0; c < train.num_features; ++c) {
        column.clear();
        for (std::size_t r = 0; r < train.num_rows; ++r) {
            const double v = train.at(r, c);
            if (!is_missing(v)) column.push_back(v);
        }
        if (column.empty()) continue;
        const std::size_t mid = (column.size() - 1) / 2;
        std::nth_element(column.begin(), column.begin() + mid, column.end());
        params.medians[c] = column[mid];
    }
    return params;
}

inline std::vector<double> transform_impute(const impute_params& params,
                                            const std::vector<double>& features,
                                            std::size_t num_features) {
    std::vector<double> out = features;
    const std::size_t rows = features.size() / num_features;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < num_features; ++c) {
            if (is_missing(out[r * num_features + c])) {
                out[r * num_features + c] = params.medians[c];
            }
        }
    }
    return out;
}

struct feature_permutation {
    std::vector<std::size_t> order;  // new column c reads old column order[c]
    std::uint64_t seed = 0;

    std::vector<std::size_t> inverse() const {
        std::vector<std::size_t> inv(order.size());
        for (std::size_t c = 0; c < order.size(); ++c) inv[order[c]] = c;
        return inv;
    }
};

inline feature_permutation make_feature_permutation(std::size_t num_features,
                                                    std::uint64_t seed) {
    feature_permutation perm;
    perm.seed = seed;
    perm.order.resize(num_features);
    std::iota(perm.order.begin(), perm.order.end(), std::size_t{0});
    rng_engine rng(derive_seed(seed, 0x5f1e));
    for (std::size_t i = num_features; i > 1; --i) {
        std::swap(perm.order[i - 1], perm.order[rng_below(rng, i)]);
    }
    return perm;
}

inline std::vector<double> apply_permutation(const feature_permutation& perm,
                                             const std::vector<double>& features,
                                             std::size_t num_features) {
    if (perm.order.size() != num_features) {
        throw validation_error("apply_permutation: feature count mismatch");
    }
    std::vector<double> out(features.size());
    const std::size_t rows = features.size() / num_features;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < num_features; ++c) {
            out[r * num_features + c] = features[r * num_features + perm.order[c]];
        }
    }
    return out;
}

inline std::pair<std::vector<double>, feature_permutation> shuffle_features(
    const std::vector<double>& features, std::size_t num_features, std::uint64_t seed) {
    auto perm = make_feature_permutation(num_features, seed);
    auto shuffled = apply_permutation(perm, features, num_features);
    return {std::move(shuffled), std::move(perm)};
}

}  // namespace qdr
