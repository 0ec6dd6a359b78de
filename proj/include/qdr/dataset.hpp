// Labeled, weighted tabular data: CSV ingestion matching the public
// competition schema (id/date columns, prefixed feature names, binary
// target, empty cell = missing), a synthetic stand-in generator with a
// planted signal, and class-balanced / stratified subsampling.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/metrics.hpp"

namespace qdr {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

struct dataset {
    std::size_t num_rows = 0;
    std::size_t num_features = 0;
    std::vector<double> features;  // row-major, NaN = missing
    std::vector<int> labels;       // 1 = default
    std::vector<double> weights;   // CDR rule: 20 for label 0, 1 for label 1
    std::vector<std::string> feature_names;

    double& at(std::size_t row, std::size_t col) { return features[row * num_features + col]; }
    double at(std::size_t row, std::size_t col) const {
        return features[row * num_features + col];
    }
    const double* row(std::size_t r) const { return features.data() + r * num_features; }

    void assign_cdr_weights() {
        weights.resize(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            weights[i] = labels[i] == 0 ? kNegativeLabelWeight : kPositiveLabelWeight;
        }
    }

    std::size_t positives() const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    }

    dataset take_rows(const std::vector<std::size_t>& rows) const {
        dataset out;
        out.num_rows = rows.size();
        out.num_features = num_features;
        out.feature_names = feature_names;
        out.features.reserve(rows.size() * num_features);
        out.labels.reserve(rows.size());
        out.weights.reserve(rows.size());
        for (const std::size_t r : rows) {
            out.features.insert(out.features.end(), row(r), row(r) + num_features);
            out.labels.push_back(labels[r]);
            out.weights.push_back(weights[r]);
        }
        return out;
    }

    void validate() const {
        if (labels.size() != num_rows || weights.size() != num_rows ||
            features.size() != num_rows * num_features) {
            throw validation_error("dataset: inconsistent row counts");
        }
        for (double w : weights) {
            if (!(w > 0.0)) throw validation_error("dataset: weights must be positive");
        }
        for (int label : labels) {
            if (label != 0 && label != 1) throw validation_error("dataset: labels must be 0/1");
        }
    }
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct csv_load_options {
    std::string label_column = "target";
    std::string id_column;    // when set with date_column: keep latest row per id
    std::string date_column;  // lexicographic max (ISO dates)
    std::vector<std::string> drop_columns;
};

struct csv_load_info {
    std::vector<std::string> dropped_zero_variance;
    std::size_t rows_before_latest_filter = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row_index) {
    if (cell.empty()) return kMissing;
    double value = 0.0;
    const auto* begin = cell.data();
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw validation_error("csv: unparseable numeric cell '" + cell + "' at data row " +
                               std::to_string(row_index));
    }
    return value;
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline dataset load_csv(const std::string& path, const csv_load_options& options = {},
                        csv_load_info* info = nullptr) {
    std::ifstream in(path);
    if (!in) throw validation_error("csv: cannot open " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw validation_error("csv: empty file " + path);
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    const auto header = detail::split_csv_line(header_line);

    int label_idx = -1, id_idx = -1, date_idx = -1;
    std::vector<int> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name == options.label_column) {
            label_idx = static_cast<int>(c);
        } else if (!options.id_column.empty() && name == options.id_column) {
            id_idx = static_cast<int>(c);
        } else if (!options.date_column.empty() && name == options.date_column) {
            date_idx = static_cast<int>(c);
        } else if (std::find(options.drop_columns.begin(), options.drop_columns.end(), name) ==
                   options.drop_columns.end()) {
            feature_cols.push_back(static_cast<int>(c));
            feature_names.push_back(name);
        }
    }
    if (label_idx < 0) {
        throw validation_error("csv: label column '" + options.label_column + "' not found");
    }

    struct raw_row {
        std::vector<double> values;
        int label;
        std::string id, date;
    };
    std::vector<raw_row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++line_no;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw validation_error("csv: row " + std::to_string(line_no) + " has " +
                                   std::to_string(cells.size()) + " cells, expected " +
                                   std::to_string(header.size()));
        }
        raw_row r;
        const double label_value = detail::parse_cell(cells[label_idx], line_no);
        if (label_value != 0.0 && label_value != 1.0) {
            throw validation_error("csv: non-binary label at data row " +
                                   std::to_string(line_no));
        }
        r.label = static_cast<int>(label_value);
        if (id_idx >= 0) r.id = cells[id_idx];
        if (date_idx >= 0) r.date = cells[date_idx];
        r.values.reserve(feature_cols.size());
        for (const int c : feature_cols) r.values.push_back(detail::parse_cell(cells[c], line_no));
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw validation_error("csv: no data rows in " + path);
    if (info) info->rows_before_latest_filter = rows.size();

    // Single-month reduction: keep each customer's latest record.
    if (id_idx >= 0 && date_idx >= 0) {
        std::map<std::string, std::size_t> latest;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto it = latest.find(rows[i].id);
            if (it == latest.end() || rows[it->second].date < rows[i].date) {
                latest[rows[i].id] = i;
            }
        }
        std::vector<std::size_t> keep;
        keep.reserve(latest.size());
        for (const auto& [id, idx] : latest) keep.push_back(idx);
        std::sort(keep.begin(), keep.end());
        std::vector<raw_row> filtered;
        filtered.reserve(keep.size());
        for (const std::size_t idx : keep) filtered.push_back(std::move(rows[idx]));
        rows = std::move(filtered);
    }

    // Zero-variance removal: single distinct non-missing value (or none).
    const std::size_t f_in = feature_cols.size();
    std::vector<bool> keep_col(f_in, false);
    std::vector<std::string> dropped;
    for (std::size_t c = 0; c < f_in; ++c) {
        double first = kMissing;
        bool varies = false;
        for (const auto& r : rows) {
            const double v = r.values[c];
            if (is_missing(v)) continue;
            if (is_missing(first)) {
                first = v;
            } else if (v != first) {
                varies = true;
                break;
            }
        }
        keep_col[c] = varies;
        if (!varies) dropped.push_back(feature_names[c]);
    }
    if (info) info->dropped_zero_variance = dropped;

    dataset out;
    out.num_rows = rows.size();
    for (std::size_t c = 0; c < f_in; ++c) {
        if (keep_col[c]) out.feature_names.push_back(feature_names[c]);
    }
    out.num_features = out.feature_names.size();
    out.features.reserve(out.num_rows * out.num_features);
    out.labels.reserve(out.num_rows);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < f_in; ++c) {
            if (keep_col[c]) out.features.push_back(r.values[c]);
        }
        out.labels.push_back(r.label);
    }
    out.assign_cdr_weights();
    out.validate();
    return out;
}

inline void save_csv(const dataset& data, const std::string& path,
                     const std::string& label_column = "target") {
    std::ofstream outfile(path);
    if (!outfile) throw std::runtime_error("csv: cannot write " + path);
    for (std::size_t c = 0; c < data.num_features; ++c) {
        outfile << (data.feature_names.empty() ? "f" + std::to_string(c)
                                               : data.feature_names[c])
                << ',';
    }
    outfile << label_column << '\n';
    for (std::size_t r = 0; r < data.num_rows; ++r) {
        for (std::size_t c = 0; c < data.num_features; ++c) {
            const double v = data.at(r, c);
            if (!is_missing(v)) outfile << detail::format_double(v);
            outfile << ',';
        }
        outfile << data.labels[r] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Synthetic stand-in for the proprietary competition data
// ---------------------------------------------------------------------------

struct synthetic_spec {
    std::size_t num_rows = 1000;
    std::size_t num_features = 20;
    double positive_fraction = 0.2;
    double missing_fraction = 0.0;
    std::uint64_t seed = 0;
};

// Class-conditional Gaussians with a planted low-dimensional mean shift whose
// magnitude decays across the first few features, one variance-signal
// feature, and independent nuisance features. The positive count is planted
// exactly; rows are emitted in seeded shuffled order.
inline dataset generate_synthetic(const synthetic_spec& spec) {
    if (spec.positive_fraction < 0.0 || spec.positive_fraction >= 1.0 ||
        spec.missing_fraction < 0.0 || spec.missing_fraction >= 1.0) {
        throw validation_error("generate_synthetic: fractions must lie in [0, 1)");
    }
    if (spec.num_rows < 1 || spec.num_features < 1) {
        throw validation_error("generate_synthetic: need at least one row and feature");
    }
    const std::size_t m = spec.num_rows;
    const std::size_t f = spec.num_features;
    const std::size_t n_pos =
        static_cast<std::size_t>(std::llround(spec.positive_fraction * static_cast<double>(m)));

    rng_engine rng(derive_seed(spec.seed, 0x5e7));
    std::vector<int> labels(m, 0);
    std::fill(labels.begin(), labels.begin() + n_pos, 1);
    for (std::size_t i = m; i > 1; --i) {  // Fisher-Yates
        std::swap(labels[i - 1], labels[rng_below(rng, i)]);
    }

    const std::size_t signal_dims = std::min<std::size_t>(6, f);
    dataset out;
    out.num_rows = m;
    out.num_features = f;
    out.features.resize(m * f);
    out.labels = labels;
    out.feature_names.reserve(f);
    for (std::size_t c = 0; c < f; ++c) out.feature_names.push_back("f" + std::to_string(c));

    for (std::size_t r = 0; r < m; ++r) {
        const bool positive = labels[r] == 1;
        for (std::size_t c = 0; c < f; ++c) {
            double v = rng_normal(rng);
            if (positive && c < signal_dims) {
                v *= (c == 0) ? 1.6 : 1.0;  // feature 0 also carries a variance signal
                v += 1.2 * std::pow(0.85, static_cast<double>(c));
            }
            out.features[r * f + c] = v;
        }
    }
    if (spec.missing_fraction > 0.0) {
        for (double& v : out.features) {
            if (rng_u01(rng) < spec.missing_fraction) v = kMissing;
        }
    }
    out.assign_cdr_weights();
    return out;
}

// ---------------------------------------------------------------------------
// Subsampling and splitting
// ---------------------------------------------------------------------------

enum class subsample_policy { balanced, stratified };

namespace detail {

inline std::vector<std::size_t> class_indices(const dataset& data, int label) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < data.num_rows; ++i) {
        if (data.labels[i] == label) out.push_back(i);
    }
    return out;
}

inline void seeded_shuffle(std::vector<std::size_t>& v, rng_engine& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng_below(rng, i)]);
}

}  // namespace detail

inline dataset subsample(const dataset& data, subsample_policy policy, std::size_t count,
                         std::uint64_t seed) {
    auto pos = detail::class_indices(data, 1);
    auto neg = detail::class_indices(data, 0);
    std::size_t take_pos = 0, take_neg = 0;
    if (policy == subsample_policy::balanced) {
        take_pos = count / 2;
        take_neg = count - take_pos;
    } else {
        take_pos = static_cast<std::size_t>(std::llround(
            static_cast<double>(count) * static_cast<double>(pos.size()) /
            static_cast<double>(data.num_rows)));
        take_neg = count - take_pos;
    }
    if (take_pos > pos.size() || take_neg > neg.size()) {
        throw validation_error("subsample: not enough samples per class (need " +
                               std::to_string(take_pos) + "/" + std::to_string(take_neg) +
                               ", have " + std::to_string(pos.size()) + "/" +
                               std::to_string(neg.size()) + ")");
    }
    rng_engine rng(derive_seed(seed, 0x5ab5));
    detail::seeded_shuffle(pos, rng);
    detail::seeded_shuffle(neg, rng);
    std::vector<std::size_t> rows(pos.begin(), pos.begin() + take_pos);
    rows.insert(rows.end(), neg.begin(), neg.begin() + take_neg);
    detail::seeded_shuffle(rows, rng);
    return data.take_rows(rows);
}

struct train_test_split {
    dataset train;
    dataset test;
};

// Random split; the first `fraction` of a seeded shuffle becomes training.
inline train_test_split split_dataset(const dataset& data, double fraction, std::uint64_t seed) {
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw validation_error("split_dataset: fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(data.num_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng_engine rng(derive_seed(seed, 0x5917));
    detail::seeded_shuffle(order, rng);
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.num_rows)));
    std::vector<std::size_t> train_rows(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> test_rows(order.begin() + n_train, order.end());
    return {data.take_rows(train_rows), data.take_rows(test_rows)};
}

}  // namespace qdr
