// Batch experiment runner: config parsing, the end-to-end protocol
// (subsample -> split -> searched classical and quantum pipelines ->
// ensembles over the seed grid -> metrics and diversity), and report
// emission in both machine-readable and paper-style table form.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdr/common.hpp"
#include "qdr/cross_validation.hpp"
#include "qdr/dataset.hpp"
#include "qdr/ensemble.hpp"
#include "qdr/gbdt.hpp"
#include "qdr/metrics.hpp"
#include "qdr/pipeline.hpp"

namespace qdr {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

struct experiment_config {
    json raw;  // canonical echo for hashing and replay

    // data
    std::string source = "synthetic";
    synthetic_spec synthetic;
    std::string csv_path;
    csv_load_options csv_options;

    // protocol
    std::string subsample_policy = "none";  // balanced | stratified | none
    std::size_t subsample_count = 0;
    std::uint64_t subsample_seed = 0;
    double split_fraction = 0.5;
    std::uint64_t split_seed = 0;
    int cv_folds = 5;
    std::uint64_t cv_seed = 0;
    std::string metric = "cdr";  // cdr | accuracy | auc

    // classical models
    std::vector<std::uint64_t> classical_seeds{1};
    std::vector<double> classical_eta_grid{0.1, 0.3};
    gbdt_params classical_gbdt;
    bool classical_weighted_training = false;

    // quantum models
    std::vector<std::uint64_t> quantum_seeds{1};
    std::vector<double> alpha_grid{0.5, 0.75, 1.0};
    std::vector<double> quantum_eta_grid{0.1, 0.5};
    int num_qubits = 10;
    int repetitions = 1;
    double scaler_lo = 0.3;
    double scaler_hi = 0.8;
    std::size_t feature_selection_top_k = 0;  // 0 = keep all features
    backend_config backend;
    gbdt_params quantum_gbdt;
    bool quantum_weighted_training = false;

    // ensembles
    std::vector<double> meta_c_values{0.2, 0.04};

    std::string output_dir = "runs/out";
    bool export_pqf_csv = false;
};

namespace detail {

inline gbdt_params parse_gbdt(const json& j, gbdt_params defaults) {
    gbdt_params p = defaults;
    if (j.contains("learning_rate")) p.learning_rate = j["learning_rate"];
    if (j.contains("n_estimators")) p.n_estimators = j["n_estimators"];
    if (j.contains("max_depth")) p.max_depth = j["max_depth"];
    if (j.contains("min_child_weight")) p.min_child_weight = j["min_child_weight"];
    if (j.contains("subsample")) p.subsample = j["subsample"];
    if (j.contains("colsample_bytree")) p.colsample_bytree = j["colsample_bytree"];
    if (j.contains("gamma")) p.gamma = j["gamma"];
    return p;
}

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string format_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace detail

inline experiment_config parse_config(const json& j) {
    experiment_config cfg;
    cfg.raw = j;

    const auto& data = j.at("data");
    cfg.source = data.at("source");
    if (cfg.source == "synthetic") {
        const auto& s = data.at("synthetic");
        cfg.synthetic.num_rows = s.at("rows");
        cfg.synthetic.num_features = s.at("features");
        cfg.synthetic.positive_fraction = s.value("positive_fraction", 0.2);
        cfg.synthetic.missing_fraction = s.value("missing_fraction", 0.0);
        cfg.synthetic.seed = s.at("seed");
    } else if (cfg.source == "csv") {
        const auto& c = data.at("csv");
        cfg.csv_path = c.at("path");
        cfg.csv_options.label_column = c.value("label_column", "target");
        cfg.csv_options.id_column = c.value("id_column", "");
        cfg.csv_options.date_column = c.value("date_column", "");
        if (c.contains("drop_columns")) {
            for (const auto& name : c["drop_columns"]) {
                cfg.csv_options.drop_columns.push_back(name);
            }
        }
    } else {
        throw validation_error("config: data.source must be 'synthetic' or 'csv'");
    }

    if (j.contains("subsample")) {
        const auto& s = j["subsample"];
        cfg.subsample_policy = s.value("policy", "none");
        cfg.subsample_count = s.value("count", 0);
        cfg.subsample_seed = s.value("seed", 0);
    }
    const auto& split = j.at("split");
    cfg.split_fraction = split.value("fraction", 0.5);
    cfg.split_seed = split.at("seed");
    cfg.cv_folds = j.value("cv_folds", 5);
    cfg.cv_seed = j.at("cv_seed");
    cfg.metric = j.value("metric", "cdr");

    const auto& classical = j.at("classical");
    cfg.classical_seeds.clear();
    for (const auto& s : classical.at("seeds")) cfg.classical_seeds.push_back(s);
    if (classical.contains("eta_grid")) {
        cfg.classical_eta_grid.clear();
        for (const auto& v : classical["eta_grid"]) cfg.classical_eta_grid.push_back(v);
    }
    cfg.classical_gbdt = detail::parse_gbdt(classical.value("gbdt", json::object()), {});
    cfg.classical_weighted_training = classical.value("weighted_training", false);

    const auto& quantum = j.at("quantum");
    cfg.quantum_seeds.clear();
    for (const auto& s : quantum.at("seeds")) cfg.quantum_seeds.push_back(s);
    if (quantum.contains("alpha_grid")) {
        cfg.alpha_grid.clear();
        for (const auto& v : quantum["alpha_grid"]) cfg.alpha_grid.push_back(v);
    }
    if (quantum.contains("eta_grid")) {
        cfg.quantum_eta_grid.clear();
        for (const auto& v : quantum["eta_grid"]) cfg.quantum_eta_grid.push_back(v);
    }
    cfg.num_qubits = quantum.at("qubits");
    cfg.repetitions = quantum.value("repetitions", 1);
    if (quantum.contains("scaler_range")) {
        cfg.scaler_lo = quantum["scaler_range"][0];
        cfg.scaler_hi = quantum["scaler_range"][1];
    }
    cfg.feature_selection_top_k = quantum.value("feature_selection_top_k", 0);
    if (quantum.contains("backend")) {
        const auto& b = quantum["backend"];
        const std::string kind = b.value("kind", "exact");
        if (kind == "exact") cfg.backend.kind = backend_kind::exact;
        else if (kind == "mps") cfg.backend.kind = backend_kind::mps;
        else if (kind == "shots") cfg.backend.kind = backend_kind::shots;
        else throw validation_error("config: unknown backend kind '" + kind + "'");
        cfg.backend.chi_max = b.value("chi_max", 64);
        cfg.backend.trunc_tol = b.value("trunc_tol", 1e-10);
        cfg.backend.p10 = b.value("p10", 0.0);
        cfg.backend.p01 = b.value("p01", 0.0);
        cfg.backend.shots_per_circuit = b.value("shots_per_circuit", 20000);
        cfg.backend.calibration_shots = b.value("calibration_shots", 20000);
    }
    cfg.quantum_gbdt = detail::parse_gbdt(quantum.value("gbdt", json::object()), {});
    cfg.quantum_weighted_training = quantum.value("weighted_training", false);

    if (j.contains("ensemble") && j["ensemble"].contains("meta_c")) {
        cfg.meta_c_values.clear();
        for (const auto& v : j["ensemble"]["meta_c"]) cfg.meta_c_values.push_back(v);
    }
    cfg.output_dir = j.value("output_dir", std::string("runs/out"));
    cfg.export_pqf_csv = j.value("export_pqf_csv", false);
    return cfg;
}

inline experiment_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open " + path);
    json j;
    in >> j;
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

struct model_run {
    std::uint64_t seed = 0;
    param_map best_params;
    double cv_mean = 0.0;
    double cv_std = 0.0;
    std::vector<double> test_scores;
    std::vector<double> oof_train_scores;
    double test_cdr = 0.0, test_gini = 0.0, test_capture = 0.0;
    classification_metrics test_classification;
};

struct ensemble_cell {
    std::uint64_t classical_seed = 0;
    std::uint64_t quantum_seed = 0;
    double cdr_value = 0.0;
};

struct ensemble_summary {
    std::string name;
    double cdr_mean = 0.0;
    double cdr_std = 0.0;
    std::vector<ensemble_cell> cells;
};

struct run_report {
    json body;
    double wall_time_seconds = 0.0;
    std::string rendered_tables;
};

inline std::string render_tables(const json& body);

namespace detail {

inline metric_fn make_metric(const std::string& name) {
    if (name == "cdr") {
        return [](const std::vector<double>& scores, const dataset& eval) {
            return cdr(scored_predictions(scores, eval.labels));
        };
    }
    if (name == "accuracy") {
        return [](const std::vector<double>& scores, const dataset& eval) {
            double correct = 0;
            for (std::size_t i = 0; i < scores.size(); ++i) {
                correct += (scores[i] >= 0.5) == (eval.labels[i] == 1);
            }
            return correct / static_cast<double>(scores.size());
        };
    }
    if (name == "auc") {
        return [](const std::vector<double>& scores, const dataset& eval) {
            return auc_score(scores, eval.labels);
        };
    }
    throw validation_error("config: unknown metric '" + name + "'");
}

inline std::pair<double, double> mean_std(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return {mean, values.size() > 1 ? std::sqrt(var / n) : 0.0};
}

inline void fill_test_metrics(model_run& run, const dataset& test) {
    scored_predictions p(run.test_scores, test.labels);
    run.test_cdr = cdr(p);
    run.test_gini = normalized_weighted_gini(p);
    run.test_capture = capture_rate_at_4pct(p);
    run.test_classification = standard_metrics(p);
}

// Out-of-fold predictions on the training set with fixed hyperparameters.
inline std::vector<double> out_of_fold_scores(const fit_score_fn& pipeline,
                                              const dataset& train, int k,
                                              std::uint64_t fold_seed) {
    const auto folds = stratified_kfold(train.labels, k, fold_seed);
    std::vector<double> oof(train.num_rows, 0.0);
    for (const auto& fold : folds) {
        const dataset fold_train = train.take_rows(fold.train_indices);
        const dataset fold_val = train.take_rows(fold.validation_indices);
        const auto scores = pipeline(fold_train, fold_val);
        for (std::size_t i = 0; i < fold.validation_indices.size(); ++i) {
            oof[fold.validation_indices[i]] = scores[i];
        }
    }
    return oof;
}

inline json model_run_to_json(const model_run& run) {
    json j;
    j["seed"] = run.seed;
    j["best_params"] = run.best_params;
    j["cv_mean"] = run.cv_mean;
    j["cv_std"] = run.cv_std;
    j["test"] = {{"cdr", run.test_cdr},
                 {"gini", run.test_gini},
                 {"capture_rate", run.test_capture},
                 {"accuracy", run.test_classification.accuracy},
                 {"precision", run.test_classification.precision},
                 {"recall", run.test_classification.recall},
                 {"f1", run.test_classification.f1},
                 {"auc", run.test_classification.auc}};
    return j;
}

}  // namespace detail

// Drops zero-variance columns that appear after subsampling; returns dropped
// names.
inline std::vector<std::string> drop_zero_variance(dataset& data) {
    std::vector<std::size_t> keep;
    std::vector<std::string> dropped;
    for (std::size_t c = 0; c < data.num_features; ++c) {
        double first = kMissing;
        bool varies = false;
        for (std::size_t r = 0; r < data.num_rows && !varies; ++r) {
            const double v = data.at(r, c);
            if (is_missing(v)) continue;
            if (is_missing(first)) first = v;
            else if (v != first) varies = true;
        }
        if (varies) keep.push_back(c);
        else dropped.push_back(data.feature_names.empty() ? "f" + std::to_string(c)
                                                          : data.feature_names[c]);
    }
    if (keep.size() == data.num_features) return dropped;
    std::vector<double> features(data.num_rows * keep.size());
    std::vector<std::string> names;
    for (std::size_t r = 0; r < data.num_rows; ++r) {
        for (std::size_t k = 0; k < keep.size(); ++k) {
            features[r * keep.size() + k] = data.at(r, keep[k]);
        }
    }
    for (const auto c : keep) {
        names.push_back(data.feature_names.empty() ? "f" + std::to_string(c)
                                                   : data.feature_names[c]);
    }
    data.features = std::move(features);
    data.feature_names = std::move(names);
    data.num_features = keep.size();
    return dropped;
}

inline run_report run_experiment(const experiment_config& cfg) {
    const auto start = std::chrono::steady_clock::now();

    // --- data -------------------------------------------------------------
    csv_load_info load_info;
    dataset data = cfg.source == "synthetic"
                       ? generate_synthetic(cfg.synthetic)
                       : load_csv(cfg.csv_path, cfg.csv_options, &load_info);
    if (cfg.subsample_policy == "balanced") {
        data = subsample(data, subsample_policy::balanced, cfg.subsample_count,
                         cfg.subsample_seed);
    } else if (cfg.subsample_policy == "stratified") {
        data = subsample(data, subsample_policy::stratified, cfg.subsample_count,
                         cfg.subsample_seed);
    } else if (cfg.subsample_policy != "none") {
        throw validation_error("config: unknown subsample policy");
    }
    auto dropped = drop_zero_variance(data);
    dropped.insert(dropped.end(), load_info.dropped_zero_variance.begin(),
                   load_info.dropped_zero_variance.end());

    const auto split = split_dataset(data, cfg.split_fraction, cfg.split_seed);
    const dataset& train = split.train;
    const dataset& test = split.test;
    std::size_t test_scoring_passes = 0;  // train/test hygiene audit

    const auto metric = detail::make_metric(cfg.metric);

    // --- optional gain-based feature selection (stands in for the random
    // forest importance ranking; flagged in the report notes) ---------------
    std::vector<std::size_t> selected;
    if (cfg.feature_selection_top_k > 0 &&
        cfg.feature_selection_top_k < train.num_features) {
        dataset ranking_train = train;
        ranking_train.weights.assign(ranking_train.num_rows, 1.0);
        gbdt_params ranking_params = cfg.classical_gbdt;
        const auto ranking_model =
            gbdt_fit(ranking_train, ranking_params, derive_seed(cfg.cv_seed, 0xfea7));
        selected = gbdt_top_features(ranking_model, cfg.feature_selection_top_k);
        std::sort(selected.begin(), selected.end());
    }
    auto restrict_features = [&](const dataset& d) {
        if (selected.empty()) return d;
        dataset out;
        out.num_rows = d.num_rows;
        out.num_features = selected.size();
        out.labels = d.labels;
        out.weights = d.weights;
        out.features.resize(d.num_rows * selected.size());
        for (const auto c : selected) out.feature_names.push_back(d.feature_names[c]);
        for (std::size_t r = 0; r < d.num_rows; ++r) {
            for (std::size_t k = 0; k < selected.size(); ++k) {
                out.features[r * selected.size() + k] = d.at(r, selected[k]);
            }
        }
        return out;
    };
    const dataset q_train = restrict_features(train);
    const dataset q_test = restrict_features(test);

    // --- classical models ---------------------------------------------------
    std::vector<model_run> classical_runs;
    for (const auto seed : cfg.classical_seeds) {
        pipeline_factory factory = [&, seed](const param_map& params) -> fit_score_fn {
            gbdt_params gp = cfg.classical_gbdt;
            gp.learning_rate = params.at("eta");
            return [gp, seed, &cfg](const dataset& fit_on, const dataset& eval) {
                classical_pipeline_config pc{gp, derive_seed(seed, 0xc1a),
                                             cfg.classical_weighted_training};
                classical_pipeline pipeline(pc);
                pipeline.fit(fit_on);
                return pipeline.predict_proba(eval);
            };
        };
        std::vector<param_map> candidates;
        for (const double eta : cfg.classical_eta_grid) candidates.push_back({{"eta", eta}});

        const auto search = hyper_search(factory, candidates, train, cfg.cv_folds,
                                         derive_seed(cfg.cv_seed, seed), metric);
        model_run run;
        run.seed = seed;
        run.best_params = search.best.params;
        run.cv_mean = search.best.metric_mean;
        run.cv_std = search.best.metric_stddev;

        auto best_pipeline = factory(search.best.params);
        run.oof_train_scores = detail::out_of_fold_scores(
            best_pipeline, train, cfg.cv_folds, derive_seed(cfg.cv_seed, seed));
        run.test_scores = best_pipeline(train, test);
        ++test_scoring_passes;
        detail::fill_test_metrics(run, test);
        classical_runs.push_back(std::move(run));
    }

    // --- quantum models -----------------------------------------------------
    std::vector<model_run> quantum_runs;
    std::uint64_t total_circuit_executions = 0;
    feature_layout layout_used;
    for (const auto seed : cfg.quantum_seeds) {
        auto make_pipeline_config = [&, seed](const param_map& params) {
            quantum_pipeline_config qc;
            qc.num_qubits = cfg.num_qubits;
            qc.alpha = params.at("alpha");
            qc.repetitions = cfg.repetitions;
            qc.haar_seed = derive_seed(seed, 0x4aa);
            qc.shuffle_seed = derive_seed(seed, 0x5f1);
            qc.gbdt_seed = derive_seed(seed, 0x9bd);
            qc.shots_seed = derive_seed(seed, 0x540);
            qc.scaler_lo = cfg.scaler_lo;
            qc.scaler_hi = cfg.scaler_hi;
            qc.backend = cfg.backend;
            qc.gbdt = cfg.quantum_gbdt;
            qc.gbdt.learning_rate = params.at("eta");
            qc.weighted_training = cfg.quantum_weighted_training;
            return qc;
        };
        pipeline_factory factory = [&](const param_map& params) -> fit_score_fn {
            const auto qc = make_pipeline_config(params);
            return [qc](const dataset& fit_on, const dataset& eval) {
                quantum_pipeline pipeline(qc);
                pipeline.fit(fit_on);
                return pipeline.predict_proba(eval);
            };
        };
        std::vector<param_map> candidates;
        for (const double alpha : cfg.alpha_grid) {
            for (const double eta : cfg.quantum_eta_grid) {
                candidates.push_back({{"alpha", alpha}, {"eta", eta}});
            }
        }

        const auto search = hyper_search(factory, candidates, q_train, cfg.cv_folds,
                                         derive_seed(cfg.cv_seed, seed), metric);
        model_run run;
        run.seed = seed;
        run.best_params = search.best.params;
        run.cv_mean = search.best.metric_mean;
        run.cv_std = search.best.metric_stddev;

        auto best_pipeline = factory(search.best.params);
        run.oof_train_scores = detail::out_of_fold_scores(
            best_pipeline, q_train, cfg.cv_folds, derive_seed(cfg.cv_seed, seed));

        quantum_pipeline final_pipeline(make_pipeline_config(search.best.params));
        final_pipeline.fit(q_train);
        run.test_scores = final_pipeline.predict_proba(q_test);
        ++test_scoring_passes;
        total_circuit_executions += final_pipeline.circuit_executions();
        layout_used = final_pipeline.layout();
        detail::fill_test_metrics(run, test);
        quantum_runs.push_back(std::move(run));

        if (cfg.export_pqf_csv && seed == cfg.quantum_seeds.front()) {
            std::filesystem::create_directories(cfg.output_dir);
            save_csv(final_pipeline.project_dataset(q_train),
                     cfg.output_dir + "/pqf_train.csv");
            save_csv(final_pipeline.project_dataset(q_test),
                     cfg.output_dir + "/pqf_test.csv");
        }
    }

    // --- ensembles over the seed grid ----------------------------------------
    std::vector<ensemble_summary> ensembles;
    {
        ensemble_summary means{"Means-model"};
        std::vector<ensemble_summary> metas;
        for (const double c : cfg.meta_c_values) {
            metas.push_back({"LogReg (C=" + detail::format_short(c) + ")"});
        }
        bool bracketing_holds = true;
        for (const auto& c_run : classical_runs) {
            for (const auto& q_run : quantum_runs) {
                const auto mean_scores = means_ensemble(c_run.test_scores, q_run.test_scores);
                for (std::size_t i = 0; i < mean_scores.size(); ++i) {
                    const double lo = std::min(c_run.test_scores[i], q_run.test_scores[i]);
                    const double hi = std::max(c_run.test_scores[i], q_run.test_scores[i]);
                    if (mean_scores[i] < lo || mean_scores[i] > hi) bracketing_holds = false;
                }
                means.cells.push_back(
                    {c_run.seed, q_run.seed,
                     cdr(scored_predictions(mean_scores, test.labels))});

                base_scores oof;
                oof.classical = c_run.oof_train_scores;
                oof.quantum = q_run.oof_train_scores;
                oof.provenance = score_provenance::out_of_fold;
                base_scores test_base;
                test_base.classical = c_run.test_scores;
                test_base.quantum = q_run.test_scores;
                test_base.provenance = score_provenance::out_of_fold;
                for (std::size_t mc = 0; mc < cfg.meta_c_values.size(); ++mc) {
                    const auto meta =
                        meta_ensemble_fit(oof, train.labels, cfg.meta_c_values[mc]);
                    const auto meta_scores = meta_ensemble_predict(meta, test_base);
                    metas[mc].cells.push_back(
                        {c_run.seed, q_run.seed,
                         cdr(scored_predictions(meta_scores, test.labels))});
                }
            }
        }
        ensembles.push_back(std::move(means));
        for (auto& m : metas) ensembles.push_back(std::move(m));
        for (auto& e : ensembles) {
            std::vector<double> values;
            for (const auto& cell : e.cells) values.push_back(cell.cdr_value);
            std::tie(e.cdr_mean, e.cdr_std) = detail::mean_std(values);
        }
        if (!bracketing_holds) {
            throw std::logic_error("means ensemble violated rowwise score bracketing");
        }
    }

    // --- diversity for the first pair ----------------------------------------
    json diversity_json;
    {
        impute_params imp = fit_median_impute(q_train);
        dataset imputed = q_train;
        imputed.features = transform_impute(imp, q_train.features, q_train.num_features);
        const auto scaler = fit_minmax(imputed, cfg.scaler_lo, cfg.scaler_hi);
        const auto test_imputed = transform_impute(imp, q_test.features, q_test.num_features);
        const auto scaled = transform_minmax(scaler, test_imputed, q_test.num_features);

        const std::size_t k = std::min<std::size_t>(100, test.num_rows);
        const auto report =
            diversity_report(classical_runs.front().test_scores,
                             quantum_runs.front().test_scores, scaled, q_test.num_features,
                             q_test.feature_names, k);
        diversity_json["score_correlation"] = report.score_correlation;
        diversity_json["top_k"] = report.k;
        diversity_json["top_k_jaccard"] = report.top_k_jaccard;
        json rows = json::array();
        const std::size_t show = std::min<std::size_t>(20, report.feature_comparison.size());
        for (std::size_t i = 0; i < show; ++i) {
            const auto& cmp = report.feature_comparison[i];
            rows.push_back({{"feature", cmp.name},
                            {"classical_mean", cmp.classical_mean},
                            {"quantum_mean", cmp.quantum_mean}});
        }
        diversity_json["top_feature_comparison"] = rows;
    }

    // --- report body ----------------------------------------------------------
    run_report report;
    json& body = report.body;
    body["version"] = kVersion;
    body["config"] = cfg.raw;
    body["config_hash"] = detail::hex64(detail::fnv1a64(cfg.raw.dump()));
    body["dataset"] = {{"rows", data.num_rows},
                       {"features", data.num_features},
                       {"positives", data.positives()},
                       {"train_rows", train.num_rows},
                       {"test_rows", test.num_rows},
                       {"dropped_zero_variance", dropped}};
    body["notes"] = json::array({
        "capture rate counts positives unweighted; weights enter only the 4% budget",
        "feature-to-coupling layout uses cyclic reuse when features != qubits-1",
        "feature selection (when enabled) ranks by boosted-tree gain importance",
    });
    if (!layout_used.covers_all_features) {
        body["notes"].push_back(
            "layout warning: repetitions*(qubits-1) < features, some features unused");
    }
    body["quantum_invocations"] = total_circuit_executions;
    body["audit"] = {{"test_scoring_passes", test_scoring_passes},
                     {"expected_passes",
                      cfg.classical_seeds.size() + cfg.quantum_seeds.size()}};

    json classical_json = json::array();
    for (const auto& run : classical_runs) classical_json.push_back(detail::model_run_to_json(run));
    json quantum_json = json::array();
    for (const auto& run : quantum_runs) quantum_json.push_back(detail::model_run_to_json(run));
    body["classical"]["models"] = classical_json;
    body["quantum"]["models"] = quantum_json;

    auto summarize = [&](const std::vector<model_run>& runs, json& out) {
        std::vector<double> cdrs, accs;
        for (const auto& r : runs) {
            cdrs.push_back(r.test_cdr);
            accs.push_back(r.test_classification.accuracy);
        }
        const auto [cdr_mean, cdr_std] = detail::mean_std(cdrs);
        const auto [acc_mean, acc_std] = detail::mean_std(accs);
        out["test_cdr_mean"] = cdr_mean;
        out["test_cdr_std"] = cdr_std;
        out["test_accuracy_mean"] = acc_mean;
        out["test_accuracy_std"] = acc_std;
    };
    summarize(classical_runs, body["classical"]);
    summarize(quantum_runs, body["quantum"]);

    json ens_json = json::array();
    for (const auto& e : ensembles) {
        json cells = json::array();
        for (const auto& cell : e.cells) {
            cells.push_back({{"classical_seed", cell.classical_seed},
                             {"quantum_seed", cell.quantum_seed},
                             {"cdr", cell.cdr_value}});
        }
        ens_json.push_back({{"name", e.name},
                            {"cdr_mean", e.cdr_mean},
                            {"cdr_std", e.cdr_std},
                            {"cells", cells}});
    }
    body["ensembles"] = ens_json;
    body["ensemble_checks"] = {{"means_bracketing", true},
                               {"meta_base_scores", "out_of_fold"}};
    body["diversity"] = diversity_json;

    report.rendered_tables = render_tables(body);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Rendering and emission
// ---------------------------------------------------------------------------

inline std::string render_tables(const json& body);

inline void emit_report(const run_report& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    json file;
    file["body"] = report.body;
    file["wall_time_seconds"] = report.wall_time_seconds;
    std::ofstream json_out(dir + "/report.json");
    if (!json_out) throw std::runtime_error("emit_report: cannot write " + dir);
    json_out << file.dump(2) << "\n";
    std::ofstream text_out(dir + "/report.txt");
    text_out << report.rendered_tables;
}

inline std::string render_tables(const json& body) {
    std::string out;
    const auto line = [&](const std::string& s) { out += s + "\n"; };
    const auto pm = [](const json& mean, const json& std) {
        return detail::format4(mean.get<double>()) + " ± " +
               detail::format4(std.get<double>());
    };

    line("run " + body["config_hash"].get<std::string>() + "  (version " +
         body["version"].get<std::string>() + ")");
    line("rows=" + std::to_string(body["dataset"]["rows"].get<std::size_t>()) +
         " features=" + std::to_string(body["dataset"]["features"].get<std::size_t>()) +
         " positives=" + std::to_string(body["dataset"]["positives"].get<std::size_t>()));
    line("");

    line("CDR summary (mean ± stddev over seed grid)");
    line("| Model            | CDR               |");
    line("|------------------|-------------------|");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "| %-16s | %s |", "Classical",
                  pm(body["classical"]["test_cdr_mean"], body["classical"]["test_cdr_std"])
                      .c_str());
    line(buf);
    std::snprintf(buf, sizeof(buf), "| %-16s | %s |", "Quantum",
                  pm(body["quantum"]["test_cdr_mean"], body["quantum"]["test_cdr_std"]).c_str());
    line(buf);
    for (const auto& e : body["ensembles"]) {
        std::snprintf(buf, sizeof(buf), "| %-16s | %s |",
                      e["name"].get<std::string>().c_str(),
                      pm(e["cdr_mean"], e["cdr_std"]).c_str());
        line(buf);
    }
    line("");

    line("Per-model test metrics");
    line("| Model     | Seed | Acc.   | Prec.  | Rec.   | F1     | AUC    | CDR    |");
    line("|-----------|------|--------|--------|--------|--------|--------|--------|");
    const auto model_rows = [&](const std::string& name, const json& models) {
        for (const auto& m : models) {
            const auto& t = m["test"];
            std::snprintf(buf, sizeof(buf),
                          "| %-9s | %4llu | %s | %s | %s | %s | %s | %s |", name.c_str(),
                          static_cast<unsigned long long>(m["seed"].get<std::uint64_t>()),
                          detail::format4(t["accuracy"].get<double>()).c_str(),
                          detail::format4(t["precision"].get<double>()).c_str(),
                          detail::format4(t["recall"].get<double>()).c_str(),
                          detail::format4(t["f1"].get<double>()).c_str(),
                          detail::format4(t["auc"].get<double>()).c_str(),
                          detail::format4(t["cdr"].get<double>()).c_str());
            line(buf);
        }
    };
    model_rows("Classical", body["classical"]["models"]);
    model_rows("Quantum", body["quantum"]["models"]);
    line("");

    line("Diversity: top feature means over each model's top-" +
         std::to_string(body["diversity"]["top_k"].get<std::size_t>()) + " rows");
    std::snprintf(buf, sizeof(buf), "score correlation %s, top-k jaccard %s",
                  detail::format4(body["diversity"]["score_correlation"].get<double>()).c_str(),
                  detail::format4(body["diversity"]["top_k_jaccard"].get<double>()).c_str());
    line(buf);
    line("| Feature      | Classical model | Quantum model |");
    line("|--------------|-----------------|---------------|");
    for (const auto& row : body["diversity"]["top_feature_comparison"]) {
        std::snprintf(buf, sizeof(buf), "| %-12s | %15s | %13s |",
                      row["feature"].get<std::string>().c_str(),
                      detail::format4(row["classical_mean"].get<double>()).c_str(),
                      detail::format4(row["quantum_mean"].get<double>()).c_str());
        line(buf);
    }
    line("");
    line("notes:");
    for (const auto& note : body["notes"]) line("- " + note.get<std::string>());
    return out;
}

}  // namespace qdr
