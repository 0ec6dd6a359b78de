// Model pipelines used by the experiment runner.
//
// Classical: gradient-boosted trees on the raw features (missing values
// handled by learned default directions).
//
// Quantum: median impute -> min-max scale into the angle range -> seeded
// feature shuffle -> Heisenberg feature map -> per-qubit Pauli projection
// (exact, MPS, or shot-based TREX backend) -> gradient-boosted trees on the
// projected features. All fitted state comes from training data only.
#pragma once

#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/dataset.hpp"
#include "qdr/feature_map.hpp"
#include "qdr/gbdt.hpp"
#include "qdr/pqf.hpp"
#include "qdr/preprocess.hpp"
#include "qdr/readout_noise.hpp"

namespace qdr {

enum class backend_kind { exact, mps, shots };

struct backend_config {
    backend_kind kind = backend_kind::exact;
    int chi_max = 64;          // mps
    double trunc_tol = 1e-10;  // mps
    double p10 = 0.0;          // shots
    double p01 = 0.0;          // shots
    std::size_t shots_per_circuit = 20000;
    std::size_t calibration_shots = 20000;
};

struct quantum_pipeline_config {
    int num_qubits = 10;
    double alpha = 1.0;
    int repetitions = 1;
    std::uint64_t haar_seed = 0;
    std::uint64_t shuffle_seed = 0;
    std::uint64_t gbdt_seed = 0;
    std::uint64_t shots_seed = 0;
    double scaler_lo = 0.3;
    double scaler_hi = 0.8;
    backend_config backend;
    gbdt_params gbdt;
    bool weighted_training = false;
};

class quantum_pipeline {
public:
    explicit quantum_pipeline(quantum_pipeline_config config) : config_(std::move(config)) {}

    void fit(const dataset& train) {
        impute_ = fit_median_impute(train);
        dataset imputed = train;
        imputed.features = transform_impute(impute_, train.features, train.num_features);
        scaler_ = fit_minmax(imputed, config_.scaler_lo, config_.scaler_hi);
        permutation_ = make_feature_permutation(train.num_features, config_.shuffle_seed);
        spec_ = feature_map_spec::make(config_.num_qubits, config_.alpha, config_.repetitions,
                                       config_.haar_seed,
                                       static_cast<int>(train.num_features));

        dataset projected = project_dataset(train);
        if (!config_.weighted_training) projected.weights.assign(projected.num_rows, 1.0);
        model_ = gbdt_fit(projected, config_.gbdt, config_.gbdt_seed);
        fitted_ = true;
    }

    std::vector<double> predict_proba(const dataset& data) const {
        if (!fitted_) throw validation_error("quantum_pipeline: predict before fit");
        return gbdt_predict_proba(model_, project_dataset(data));
    }

    // Scaled (pre-shuffle) feature matrix, for the diversity report.
    std::vector<double> scaled_features(const dataset& data) const {
        const auto imputed = transform_impute(impute_, data.features, data.num_features);
        return transform_minmax(scaler_, imputed, data.num_features);
    }

    // Projected features with labels/weights carried through.
    dataset project_dataset(const dataset& data) const {
        const auto imputed = transform_impute(impute_, data.features, data.num_features);
        const auto scaled = transform_minmax(scaler_, imputed, data.num_features);
        const auto shuffled = apply_permutation(permutation_, scaled, data.num_features);

        const std::size_t m = data.num_rows;
        const int n = config_.num_qubits;
        dataset out;
        out.num_rows = m;
        out.num_features = 3 * static_cast<std::size_t>(n);
        out.features.resize(m * out.num_features);
        out.labels = data.labels;
        out.weights = data.weights;
        out.feature_names.reserve(out.num_features);
        for (int q = 0; q < n; ++q) {
            for (const char* axis : {"X", "Y", "Z"}) {
                out.feature_names.push_back(std::string(axis) + std::to_string(q));
            }
        }

        std::vector<std::uint64_t> executions(m, 0);
        parallel_for(m, [&](std::size_t r) {
            std::vector<double> x(shuffled.begin() + r * data.num_features,
                                  shuffled.begin() + (r + 1) * data.num_features);
            execution_counter counter;
            const pqf_vector v = project_row(x, &counter);
            std::copy(v.begin(), v.end(), out.features.begin() + r * out.num_features);
            executions[r] = counter.count;
        });
        for (const auto e : executions) executions_ += e;
        return out;
    }

    std::uint64_t circuit_executions() const { return executions_; }
    const feature_map_spec& spec() const { return spec_; }
    const feature_layout& layout() const { return spec_.layout; }

private:
    pqf_vector project_row(const std::vector<double>& x, execution_counter* counter) const {
        switch (config_.backend.kind) {
            case backend_kind::exact:
                return project(execute_exact(spec_, x, counter));
            case backend_kind::mps:
                return project(execute_mps(spec_, x, config_.backend.chi_max,
                                           config_.backend.trunc_tol, counter));
            case backend_kind::shots: {
                const auto model =
                    readout_noise_model::uniform(config_.num_qubits, config_.backend.p10,
                                                 config_.backend.p01);
                trex_config trex;
                trex.shots_per_circuit = config_.backend.shots_per_circuit;
                trex.calibration_shots = config_.backend.calibration_shots;
                // Shot noise is keyed by the circuit inputs, so the same row
                // sees the same noise regardless of call order.
                std::uint64_t h = derive_seed(config_.shots_seed, 0x7e4);
                for (const double v : x) {
                    std::uint64_t bits;
                    static_assert(sizeof(bits) == sizeof(v));
                    std::memcpy(&bits, &v, sizeof(bits));
                    h = derive_seed(h, bits);
                }
                trex.twirl_seed = h;
                return pqf_with_shots(spec_, x, model, trex, counter);
            }
        }
        throw validation_error("quantum_pipeline: unknown backend");
    }

    quantum_pipeline_config config_;
    impute_params impute_;
    scaler_params scaler_;
    feature_permutation permutation_;
    feature_map_spec spec_;
    gbdt_model model_;
    bool fitted_ = false;
    mutable std::uint64_t executions_ = 0;
};

struct classical_pipeline_config {
    gbdt_params gbdt;
    std::uint64_t gbdt_seed = 0;
    bool weighted_training = false;
};

class classical_pipeline {
public:
    explicit classical_pipeline(classical_pipeline_config config) : config_(std::move(config)) {}

    void fit(const dataset& train) {
        dataset working = train;
        if (!config_.weighted_training) working.weights.assign(working.num_rows, 1.0);
        model_ = gbdt_fit(working, config_.gbdt, config_.gbdt_seed);
        fitted_ = true;
    }

    std::vector<double> predict_proba(const dataset& data) const {
        if (!fitted_) throw validation_error("classical_pipeline: predict before fit");
        return gbdt_predict_proba(model_, data);
    }

    const gbdt_model& model() const { return model_; }

private:
    classical_pipeline_config config_;
    gbdt_model model_;
    bool fitted_ = false;
};

}  // namespace qdr
