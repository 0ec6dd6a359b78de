// Shot-based Pauli estimation under per-qubit asymmetric readout error, with
// twirled readout mitigation: each shot applies random pre-measurement X
// flips (probability 1/2 per qubit) whose effect is inverted classically, so
// the readout channel on <Z_q> collapses to a scalar attenuation
// lambda_q = 1 - p10_q - p01_q, estimated on the empty |0^n> circuit and
// divided out.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/feature_map.hpp"
#include "qdr/pqf.hpp"
#include "qdr/statevector.hpp"

namespace qdr {

struct readout_noise_model {
    std::vector<double> p10;  // Pr(read 1 | true 0) per qubit
    std::vector<double> p01;  // Pr(read 0 | true 1) per qubit

    static readout_noise_model uniform(int num_qubits, double p10_all, double p01_all) {
        readout_noise_model m;
        m.p10.assign(num_qubits, p10_all);
        m.p01.assign(num_qubits, p01_all);
        m.validate();
        return m;
    }

    static readout_noise_model noiseless(int num_qubits) { return uniform(num_qubits, 0.0, 0.0); }

    int num_qubits() const { return static_cast<int>(p10.size()); }

    void validate() const {
        if (p10.size() != p01.size()) {
            throw validation_error("readout_noise_model: p10/p01 length mismatch");
        }
        for (std::size_t q = 0; q < p10.size(); ++q) {
            if (p10[q] < 0.0 || p10[q] >= 0.5 || p01[q] < 0.0 || p01[q] >= 0.5) {
                throw validation_error("readout_noise_model: probabilities must lie in [0, 0.5)");
            }
        }
    }

    double lambda(int q) const { return 1.0 - p10[q] - p01[q]; }
};

struct trex_config {
    std::size_t shots_per_circuit = 10000;
    std::size_t calibration_shots = 10000;
    std::uint64_t twirl_seed = 0;

    void validate() const {
        if (shots_per_circuit < 1 || calibration_shots < 1) {
            throw validation_error("trex_config: shot counts must be >= 1");
        }
    }
};

inline single_qubit_unitary x_basis_rotation() {  // H: maps X eigenbasis to Z
    const double s = 1.0 / std::sqrt(2.0);
    return {{{{cplx(s, 0), cplx(s, 0)}, {cplx(s, 0), cplx(-s, 0)}}}};
}

inline single_qubit_unitary y_basis_rotation() {  // H S†: maps Y eigenbasis to Z
    const double s = 1.0 / std::sqrt(2.0);
    return {{{{cplx(s, 0), cplx(0, -s)}, {cplx(s, 0), cplx(0, s)}}}};
}

namespace detail {

// Mean of sign-corrected +/-1 readouts per qubit. `ideal` supplies the
// noiseless bitstring per shot; twirl masks and readout flips are drawn from
// one seeded stream in fixed order, so results are reproducible.
template <typename IdealBits>
std::vector<double> twirled_z_means(int num_qubits, std::size_t shots, IdealBits&& ideal,
                                    const readout_noise_model& model, std::uint64_t seed,
                                    bool twirl) {
    rng_engine rng(seed);
    std::vector<double> acc(num_qubits, 0.0);
    for (std::size_t s = 0; s < shots; ++s) {
        const std::uint64_t bits = ideal(s);
        for (int q = 0; q < num_qubits; ++q) {
            bool bit = (bits >> q) & 1;
            bool flipped = false;
            if (twirl) {
                flipped = rng_u01(rng) < 0.5;
                bit ^= flipped;
            }
            const double flip_prob = bit ? model.p01[q] : model.p10[q];
            bool read = bit;
            if (rng_u01(rng) < flip_prob) read = !read;
            double z = read ? -1.0 : 1.0;
            if (flipped) z = -z;
            acc[q] += z;
        }
    }
    for (double& v : acc) v /= static_cast<double>(shots);
    return acc;
}

}  // namespace detail

// Unmitigated empirical <Z_q>: sample, push through the readout channel,
// average. Bias is state dependent, which is what the twirl removes.
inline double noisy_sample_z(const state_vector& state, int q, const readout_noise_model& model,
                             std::size_t shots, std::uint64_t seed) {
    if (shots < 1) throw validation_error("noisy_sample_z: shots must be >= 1");
    const auto outcomes = state.sample_bitstrings(shots, derive_seed(seed, 0x5a5a));
    const auto means = detail::twirled_z_means(
        state.num_qubits(), shots, [&](std::size_t s) { return outcomes[s]; }, model,
        derive_seed(seed, 0xf11b), /*twirl=*/false);
    return means[q];
}

// Attenuation estimate from the empty circuit: all true bits are 0, so the
// sign-corrected mean converges to lambda_q.
inline std::vector<double> trex_calibrate(const readout_noise_model& model, int num_qubits,
                                          std::size_t calibration_shots, std::uint64_t seed) {
    return detail::twirled_z_means(
        num_qubits, calibration_shots, [](std::size_t) { return std::uint64_t{0}; }, model, seed,
        /*twirl=*/true);
}

// Twirled estimate of <Z_q> for every qubit of `state` (already rotated into
// the measurement basis).
inline std::vector<double> trex_target_means(const state_vector& state,
                                             const readout_noise_model& model, std::size_t shots,
                                             std::uint64_t seed) {
    const auto outcomes = state.sample_bitstrings(shots, derive_seed(seed, 0x5a5a));
    return detail::twirled_z_means(
        state.num_qubits(), shots, [&](std::size_t s) { return outcomes[s]; }, model,
        derive_seed(seed, 0xf11b), /*twirl=*/true);
}

// Mitigated single-observable estimate: basis-rotate, measure twirled, divide
// by the calibrated attenuation, clip into [-1, 1].
inline double trex_estimate(const state_vector& state, pauli_axis axis, int q,
                            const readout_noise_model& model, const trex_config& config) {
    config.validate();
    model.validate();
    if (q < 0 || q >= state.num_qubits()) {
        throw std::out_of_range("trex_estimate: qubit index out of range");
    }
    const auto lambdas = trex_calibrate(model, state.num_qubits(), config.calibration_shots,
                                        derive_seed(config.twirl_seed, 0xca1));
    if (lambdas[q] < 0.1) {
        throw mitigation_error("trex_estimate: calibrated attenuation below 0.1");
    }
    state_vector rotated = state;
    if (axis == pauli_axis::x) rotated.apply_single_qubit_unchecked(x_basis_rotation(), q);
    if (axis == pauli_axis::y) rotated.apply_single_qubit_unchecked(y_basis_rotation(), q);
    const auto means =
        trex_target_means(rotated, model, config.shots_per_circuit,
                          derive_seed(config.twirl_seed, static_cast<std::uint64_t>(axis),
                                      static_cast<std::uint64_t>(q)));
    return std::clamp(means[q] / lambdas[q], -1.0, 1.0);
}

// Shot-based PQF vector: one circuit execution, one calibration, and one
// twirled measurement pass per Pauli axis shared by all qubits.
inline pqf_vector pqf_with_shots(const feature_map_spec& spec, std::span<const double> x,
                                 const readout_noise_model& model, const trex_config& config,
                                 execution_counter* counter = nullptr) {
    config.validate();
    model.validate();
    const state_vector state = execute_exact(spec, x, counter);
    const int n = state.num_qubits();
    const auto lambdas =
        trex_calibrate(model, n, config.calibration_shots, derive_seed(config.twirl_seed, 0xca1));
    for (int q = 0; q < n; ++q) {
        if (lambdas[q] < 0.1) {
            throw mitigation_error("pqf_with_shots: calibrated attenuation below 0.1 on qubit " +
                                   std::to_string(q));
        }
    }
    pqf_vector out(3 * static_cast<std::size_t>(n));
    const pauli_axis axes[3] = {pauli_axis::x, pauli_axis::y, pauli_axis::z};
    for (int a = 0; a < 3; ++a) {
        state_vector rotated = state;
        for (int q = 0; q < n; ++q) {
            if (axes[a] == pauli_axis::x) {
                rotated.apply_single_qubit_unchecked(x_basis_rotation(), q);
            } else if (axes[a] == pauli_axis::y) {
                rotated.apply_single_qubit_unchecked(y_basis_rotation(), q);
            }
        }
        const auto means =
            trex_target_means(rotated, model, config.shots_per_circuit,
                              derive_seed(config.twirl_seed, 0xba7c4, static_cast<std::uint64_t>(a)));
        for (int q = 0; q < n; ++q) {
            out[3 * q + a] = std::clamp(means[q] / lambdas[q], -1.0, 1.0);
        }
    }
    return out;
}

}  // namespace qdr
