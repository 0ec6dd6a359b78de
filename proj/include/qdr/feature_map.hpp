// Heisenberg feature-map circuits: a fixed Haar-random single-qubit layer
// followed by R repetitions of even- then odd-index nearest-neighbor
// couplings whose angles are alpha * feature value.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/mps.hpp"
#include "qdr/statevector.hpp"

namespace qdr {

// Sample from the Haar measure on U(2): QR-decompose a matrix of i.i.d.
// standard complex Gaussians via modified Gram-Schmidt, then absorb the
// phases of R's diagonal (Gram-Schmidt already makes them +1, which is the
// unique positive-diagonal QR that fixes the density).
inline single_qubit_unitary sample_haar_unitary(rng_engine& rng) {
    cplx a0(rng_normal(rng), rng_normal(rng));
    cplx a1(rng_normal(rng), rng_normal(rng));
    cplx b0(rng_normal(rng), rng_normal(rng));
    cplx b1(rng_normal(rng), rng_normal(rng));

    const double r00 = std::sqrt(std::norm(a0) + std::norm(a1));
    a0 /= r00;
    a1 /= r00;
    const cplx r01 = std::conj(a0) * b0 + std::conj(a1) * b1;
    b0 -= r01 * a0;
    b1 -= r01 * a1;
    const double r11 = std::sqrt(std::norm(b0) + std::norm(b1));
    b0 /= r11;
    b1 /= r11;

    return {{{{a0, b0}, {a1, b1}}}};
}

// Maps each coupling slot (repetition r, coupling j) to a feature index.
struct feature_layout {
    int num_qubits = 0;
    int repetitions = 0;
    int num_features = 0;
    std::vector<int> assignment;  // slot s = r*(n-1)+j -> feature index
    bool covers_all_features = true;

    int feature_for(int repetition, int coupling) const {
        return assignment[static_cast<std::size_t>(repetition) * (num_qubits - 1) + coupling];
    }
};

// Cyclic assignment: slot s = r*(n-1)+j encodes feature s mod F. Reduces to
// the identity mapping j -> j when F = n-1. When R*(n-1) < F some features
// are never encoded; that is recorded, not rejected.
inline feature_layout default_layout(int num_features, int num_qubits, int repetitions) {
    if (num_qubits < 2) throw validation_error("default_layout: need at least 2 qubits");
    if (num_features < 1) throw validation_error("default_layout: need at least 1 feature");
    if (repetitions < 1) throw validation_error("default_layout: need at least 1 repetition");
    feature_layout layout;
    layout.num_qubits = num_qubits;
    layout.repetitions = repetitions;
    layout.num_features = num_features;
    const int slots = repetitions * (num_qubits - 1);
    layout.assignment.resize(slots);
    for (int s = 0; s < slots; ++s) layout.assignment[s] = s % num_features;
    layout.covers_all_features = slots >= num_features;
    return layout;
}

struct feature_map_spec {
    int num_qubits = 2;
    double alpha = 1.0;
    int repetitions = 1;
    std::uint64_t haar_seed = 0;
    int num_features = 1;
    feature_layout layout;

    static feature_map_spec make(int num_qubits, double alpha, int repetitions,
                                 std::uint64_t haar_seed, int num_features) {
        if (num_qubits < 2) throw validation_error("feature_map_spec: need at least 2 qubits");
        feature_map_spec spec;
        spec.num_qubits = num_qubits;
        spec.alpha = alpha;
        spec.repetitions = repetitions;
        spec.haar_seed = haar_seed;
        spec.num_features = num_features;
        spec.layout = default_layout(num_features, num_qubits, repetitions);
        return spec;
    }

    // The |psi_j> layer is fixed per haar_seed, identical across data vectors.
    std::vector<single_qubit_unitary> haar_layer() const {
        rng_engine rng(derive_seed(haar_seed, 0x68616172));  // "haar" stream
        std::vector<single_qubit_unitary> layer;
        layer.reserve(num_qubits);
        for (int q = 0; q < num_qubits; ++q) layer.push_back(sample_haar_unitary(rng));
        return layer;
    }
};

struct circuit_gate {
    enum class kind { single_qubit, coupling } type;
    int qubit = 0;                // target qubit, or left qubit of the pair
    single_qubit_unitary unitary; // valid when type == single_qubit
    double theta = 0.0;           // valid when type == coupling
};

// Haar layer first, then per repetition all even-index couplings (ascending)
// followed by all odd-index couplings (ascending).
inline std::vector<circuit_gate> build_circuit(const feature_map_spec& spec,
                                               std::span<const double> x) {
    if (static_cast<int>(x.size()) != spec.num_features) {
        throw validation_error("build_circuit: expected " + std::to_string(spec.num_features) +
                               " features, got " + std::to_string(x.size()));
    }
    std::vector<circuit_gate> gates;
    const int n = spec.num_qubits;
    gates.reserve(n + static_cast<std::size_t>(spec.repetitions) * (n - 1));
    const auto haar = spec.haar_layer();
    for (int q = 0; q < n; ++q) {
        gates.push_back({circuit_gate::kind::single_qubit, q, haar[q], 0.0});
    }
    for (int r = 0; r < spec.repetitions; ++r) {
        for (int parity = 0; parity <= 1; ++parity) {
            for (int j = parity; j <= n - 2; j += 2) {
                const double theta = spec.alpha * x[spec.layout.feature_for(r, j)];
                gates.push_back({circuit_gate::kind::coupling, j, {}, theta});
            }
        }
    }
    return gates;
}

// Counts circuit executions so the linear-cost contract of the projected
// feature transform is checkable. Not thread-shared: callers keep one per
// execution context.
struct execution_counter {
    std::uint64_t count = 0;
};

inline state_vector execute_exact(const feature_map_spec& spec, std::span<const double> x,
                                  execution_counter* counter = nullptr) {
    state_vector state(spec.num_qubits);
    for (const auto& g : build_circuit(spec, x)) {
        if (g.type == circuit_gate::kind::single_qubit) {
            state.apply_single_qubit_unchecked(g.unitary, g.qubit);
        } else {
            state.apply_heisenberg({g.qubit, g.theta});
        }
    }
    if (counter) ++counter->count;
    return state;
}

inline mps_state execute_mps(const feature_map_spec& spec, std::span<const double> x,
                             int chi_max, double trunc_tol,
                             execution_counter* counter = nullptr) {
    mps_state state(spec.num_qubits, chi_max, trunc_tol);
    for (const auto& g : build_circuit(spec, x)) {
        if (g.type == circuit_gate::kind::single_qubit) {
            state.apply_single_qubit_unchecked(g.unitary, g.qubit);
        } else {
            state.apply_heisenberg({g.qubit, g.theta});
        }
    }
    if (counter) ++counter->count;
    return state;
}

}  // namespace qdr
