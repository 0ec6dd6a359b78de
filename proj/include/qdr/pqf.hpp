// Projected quantum features: per-qubit Pauli expectations (equivalently the
// Bloch vectors of the one-body reduced density matrices) and the Gaussian
// kernel over their Frobenius distances.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/mps.hpp"
#include "qdr/statevector.hpp"

namespace qdr {

struct bloch_vector {
    double bx = 0.0, by = 0.0, bz = 0.0;
    double norm_sq() const { return bx * bx + by * by + bz * bz; }
};

// 3n values ordered (<X_0>,<Y_0>,<Z_0>, <X_1>,...). This qubit-major X,Y,Z
// order is the canonical column order of every exported PQF dataset.
using pqf_vector = std::vector<double>;

inline pqf_vector project(const state_vector& state) {
    const int n = state.num_qubits();
    pqf_vector out(3 * static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        out[3 * q + 0] = state.pauli_expectation(pauli_axis::x, q);
        out[3 * q + 1] = state.pauli_expectation(pauli_axis::y, q);
        out[3 * q + 2] = state.pauli_expectation(pauli_axis::z, q);
    }
    return out;
}

inline pqf_vector project(const mps_state& state) { return state.all_pauli_expectations(); }

inline bloch_vector bloch_of(const pqf_vector& v, int qubit) {
    return {v[3 * qubit], v[3 * qubit + 1], v[3 * qubit + 2]};
}

// Sum over qubits of ||rho_k(a) - rho_k(b)||_F^2. For 1-RDMs with Bloch
// increment db the Frobenius norm is ||db||^2 / 2, hence the half.
inline double pqk_distance_sq(const pqf_vector& a, const pqf_vector& b) {
    if (a.size() != b.size()) {
        throw validation_error("pqk_distance_sq: vector lengths differ");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return 0.5 * s;
}

inline double pqk_kernel(const pqf_vector& a, const pqf_vector& b, double gamma) {
    if (gamma <= 0.0) throw validation_error("pqk_kernel: gamma must be positive");
    return std::exp(-gamma * pqk_distance_sq(a, b));
}

inline Eigen::MatrixXd gram_matrix(const std::vector<pqf_vector>& vectors, double gamma) {
    if (vectors.empty()) throw validation_error("gram_matrix: empty vector list");
    const Eigen::Index m = static_cast<Eigen::Index>(vectors.size());
    Eigen::MatrixXd gram(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        gram(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double k = pqk_kernel(vectors[i], vectors[j], gamma);
            gram(i, j) = k;
            gram(j, i) = k;
        }
    }
    return gram;
}

}  // namespace qdr
