// Exact statevector backend: n-qubit pure states acted on by single-qubit
// unitaries and nearest-neighbor Heisenberg couplings.
//
// Convention shared by every module: qubit 0 is the least significant bit of
// the amplitude index.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "qdr/common.hpp"

namespace qdr {

inline constexpr int kMaxExactQubits = 30;

struct single_qubit_unitary {
    // Row-major 2x2: u[r][c] maps amplitude of |c> into |r>.
    std::array<std::array<cplx, 2>, 2> u;

    // Max-abs entrywise deviation of U U† from identity.
    double unitarity_defect() const {
        double worst = 0.0;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                cplx s = u[r][0] * std::conj(u[c][0]) + u[r][1] * std::conj(u[c][1]);
                if (r == c) s -= 1.0;
                worst = std::max(worst, std::abs(s));
            }
        }
        return worst;
    }
};

inline single_qubit_unitary identity_unitary() {
    return {{{{cplx(1, 0), cplx(0, 0)}, {cplx(0, 0), cplx(1, 0)}}}};
}

inline single_qubit_unitary pauli_x_unitary() {
    return {{{{cplx(0, 0), cplx(1, 0)}, {cplx(1, 0), cplx(0, 0)}}}};
}

// exp(-i theta (XX+YY+ZZ)) on the adjacent pair (qubit_index, qubit_index+1).
struct heisenberg_coupling {
    int qubit_index = 0;
    double theta = 0.0;
};

enum class pauli_axis { x, y, z };

class state_vector {
public:
    explicit state_vector(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxExactQubits) {
            throw capacity_error("state_vector: qubit count " + std::to_string(num_qubits) +
                                 " outside [1, " + std::to_string(kMaxExactQubits) + "]");
        }
        amplitudes_.assign(std::size_t{1} << num_qubits, cplx(0, 0));
        amplitudes_[0] = cplx(1, 0);
    }

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }
    const std::vector<cplx>& amplitudes() const { return amplitudes_; }
    std::vector<cplx>& amplitudes() { return amplitudes_; }

    double norm_sq() const {
        double s = 0.0;
        for (const cplx& a : amplitudes_) s += std::norm(a);
        return s;
    }

    void apply_single_qubit(const single_qubit_unitary& u, int q) {
        check_qubit(q);
        if (u.unitarity_defect() > 1e-12) {
            throw validation_error("apply_single_qubit: matrix is not unitary to 1e-12");
        }
        apply_single_qubit_unchecked(u, q);
    }

    // Internal entry point for callers that already validated u (the Haar
    // layer is sampled unitary by construction; basis rotations are fixed).
    void apply_single_qubit_unchecked(const single_qubit_unitary& u, int q) {
        const std::size_t mask = std::size_t{1} << q;
        const std::size_t dim = amplitudes_.size();
        const cplx u00 = u.u[0][0], u01 = u.u[0][1], u10 = u.u[1][0], u11 = u.u[1][1];
        // Iterate indices with bit q clear; partner has it set.
        const std::size_t low_mask = mask - 1;
        for (std::size_t base = 0; base < dim / 2; ++base) {
            const std::size_t i0 = ((base & ~low_mask) << 1) | (base & low_mask);
            const std::size_t i1 = i0 | mask;
            const cplx a0 = amplitudes_[i0];
            const cplx a1 = amplitudes_[i1];
            amplitudes_[i0] = u00 * a0 + u01 * a1;
            amplitudes_[i1] = u10 * a0 + u11 * a1;
        }
    }

    // Closed form of exp(-i theta (XX+YY+ZZ)): |00> and |11> pick up
    // e^{-i theta}; on span{|01>,|10>} the triplet projector gets e^{-i theta}
    // and the singlet projector e^{+3 i theta}.
    void apply_heisenberg(const heisenberg_coupling& g) {
        const int j = g.qubit_index;
        if (j < 0 || j >= num_qubits_ - 1) {
            throw std::out_of_range("apply_heisenberg: coupling index " + std::to_string(j) +
                                    " has no right neighbor for n=" + std::to_string(num_qubits_));
        }
        const cplx e_m = std::polar(1.0, -g.theta);
        const cplx e_p = std::polar(1.0, 3.0 * g.theta);
        const cplx d = 0.5 * (e_m + e_p);   // diagonal of the 01/10 block
        const cplx o = 0.5 * (e_m - e_p);   // off-diagonal of the 01/10 block

        const std::size_t mj = std::size_t{1} << j;
        const std::size_t mj1 = std::size_t{1} << (j + 1);
        const std::size_t dim = amplitudes_.size();
        for (std::size_t i = 0; i < dim; ++i) {
            const bool bj = (i & mj) != 0;
            const bool bj1 = (i & mj1) != 0;
            if (bj == bj1) {
                amplitudes_[i] *= e_m;
            } else if (bj && !bj1) {
                // Visit each mixed pair once, from its |01>-side index.
                const std::size_t partner = (i ^ mj) | mj1;
                const cplx a01 = amplitudes_[i];
                const cplx a10 = amplitudes_[partner];
                amplitudes_[i] = d * a01 + o * a10;
                amplitudes_[partner] = o * a01 + d * a10;
            }
        }
    }

    double pauli_expectation(pauli_axis axis, int q) const {
        check_qubit(q);
        const std::size_t mask = std::size_t{1} << q;
        const std::size_t dim = amplitudes_.size();
        const std::size_t low_mask = mask - 1;
        double acc = 0.0;
        switch (axis) {
            case pauli_axis::z:
                for (std::size_t i = 0; i < dim; ++i) {
                    acc += ((i & mask) ? -1.0 : 1.0) * std::norm(amplitudes_[i]);
                }
                break;
            case pauli_axis::x:
                for (std::size_t base = 0; base < dim / 2; ++base) {
                    const std::size_t i0 = ((base & ~low_mask) << 1) | (base & low_mask);
                    acc += 2.0 * (std::conj(amplitudes_[i0]) * amplitudes_[i0 | mask]).real();
                }
                break;
            case pauli_axis::y:
                for (std::size_t base = 0; base < dim / 2; ++base) {
                    const std::size_t i0 = ((base & ~low_mask) << 1) | (base & low_mask);
                    acc += 2.0 * (std::conj(amplitudes_[i0]) * amplitudes_[i0 | mask]).imag();
                }
                break;
        }
        return acc;
    }

    // i.i.d. samples from |amplitude|^2; deterministic for a fixed seed.
    std::vector<std::uint64_t> sample_bitstrings(std::size_t shots, std::uint64_t seed) const {
        if (shots < 1) throw validation_error("sample_bitstrings: shots must be >= 1");
        std::vector<double> cumulative(amplitudes_.size());
        double run = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            run += std::norm(amplitudes_[i]);
            cumulative[i] = run;
        }
        cumulative.back() = std::max(cumulative.back(), 1.0);
        rng_engine rng(seed);
        std::vector<std::uint64_t> out(shots);
        for (std::size_t s = 0; s < shots; ++s) {
            const double r = rng_u01(rng) * run;
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
            out[s] = static_cast<std::uint64_t>(it - cumulative.begin());
        }
        return out;
    }

private:
    void check_qubit(int q) const {
        if (q < 0 || q >= num_qubits_) {
            throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for n=" +
                                    std::to_string(num_qubits_));
        }
    }

    int num_qubits_;
    std::vector<cplx> amplitudes_;
};

inline state_vector new_zero_state(int num_qubits) { return state_vector(num_qubits); }

}  // namespace qdr
