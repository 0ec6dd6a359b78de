// Matrix-product-state backend for the same nearest-neighbor circuit set as
// the exact simulator.
//
// The chain keeps an orthogonality center: sites left of it are
// left-canonical, sites right of it are right-canonical. Two-site gates move
// the center next to the pair by QR sweeps, contract the neighbors, apply
// the closed-form 4x4 Heisenberg gate, and split back by SVD. With
// orthonormal environments the singular values are the true Schmidt
// coefficients, so the relative-threshold truncation and the renormalization
// of the retained values are exact.
#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/statevector.hpp"

namespace qdr {

inline constexpr int kMaxMpsToStatevectorQubits = 20;

// Relative floor that drops numerically-zero singular values even in
// "untruncated" runs; their weight is far below every stated tolerance.
inline constexpr double kSchmidtRankFloor = 1e-14;

class mps_state {
public:
    // One (left bond x right bond) matrix per physical index value.
    using site_tensor = std::array<Eigen::MatrixXcd, 2>;

    mps_state(int num_qubits, int chi_max, double trunc_tol)
        : num_qubits_(num_qubits), chi_max_(chi_max), trunc_tol_(trunc_tol) {
        if (num_qubits < 1) throw validation_error("mps_state: need at least 1 qubit");
        if (chi_max < 1) throw validation_error("mps_state: chi_max must be >= 1");
        if (trunc_tol < 0) throw validation_error("mps_state: trunc_tol must be >= 0");
        sites_.resize(num_qubits);
        for (auto& site : sites_) {
            site[0] = Eigen::MatrixXcd::Constant(1, 1, cplx(1, 0));
            site[1] = Eigen::MatrixXcd::Zero(1, 1);
        }
    }

    int num_qubits() const { return num_qubits_; }
    int chi_max() const { return chi_max_; }
    double trunc_tol() const { return trunc_tol_; }
    const site_tensor& site(int i) const { return sites_[i]; }

    int bond_dimension(int cut) const {  // bond between sites cut and cut+1
        return static_cast<int>(sites_[cut][0].cols());
    }

    int max_bond_dimension() const {
        int chi = 1;
        for (int i = 0; i + 1 < num_qubits_; ++i) chi = std::max(chi, bond_dimension(i));
        return chi;
    }

    void apply_single_qubit(const single_qubit_unitary& u, int q) {
        check_qubit(q);
        if (u.unitarity_defect() > 1e-12) {
            throw validation_error("mps apply_single_qubit: matrix is not unitary to 1e-12");
        }
        apply_single_qubit_unchecked(u, q);
    }

    // Unitarity keeps canonical forms intact, so the center does not move.
    void apply_single_qubit_unchecked(const single_qubit_unitary& u, int q) {
        auto& site = sites_[q];
        Eigen::MatrixXcd a0 = u.u[0][0] * site[0] + u.u[0][1] * site[1];
        Eigen::MatrixXcd a1 = u.u[1][0] * site[0] + u.u[1][1] * site[1];
        site[0] = std::move(a0);
        site[1] = std::move(a1);
    }

    void apply_heisenberg(const heisenberg_coupling& g) {
        const int j = g.qubit_index;
        if (j < 0 || j >= num_qubits_ - 1) {
            throw std::out_of_range("mps apply_heisenberg: coupling index " + std::to_string(j) +
                                    " has no right neighbor for n=" + std::to_string(num_qubits_));
        }
        while (center_ < j) shift_center_right();
        while (center_ > j + 1) shift_center_left();

        const cplx e_m = std::polar(1.0, -g.theta);
        const cplx e_p = std::polar(1.0, 3.0 * g.theta);
        const cplx d = 0.5 * (e_m + e_p);
        const cplx o = 0.5 * (e_m - e_p);

        const auto& left = sites_[j];
        const auto& right = sites_[j + 1];
        const Eigen::Index dl = left[0].rows();
        const Eigen::Index dr = right[0].cols();

        // theta[pj][pj1] spans (left bond) x (right bond).
        std::array<std::array<Eigen::MatrixXcd, 2>, 2> theta;
        for (int pj = 0; pj < 2; ++pj)
            for (int pj1 = 0; pj1 < 2; ++pj1) theta[pj][pj1] = left[pj] * right[pj1];

        // Gate action in the closed form shared with the exact backend:
        // |00> and |11> take e^{-i theta}; the mixed block mixes with the
        // triplet/singlet weights.
        std::array<std::array<Eigen::MatrixXcd, 2>, 2> gated;
        gated[0][0] = e_m * theta[0][0];
        gated[1][1] = e_m * theta[1][1];
        gated[1][0] = d * theta[1][0] + o * theta[0][1];
        gated[0][1] = o * theta[1][0] + d * theta[0][1];

        // Regroup as (dl*2) x (2*dr) with row (a, pj) and column (pj1, c).
        Eigen::MatrixXcd m(dl * 2, 2 * dr);
        for (int pj = 0; pj < 2; ++pj) {
            for (int pj1 = 0; pj1 < 2; ++pj1) {
                for (Eigen::Index a = 0; a < dl; ++a) {
                    m.block(a * 2 + pj, pj1 * dr, 1, dr) = gated[pj][pj1].row(a);
                }
            }
        }

        Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double smax = sv(0);
        const double floor = std::max(trunc_tol_, kSchmidtRankFloor) * smax;

        Eigen::Index keep = 0;
        while (keep < sv.size() && sv(keep) >= floor && sv(keep) > 0.0) ++keep;
        keep = std::max<Eigen::Index>(1, std::min<Eigen::Index>(keep, chi_max_));

        // Renormalize the retained Schmidt values to preserve unit norm.
        double kept_sq = 0.0;
        for (Eigen::Index k = 0; k < keep; ++k) kept_sq += sv(k) * sv(k);
        const double scale = 1.0 / std::sqrt(kept_sq);

        auto& new_left = sites_[j];
        auto& new_right = sites_[j + 1];
        for (int pj = 0; pj < 2; ++pj) {
            new_left[pj].resize(dl, keep);
            for (Eigen::Index a = 0; a < dl; ++a) {
                new_left[pj].row(a) = svd.matrixU().block(a * 2 + pj, 0, 1, keep);
            }
        }
        for (int pj1 = 0; pj1 < 2; ++pj1) {
            new_right[pj1].resize(keep, dr);
            for (Eigen::Index k = 0; k < keep; ++k) {
                new_right[pj1].row(k) =
                    sv(k) * scale * svd.matrixV().block(pj1 * dr, k, dr, 1).adjoint();
            }
        }
        center_ = j + 1;  // U is left-canonical, sigma V† holds the center
    }

    double pauli_expectation(pauli_axis axis, int q) const {
        check_qubit(q);
        Eigen::MatrixXcd left = left_environment(q);
        Eigen::MatrixXcd right = right_environment(q + 1);
        return site_expectation(axis, q, left, right);
    }

    // All 3n expectations in one sweep with cached environments.
    std::vector<double> all_pauli_expectations() const {
        std::vector<Eigen::MatrixXcd> right_envs(num_qubits_ + 1);
        right_envs[num_qubits_] = Eigen::MatrixXcd::Constant(1, 1, cplx(1, 0));
        for (int i = num_qubits_ - 1; i >= 0; --i) {
            const auto& site = sites_[i];
            right_envs[i] = site[0] * right_envs[i + 1] * site[0].adjoint() +
                            site[1] * right_envs[i + 1] * site[1].adjoint();
        }
        std::vector<double> out(3 * static_cast<std::size_t>(num_qubits_));
        Eigen::MatrixXcd left = Eigen::MatrixXcd::Constant(1, 1, cplx(1, 0));
        for (int q = 0; q < num_qubits_; ++q) {
            out[3 * q + 0] = site_expectation(pauli_axis::x, q, left, right_envs[q + 1]);
            out[3 * q + 1] = site_expectation(pauli_axis::y, q, left, right_envs[q + 1]);
            out[3 * q + 2] = site_expectation(pauli_axis::z, q, left, right_envs[q + 1]);
            const auto& site = sites_[q];
            left = site[0].transpose() * left * site[0].conjugate() +
                   site[1].transpose() * left * site[1].conjugate();
        }
        return out;
    }

    double norm_sq() const { return left_environment(num_qubits_)(0, 0).real(); }

    // Full contraction; bounded to keep memory at most a few MB.
    state_vector to_statevector() const {
        if (num_qubits_ > kMaxMpsToStatevectorQubits) {
            throw capacity_error("mps to_statevector: n=" + std::to_string(num_qubits_) +
                                 " exceeds cap of " + std::to_string(kMaxMpsToStatevectorQubits));
        }
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Constant(1, 1, cplx(1, 0));
        for (int i = 0; i < num_qubits_; ++i) {
            const auto& site = sites_[i];
            // Row idx encodes qubits 0..i-1 as bits; the p_i = 1 block lands
            // at offset 2^i, keeping qubit i as bit i.
            Eigen::MatrixXcd next(acc.rows() * 2, site[0].cols());
            next.topRows(acc.rows()) = acc * site[0];
            next.bottomRows(acc.rows()) = acc * site[1];
            acc = std::move(next);
        }
        state_vector out(num_qubits_);
        for (Eigen::Index idx = 0; idx < acc.rows(); ++idx) {
            out.amplitudes()[static_cast<std::size_t>(idx)] = acc(idx, 0);
        }
        return out;
    }

private:
    void check_qubit(int q) const {
        if (q < 0 || q >= num_qubits_) {
            throw std::out_of_range("mps: qubit index " + std::to_string(q) +
                                    " out of range for n=" + std::to_string(num_qubits_));
        }
    }

    // Left-canonicalize the center site and absorb the remainder rightward.
    void shift_center_right() {
        auto& site = sites_[center_];
        const Eigen::Index dl = site[0].rows();
        const Eigen::Index dr = site[0].cols();
        Eigen::MatrixXcd stacked(2 * dl, dr);  // row (a, p)
        for (int p = 0; p < 2; ++p) {
            for (Eigen::Index a = 0; a < dl; ++a) stacked.row(a * 2 + p) = site[p].row(a);
        }
        const Eigen::Index rank = std::min(stacked.rows(), stacked.cols());
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
        const Eigen::MatrixXcd q =
            qr.householderQ() * Eigen::MatrixXcd::Identity(stacked.rows(), rank);
        const Eigen::MatrixXcd r = qr.matrixQR()
                                       .topRows(rank)
                                       .template triangularView<Eigen::Upper>();
        for (int p = 0; p < 2; ++p) {
            site[p].resize(dl, rank);
            for (Eigen::Index a = 0; a < dl; ++a) site[p].row(a) = q.row(a * 2 + p);
        }
        auto& next = sites_[center_ + 1];
        next[0] = r * next[0];
        next[1] = r * next[1];
        ++center_;
    }

    // Right-canonicalize the center site and absorb the remainder leftward.
    void shift_center_left() {
        auto& site = sites_[center_];
        const Eigen::Index dl = site[0].rows();
        const Eigen::Index dr = site[0].cols();
        Eigen::MatrixXcd wide(dl, 2 * dr);  // column (p, c)
        wide.leftCols(dr) = site[0];
        wide.rightCols(dr) = site[1];
        // QR of the adjoint: wide = R† Q† with Q† having orthonormal rows.
        const Eigen::Index rank = std::min(dl, 2 * dr);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(wide.adjoint());
        const Eigen::MatrixXcd q =
            qr.householderQ() * Eigen::MatrixXcd::Identity(2 * dr, rank);
        const Eigen::MatrixXcd r = qr.matrixQR()
                                       .topRows(rank)
                                       .template triangularView<Eigen::Upper>();
        const Eigen::MatrixXcd qh = q.adjoint();  // rank x 2dr
        site[0] = qh.leftCols(dr);
        site[1] = qh.rightCols(dr);
        auto& prev = sites_[center_ - 1];
        const Eigen::MatrixXcd rh = r.adjoint();  // dl x rank
        prev[0] = prev[0] * rh;
        prev[1] = prev[1] * rh;
        --center_;
    }

    // Contraction of sites [0, upto) without operator insertions.
    Eigen::MatrixXcd left_environment(int upto) const {
        Eigen::MatrixXcd left = Eigen::MatrixXcd::Constant(1, 1, cplx(1, 0));
        for (int i = 0; i < upto; ++i) {
            const auto& site = sites_[i];
            left = site[0].transpose() * left * site[0].conjugate() +
                   site[1].transpose() * left * site[1].conjugate();
        }
        return left;
    }

    // Contraction of sites [from, n) without operator insertions.
    Eigen::MatrixXcd right_environment(int from) const {
        Eigen::MatrixXcd right = Eigen::MatrixXcd::Constant(1, 1, cplx(1, 0));
        for (int i = num_qubits_ - 1; i >= from; --i) {
            const auto& site = sites_[i];
            right = site[0] * right * site[0].adjoint() + site[1] * right * site[1].adjoint();
        }
        return right;
    }

    double site_expectation(pauli_axis axis, int q, const Eigen::MatrixXcd& left,
                            const Eigen::MatrixXcd& right) const {
        const auto& site = sites_[q];
        std::array<std::array<cplx, 2>, 2> op{};  // op[p'][p]
        switch (axis) {
            case pauli_axis::x: op[0][1] = op[1][0] = cplx(1, 0); break;
            case pauli_axis::y: op[0][1] = cplx(0, -1); op[1][0] = cplx(0, 1); break;
            case pauli_axis::z: op[0][0] = cplx(1, 0); op[1][1] = cplx(-1, 0); break;
        }
        cplx val(0, 0);
        for (int p = 0; p < 2; ++p) {
            for (int pp = 0; pp < 2; ++pp) {
                if (op[pp][p] == cplx(0, 0)) continue;
                val += op[pp][p] *
                       (site[p].transpose() * left * site[pp].conjugate() * right.transpose())
                           .trace();
            }
        }
        return val.real();
    }

    int num_qubits_;
    int chi_max_;
    double trunc_tol_;
    int center_ = 0;
    std::vector<site_tensor> sites_;
};

inline mps_state mps_zero_state(int num_qubits, int chi_max, double trunc_tol) {
    return mps_state(num_qubits, chi_max, trunc_tol);
}

}  // namespace qdr
