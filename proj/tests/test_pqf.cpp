#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "oracle.hpp"
#include "qdr/feature_map.hpp"
#include "qdr/pqf.hpp"
#include "qdr/readout_noise.hpp"

using namespace qdr;

TEST_CASE("projection of |0...0> is (0,0,1) per qubit") {
    const auto v = project(state_vector(3));
    REQUIRE(v.size() == 9);
    for (int q = 0; q < 3; ++q) {
        REQUIRE(v[3 * q + 0] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(v[3 * q + 1] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(v[3 * q + 2] == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("projection of |+> is the +X Bloch vector") {
    state_vector s(1);
    s.apply_single_qubit(x_basis_rotation(), 0);
    const auto v = project(s);
    REQUIRE(v[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(v[1] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(v[2] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("singlet state projects to maximally mixed 1-RDMs") {
    state_vector s(2);
    const double r = 1.0 / std::sqrt(2.0);
    s.amplitudes() = {cplx(0, 0), cplx(r, 0), cplx(-r, 0), cplx(0, 0)};  // (|01>-|10>)/sqrt2

    // Dense oracle cross-check of every local expectation.
    const auto v = project(s);
    const auto vec = oracle::to_eigen(s);
    const char axes[3] = {'X', 'Y', 'Z'};
    for (int q = 0; q < 2; ++q) {
        for (int a = 0; a < 3; ++a) {
            const auto op = oracle::embed(oracle::pauli(axes[a]), q, 2);
            const double expected = (vec.adjoint() * op * vec)(0, 0).real();
            REQUIRE(v[3 * q + a] == Catch::Approx(expected).margin(1e-12));
            REQUIRE(v[3 * q + a] == Catch::Approx(0.0).margin(1e-12));
        }
    }
}

TEST_CASE("bloch norms never exceed one") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto state = oracle::random_state(4, 60 + trial);
        const auto v = project(state);
        for (int q = 0; q < 4; ++q) {
            REQUIRE(bloch_of(v, q).norm_sq() <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("pqk distance is half the squared Bloch distance") {
    pqf_vector a{0, 0, 1};
    pqf_vector b{0, 0, -1};
    REQUIRE(pqk_distance_sq(a, a) == 0.0);
    REQUIRE(pqk_distance_sq(a, b) == Catch::Approx(2.0).margin(1e-15));

    // Additivity across qubits.
    pqf_vector a2{0, 0, 1, 0.3, 0.1, -0.2};
    pqf_vector b2{0, 0, -1, -0.1, 0.5, 0.0};
    const double per_qubit = pqk_distance_sq({0, 0, 1}, {0, 0, -1}) +
                             pqk_distance_sq({0.3, 0.1, -0.2}, {-0.1, 0.5, 0.0});
    REQUIRE(pqk_distance_sq(a2, b2) == Catch::Approx(per_qubit).margin(1e-15));

    REQUIRE_THROWS_AS(pqk_distance_sq(a, a2), validation_error);
}

TEST_CASE("pqk kernel values") {
    pqf_vector a{0, 0, 1};
    pqf_vector b{0, 0, -1};
    REQUIRE(pqk_kernel(a, a, 3.7) == 1.0);
    REQUIRE(pqk_kernel(a, b, 1.0) == Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
    REQUIRE(pqk_kernel(a, b, 1.0) == pqk_kernel(b, a, 1.0));
    REQUIRE_THROWS_AS(pqk_kernel(a, b, 0.0), validation_error);
    REQUIRE_THROWS_AS(pqk_kernel(a, b, -1.0), validation_error);
}

TEST_CASE("gram matrix basics") {
    pqf_vector v{0.2, -0.1, 0.4};
    auto g1 = gram_matrix({v}, 0.5);
    REQUIRE(g1.rows() == 1);
    REQUIRE(g1(0, 0) == 1.0);

    auto g2 = gram_matrix({v, v}, 0.5);
    REQUIRE(g2(0, 1) == 1.0);
    REQUIRE(g2(1, 0) == 1.0);

    REQUIRE_THROWS_AS(gram_matrix({}, 0.5), validation_error);
}

TEST_CASE("gram matrices of projected states are PSD") {
    const auto spec = feature_map_spec::make(4, 0.9, 1, 11, 3);
    rng_engine rng(2);
    std::vector<pqf_vector> vectors;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{rng_u01(rng), rng_u01(rng), rng_u01(rng)};
        vectors.push_back(project(execute_exact(spec, x)));
    }
    const auto gram = gram_matrix(vectors, 1.3);
    REQUIRE((gram - gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    REQUIRE(es.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("projecting m vectors costs exactly m circuit executions") {
    const auto spec = feature_map_spec::make(3, 0.5, 1, 1, 2);
    execution_counter counter;
    rng_engine rng(9);
    const int m = 23;
    for (int i = 0; i < m; ++i) {
        std::vector<double> x{rng_u01(rng), rng_u01(rng)};
        project(execute_exact(spec, x, &counter));
    }
    REQUIRE(counter.count == static_cast<std::uint64_t>(m));
}
