// test_oracle.cpp — reference implementations checked on textbook cases

#include "doctest.h"

#include <cmath>

#include "generators.hpp"
#include "qtrans/errors.hpp"
#include "qtrans/network.hpp"
#include "qtrans/oracle.hpp"

using namespace qtrans;

TEST_CASE("Pauli X spectrum") {
    Eigen::Matrix2d x;
    x << 0, 1, 1, 0;
    const auto e = oracle::eig_hermitian(Eigen::MatrixXd(x));
    CHECK(e.values(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("star spectrum") {
    const auto e = oracle::eig_hermitian(build_hamiltonian({1.0, 0.1, 1, 1, 0.0}));
    CHECK(e.values(0) == doctest::Approx(1.0 - 0.1 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.values(2) == doctest::Approx(1.0 + 0.1 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("property: random Hermitian matrices") {
    testing::Gen gen(61);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(2, 20);
        Eigen::MatrixXcd a(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a(r, c) = cplx{gen.uniform(-1, 1), gen.uniform(-1, 1)};
        const Eigen::MatrixXcd h = a + a.adjoint();
        const auto e = oracle::eig_hermitian(h);
        const Eigen::MatrixXcd gram = e.vectors.adjoint() * e.vectors;
        CHECK((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
        const double norm = h.operatorNorm();
        for (int l = 0; l < n; ++l) {
            CHECK((h * e.vectors.col(l) - e.values(l) * e.vectors.col(l)).norm() <= 1e-11 * norm);
            if (l > 0) CHECK(e.values(l) >= e.values(l - 1));
        }
    }
}

TEST_CASE("non-Hermitian input is rejected") {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 2, 0;
    CHECK_THROWS_AS(oracle::eig_hermitian(m), DomainError);
}

TEST_CASE("unitary propagation basics") {
    Eigen::MatrixXcd h(1, 1);
    h << 0.7;
    Eigen::VectorXcd v(1);
    v << cplx{0.6, 0.8};
    CHECK(std::abs(oracle::propagate_unitary(h, v, 3.0)(0) - std::polar(1.0, -2.1) * v(0)) < 1e-15);

    const Eigen::MatrixXcd star = build_hamiltonian({1.0, 0.3, 4, 2, 0.5}).cast<cplx>();
    testing::Gen gen(62);
    Eigen::VectorXcd w(6);
    for (int i = 0; i < 6; ++i) w(i) = cplx{gen.uniform(-1, 1), gen.uniform(-1, 1)};
    w.normalize();
    CHECK((oracle::propagate_unitary(star, w, 0.0) - w).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(oracle::propagate_unitary(star, w, 12.3).norm() - 1.0) < 1e-12);
}

TEST_CASE("Fock index codec") {
    const TruncatedFockSpace space(3, 2);
    CHECK(space.dim() == 27);
    for (std::size_t i = 0; i < space.dim(); ++i) CHECK(space.encode(space.decode(i)) == i);
    CHECK(space.encode({1, 0, 0}) == 9);
    CHECK(space.occupation(space.encode({2, 1, 0}), 1) == 1);
    CHECK_THROWS_AS(TruncatedFockSpace(8, 9), ResourceError);
}

TEST_CASE("Lindblad without damping is unitary") {
    const TruncatedFockSpace space(3, 2);
    const Eigen::MatrixXcd single = build_hamiltonian({0.8, 0.5, 1, 1, 0.0}).cast<cplx>();
    const auto h = oracle::fock_hamiltonian(single, space);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(27);
    psi(space.encode({1, 0, 0})) = 0.6;
    psi(space.encode({2, 0, 0})) = cplx{0.0, 0.8};
    const double t = 2.5;
    const auto out = oracle::lindblad_integrate(h, {0.0, 0.0}, space, oracle::pure_density(psi), t);
    const auto expected = oracle::propagate_unitary(Eigen::MatrixXcd(h), psi, t);
    CHECK(oracle::trace_distance(out.rho, oracle::pure_density(expected)) <= 1e-8);
    CHECK(out.halving_change < 1e-8);
}

TEST_CASE("single damped mode relaxes to the thermal occupation") {
    const double gamma = 0.4;
    const double nbar = 0.2;
    const double t = 3.0;
    Eigen::MatrixXcd single(1, 1);
    single << 1.0;
    const auto res = oracle::lindblad_integrate_adaptive(
        single, {gamma, nbar},
        [](const TruncatedFockSpace& s) {
            DensityMatrix rho = DensityMatrix::Zero(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(s.dim()));
            rho(1, 1) = 1.0;
            return rho;
        },
        t, 2, 14);
    CHECK(res.cutoff_population < 1e-8);
    double mean = 0.0;
    for (Eigen::Index n = 0; n < res.result.rho.rows(); ++n) mean += static_cast<double>(n) * res.result.rho(n, n).real();
    const double decay = std::exp(-gamma * t);
    CHECK(std::abs(mean - (decay + nbar * (1.0 - decay))) <= 1e-6);
    CHECK(std::abs(res.result.rho.trace().real() - 1.0) <= 1e-8);
    const Eigen::MatrixXcd herm = res.result.rho - res.result.rho.adjoint();
    CHECK(herm.cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(res.result.rho);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("oracle refuses oversized density matrices") {
    const TruncatedFockSpace space(4, 9);
    const oracle::SparseOperator h(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
    const DensityMatrix rho0 = DensityMatrix::Zero(1, 1);
    CHECK_THROWS_AS(oracle::lindblad_integrate(h, {0.1, 0.0}, space, rho0, 1.0), ResourceError);
}

TEST_CASE("state averages") {
    using oracle::average_over_states;
    CHECK(average_over_states([](const QubitState&) { return 2.5; }, StateMeasure::alpha_uniform, 16) ==
          doctest::Approx(2.5).epsilon(1e-15));
    const auto alpha2 = [](const QubitState& s) { return std::norm(s.a0); };
    CHECK(std::abs(average_over_states(alpha2, StateMeasure::alpha_uniform, 64) - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(average_over_states(alpha2, StateMeasure::haar, 64) - 0.5) <= 1e-12);
    const auto phase = [](const QubitState& s) { return std::real(s.a1 * std::conj(s.a0)); };
    CHECK(std::abs(average_over_states(phase, StateMeasure::haar, 16, true)) <= 1e-12);
    CHECK_THROWS_AS(average_over_states(alpha2, StateMeasure::haar, 4), DomainError);
}
