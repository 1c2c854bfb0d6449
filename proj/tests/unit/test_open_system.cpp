// test_open_system.cpp — thermal fidelity closed forms, Theta/J matrices, sweeps

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "qtrans/errors.hpp"
#include "qtrans/open_system.hpp"
#include "qtrans/oracle.hpp"

using namespace qtrans;
using std::numbers::pi;

TEST_CASE("Planck occupation") {
    const double nu = 1e10;
    const double t_ln2 = constants::planck * nu / (constants::boltzmann * std::log(2.0));
    CHECK(planck_nbar(t_ln2, nu) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(planck_nbar(1e-6, nu) < 1e-300);
    const double t_half = 0.5 * constants::planck * nu / constants::boltzmann;
    CHECK(t_half == doctest::Approx(0.2399).epsilon(1e-3));
    CHECK(planck_nbar(t_half, nu) == doctest::Approx(1.0 / (std::exp(2.0) - 1.0)).epsilon(1e-12));
    CHECK(nbar_from_kbt_over_hnu(0.5) == doctest::Approx(0.15651764274966565).epsilon(1e-14));
    CHECK(nbar_from_kbt_over_hnu(0.0) == 0.0);
    CHECK_THROWS_AS(planck_nbar(0.0, nu), DomainError);
    CHECK_THROWS_AS(planck_nbar(1.0, -nu), DomainError);
}

TEST_CASE("exchange exponent") {
    CHECK(exchange_exponent(0.1, 2) == doctest::Approx(pi * 0.1 / 2.0));
    CHECK_THROWS_AS(exchange_exponent(0.1, 0), DomainError);
}

TEST_CASE("property: no damping means perfect fidelity") {
    testing::Gen gen(71);
    for (int i = 0; i < 1000; ++i) {
        const int kappa = gen.integer(1, 100);
        const double nbar = gen.uniform(0.0, 1.0);
        CHECK(std::abs(fidelity_point(kappa, 0.0, nbar, gen.uniform(0.0, 1.0)) - 1.0) <= 1e-14);
        CHECK(std::abs(fidelity_avg(kappa, 0.0, nbar) - 1.0) <= 1e-14);
        CHECK(std::abs(fidelity_avg(kappa, 0.0, nbar, StateMeasure::haar) - 1.0) <= 1e-14);
    }
}

TEST_CASE("property: excited input at zero temperature decays as e^-x") {
    testing::Gen gen(72);
    for (int i = 0; i < 1000; ++i) {
        const double x = gen.uniform(0.0, 5.0);
        CHECK(std::abs(fidelity_point(gen.integer(1, 60), x, 0.0, 0.0) - std::exp(-x)) <= 1e-12);
    }
}

TEST_CASE("property: averages equal the quadrature of the pointwise fidelity") {
    testing::Gen gen(73);
    for (int i = 0; i < 300; ++i) {
        const int kappa = gen.integer(1, 60);
        const double x = gen.uniform(0.0, 3.0);
        const double nbar = gen.uniform(0.0, 1.0);
        const auto point = [&](const QubitState& s) { return fidelity_point(kappa, x, nbar, std::abs(s.a0)); };
        for (auto m : {StateMeasure::alpha_uniform, StateMeasure::haar})
            CHECK(std::abs(fidelity_avg(kappa, x, nbar, m) - oracle::average_over_states(point, m, 64)) <= 1e-12);
    }
}

TEST_CASE("zero temperature average") {
    for (int kappa : {1, 4, 30}) {
        const double x = exchange_exponent(0.3, kappa);
        const double expected = 1.0 / 3.0 + 4.0 / 15.0 * std::exp(-x / 2) + 6.0 / 15.0 * std::exp(-x);
        CHECK(fidelity_avg(kappa, x, 0.0) == doctest::Approx(expected).epsilon(1e-14));
    }
    double prev = 0.0;
    for (int kappa = 1; kappa <= 80; ++kappa) {
        const double f = fidelity_avg(kappa, exchange_exponent(0.3, kappa), 0.0);
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("scope and range guards") {
    CHECK_THROWS_AS(fidelity_point(2, 0.1, 0.1, 0.5, {.bus_size = 3}), ScopeError);
    CHECK_NOTHROW(fidelity_point(2, 0.1, 0.1, 0.5, {.bus_size = 3, .allow_partial_bus = true}));
    CHECK_NOTHROW(fidelity_point(3, 0.1, 0.1, 0.5, {.bus_size = 3}));
    CHECK_THROWS_AS(fidelity_avg(2, 0.1, 0.1, StateMeasure::alpha_uniform, {.bus_size = 5}), ScopeError);
    CHECK_THROWS_AS(fidelity_point(1, 0.1, 1.5, 0.5), DomainError);
    CHECK_THROWS_AS(fidelity_point(1, 0.1, 0.5, 1.5), DomainError);
    CHECK_THROWS_AS(fidelity_point(0, 0.1, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(fidelity_avg(1, -0.1, 0.5), DomainError);
}

TEST_CASE("property: fidelities lie in [0, 1] and never improve with more noise") {
    testing::Gen gen(74);
    for (int i = 0; i < 2000; ++i) {
        const int kappa = gen.integer(1, 60);
        const double x = gen.uniform(0.0, 4.0);
        const double nbar = gen.uniform(0.0, 1.0);
        const double alpha = gen.uniform(0.0, 1.0);
        const double f = fidelity_point(kappa, x, nbar, alpha);
        const double fa = fidelity_avg(kappa, x, nbar);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-9);
        CHECK(fa >= 0.0);
        CHECK(fa <= 1.0 + 1e-9);

        const double dx = gen.uniform(0.0, 0.5);
        const double dn = gen.uniform(0.0, 1.0 - nbar);
        CHECK(fidelity_point(kappa, x + dx, nbar, alpha) <= f + 1e-14);
        CHECK(fidelity_point(kappa, x, nbar + dn, alpha) <= f + 1e-14);
        CHECK(fidelity_avg(kappa, x + dx, nbar) <= fa + 1e-14);
        CHECK(fidelity_avg(kappa, x, nbar + dn) <= fa + 1e-14);
    }
}

TEST_CASE("Theta matrix") {
    const NetworkConfig cfg{1.0, 0.2, 3, 2, 0.7};
    const auto spectrum = analytic_spectrum(cfg);

    const Eigen::MatrixXcd at_zero = theta_matrix(spectrum, 0.3, 0.0);
    CHECK((at_zero - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-14);

    const Eigen::MatrixXcd h = build_hamiltonian(cfg).cast<cplx>();
    const auto eig = oracle::eig_hermitian(h);
    const double t = 7.3;
    const Eigen::MatrixXcd unitary = theta_matrix(spectrum, 0.0, t);
    for (Eigen::Index j = 0; j < 5; ++j) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(5);
        e(j) = 1.0;
        CHECK((unitary.col(j) - oracle::propagate_unitary(eig, e, t)).cwiseAbs().maxCoeff() <= 1e-10);
    }

    testing::Gen gen(75);
    for (int i = 0; i < 50; ++i) {
        const auto c = gen.network(20);
        const double gamma = gen.uniform(0.0, 0.5);
        const double tt = gen.uniform(0.0, 10.0 / c.lambda);
        const Eigen::MatrixXcd theta = theta_matrix(analytic_spectrum(c), gamma, tt);
        const Eigen::VectorXd col_sums = theta.cwiseAbs2().colwise().sum().transpose();
        CHECK((col_sums.array() - std::exp(-gamma * tt)).abs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("J matrix") {
    CHECK(j_matrix({0.5, 0.3}, 0.0, 4).cwiseAbs().maxCoeff() == 0.0);
    CHECK(j_matrix({0.5, 0.0}, 10.0, 4).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd j = j_matrix({1.0, 0.5}, std::log(2.0), 3);
    CHECK((j - 0.5 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("density series") {
    const NetworkConfig cfg{std::sqrt(2.0) / 2.0, 1.0, 1, 1, 0.0};
    const double t = pi / std::sqrt(2.0);

    SUBCASE("vacuum stays vacuum at zero temperature") {
        const auto s = rho_series(cfg, {0.3, 0.0}, QubitState{}, t);
        DensityMatrix expected = DensityMatrix::Zero(s.rho.rows(), s.rho.cols());
        expected(0, 0) = 1.0;
        CHECK((s.rho - expected).cwiseAbs().maxCoeff() <= 1e-15);
    }

    SUBCASE("property: Hermitian, positive and normalised") {
        testing::Gen gen(76);
        for (int i = 0; i < 10; ++i) {
            NetworkConfig c{gen.uniform(0.5, 2.0), gen.uniform(0.1, 1.0), gen.integer(1, 2), 0, 0.0};
            c.kappa = gen.integer(0, c.capN);
            c.delta = gen.uniform(0.1, 1.0);
            const ReservoirParams res{gen.uniform(0.0, 0.05), gen.uniform(0.0, 0.3)};
            const double tt = gen.uniform(0.0, 3.0);
            const auto s = rho_series(c, res, gen.qubit(), tt, 4, 1e-6);
            CHECK((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s.rho);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
            CHECK(s.rho.trace().real() <= 1.0 + 1e-14);
            CHECK(s.rho.trace().real() >= 1.0 - 10 * 1e-6);
            CHECK(s.tail == doctest::Approx(1.0 - s.rho.trace().real()));
        }
    }

    SUBCASE("fidelity from the series equals the closed form") {
        const auto psi = QubitState::from_angles(0.6, 0.4);
        for (double nbar : {0.0, 0.1}) {
            const ReservoirParams res{0.02, nbar};
            const auto s = rho_series(cfg, res, psi, t);
            const QubitState target{psi.a0, psi.a1 * std::polar(1.0, pi / 2)};
            const double f = fidelity_point(1, exchange_exponent(0.02, 1), nbar, 0.6);
            CHECK(std::abs(drain_fidelity(s.rho, s.space, target) - f) <= 1e-6);
        }
    }

    SUBCASE("hot reservoir overflows the cutoff") {
        try {
            rho_series(cfg, {1.0, 1.0}, QubitState::from_angles(0.0, 0.0), 5.0, 2);
            FAIL("expected a truncation error");
        } catch (const TruncationError& e) {
            CHECK(e.achieved_tail() > 1e-8);
        }
    }
}

TEST_CASE("fidelity map") {
    FidelityMapGrid grid;
    for (int i = 0; i < 100; ++i) grid.gamma_over_lambda.push_back(i / 99.0);
    for (int k = 1; k <= 100; ++k) grid.kappa.push_back(k);
    grid.kbt_over_hnu = {0.5};

    const auto rows = fidelity_map(grid, 1);
    REQUIRE(rows.size() == 10000);
    CHECK(rows[0].kappa == 1);
    CHECK(rows[1].gamma_over_lambda == doctest::Approx(1.0 / 99.0));
    CHECK(rows[100].kappa == 2);
    for (const auto& r : rows) {
        if (r.gamma_over_lambda == 0.0) CHECK(r.fbar == 1.0);
        CHECK(r.valid);
        CHECK(r.fbar == fidelity_avg(r.kappa, exchange_exponent(r.gamma_over_lambda, r.kappa), r.nbar));
    }

    const auto parallel = fidelity_map(grid, 8);
    REQUIRE(parallel.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(parallel[i].fbar == rows[i].fbar);
        CHECK(parallel[i].kappa == rows[i].kappa);
    }

    grid.kbt_over_hnu = {0.5, 2.0};
    const auto mixed = fidelity_map(grid, 3);
    CHECK(mixed.size() == 20000);
    CHECK(mixed.front().valid);
    CHECK_FALSE(mixed.back().valid); // nbar(2.0) > 1
}

TEST_CASE("0.9 level set bends back at kBT/hnu = 0.5") {
    const double nbar = nbar_from_kbt_over_hnu(0.5);
    // largest gamma/lambda keeping Fbar >= 0.9, as a function of kappa
    std::vector<double> edge;
    for (int kappa = 1; kappa <= 60; ++kappa) {
        double lo = 0.0;
        double hi = 1.0;
        if (fidelity_avg(kappa, exchange_exponent(hi, kappa), nbar) >= 0.9) {
            edge.push_back(hi);
            continue;
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (fidelity_avg(kappa, exchange_exponent(mid, kappa), nbar) >= 0.9 ? lo : hi) = mid;
        }
        edge.push_back(lo);
    }
    const auto best = std::max_element(edge.begin(), edge.end()) - edge.begin();
    CHECK(best > 0);
    CHECK(best < 59);
}

TEST_CASE("optimal bus size") {
    CHECK(optimal_kappa(0.0, 0.3, 40).kappa == 1);
    CHECK(optimal_kappa(0.0, 0.3, 40).fbar == 1.0);
    CHECK(optimal_kappa(0.2, 0.0, 37).kappa == 37);

    const auto thermal = optimal_kappa(0.1, nbar_from_kbt_over_hnu(0.5), 200);
    CHECK(thermal.kappa >= 5);
    CHECK(thermal.kappa <= 20);
    // regression values of this implementation
    CHECK(thermal.kappa == 6);
    CHECK(thermal.fbar == doctest::Approx(0.845).epsilon(1e-3));
    CHECK_THROWS_AS(optimal_kappa(0.1, 0.1, 0), DomainError);
}
