#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "qtrans/design.hpp"
#include "qtrans/dispersive.hpp"
#include "qtrans/dynamics.hpp"
#include "qtrans/open_system.hpp"
#include "qtrans/oracle.hpp"

namespace qtrans::cli {
namespace {

using std::numbers::pi;

struct Sampler {
    std::mt19937_64 rng;

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    NetworkConfig network(int max_n) {
        NetworkConfig cfg;
        cfg.omega = uniform(0.5, 2.0);
        cfg.lambda = cfg.omega * std::exp(uniform(std::log(1e-3), std::log(0.2)));
        cfg.capN = integer(1, max_n);
        cfg.kappa = integer(0, cfg.capN);
        const double mag = cfg.lambda * std::exp(uniform(std::log(1e-3), std::log(1e3)));
        cfg.delta = integer(0, 9) == 0 ? 0.0 : (integer(0, 1) ? mag : -mag);
        if (cfg.omega + cfg.delta <= 0.0) cfg.delta = -0.5 * cfg.omega;
        return cfg;
    }

    QubitState qubit() { return QubitState::from_angles(uniform(0.0, 1.0), uniform(0.0, 2.0 * pi)); }
};

ValidationCheck make(std::string name, std::string config, double err, double tol) {
    return {std::move(name), std::move(config), err, tol, err <= tol};
}

Eigen::VectorXd sorted(Eigen::VectorXd v) {
    std::sort(v.data(), v.data() + v.size());
    return v;
}

DensityMatrix gate_initial(const TruncatedFockSpace& space, const QubitState& psi) {
    std::vector<int> occ(static_cast<std::size_t>(space.modes()), 0);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dim()));
    v(static_cast<Eigen::Index>(space.encode(occ))) = psi.a0;
    occ.front() = 1;
    v(static_cast<Eigen::Index>(space.encode(occ))) = psi.a1;
    return oracle::pure_density(v);
}

} // namespace

std::vector<ValidationCheck> run_validation(std::uint64_t seed) {
    Sampler s{std::mt19937_64(seed)};
    std::vector<ValidationCheck> out;

    {
        double eig_err = 0.0;
        double diag_err = 0.0;
        for (int i = 0; i < 50; ++i) {
            const auto cfg = s.network(64);
            const Eigen::MatrixXd h = build_hamiltonian(cfg);
            const auto spec = analytic_spectrum(cfg);
            const auto ref = oracle::eig_hermitian(h);
            const Eigen::VectorXd a = sorted(spec.eigenvalues);
            eig_err = std::max(eig_err, ((a - ref.values).cwiseAbs().array() / ref.values.cwiseAbs().array().max(1.0)).maxCoeff());
            Eigen::MatrixXd d = spec.vectors.transpose() * h * spec.vectors;
            d.diagonal().setZero();
            diag_err = std::max(diag_err, d.cwiseAbs().maxCoeff() / cfg.omega);
        }
        out.push_back(make("spectrum_vs_eigensolver", "50 random networks, N<=64", eig_err, 1e-10));
        out.push_back(make("eigenvectors_diagonalize", "50 random networks, N<=64", diag_err, 1e-10));
    }

    {
        double err = 0.0;
        for (int i = 0; i < 20; ++i) {
            const auto cfg = s.network(32);
            const TransferPropagator prop(cfg);
            const auto ref = oracle::eig_hermitian(build_hamiltonian(cfg));
            Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cfg.dim()));
            v0(0) = 1.0;
            const double t_max = 20.0 / cfg.lambda;
            for (int k = 0; k < 100; ++k) {
                const double t = t_max * k / 99.0;
                const auto u = prop(t);
                const auto v = oracle::propagate_unitary(ref, v0, t);
                err = std::max({err, std::abs(u.u_plus - v(0)),
                                std::abs(u.u_minus - v(static_cast<Eigen::Index>(cfg.drain())))});
            }
        }
        out.push_back(make("amplitudes_vs_propagator", "20 random networks x 100 times", err, 1e-10));
    }

    {
        double err = 0.0;
        for (int i = 0; i < 20; ++i) {
            auto cfg = s.network(32);
            cfg.kappa = cfg.capN;
            const TransferPropagator prop(cfg);
            for (int k = 0; k < 100; ++k) {
                const double t = s.uniform(0.0, 20.0 / cfg.lambda);
                const auto a = prop(t);
                const auto b = u_approx(cfg, t);
                err = std::max({err, std::abs(a.u_plus - b.u_plus), std::abs(a.u_minus - b.u_minus)});
            }
        }
        out.push_back(make("resonant_bus_exactness", "20 random networks with kappa=N", err, 1e-12));
    }

    {
        double err = 0.0;
        for (int i = 0; i < 40; ++i) {
            GateRequest req;
            req.phi = s.uniform(-pi, pi);
            req.lambda = s.uniform(0.05, 1.0);
            req.kappa = 1 << s.integer(0, 3);
            const auto plan = design_gate(req);
            const auto psi = s.qubit();
            const auto state = evolve_closed(gate_network(plan), psi, plan.t_ex);
            const auto target = predict_gate_output(plan, psi);
            const cplx overlap = std::conj(target.a0) * state.vacuum +
                                 std::conj(target.a1) * state.sites(plan.kappa + 1);
            err = std::max(err, 1.0 - std::norm(overlap));
        }
        out.push_back(make("gate_round_trip", "40 random (phi, psi), kappa=N in {1,2,4,8}", err, 1e-9));
    }

    {
        double err = 0.0;
        for (int i = 0; i < 200; ++i) {
            const int kappa = s.integer(1, 60);
            const double x = s.uniform(0.0, 3.0);
            const double nbar = s.uniform(0.0, 1.0);
            for (auto m : {StateMeasure::alpha_uniform, StateMeasure::haar}) {
                const double q = oracle::average_over_states(
                    [&](const QubitState& st) { return fidelity_point(kappa, x, nbar, std::abs(st.a0)); }, m, 64);
                err = std::max(err, std::abs(q - fidelity_avg(kappa, x, nbar, m)));
            }
        }
        out.push_back(make("average_fidelity_vs_quadrature", "200 random (kappa, x, nbar), both measures", err, 1e-12));
    }

    {
        double err = 0.0;
        for (int i = 0; i < 20; ++i) {
            const auto cfg = s.network(16);
            const double t = s.uniform(0.0, 10.0 / cfg.lambda);
            const Eigen::MatrixXcd theta = theta_matrix(analytic_spectrum(cfg), 0.0, t);
            const auto ref = oracle::eig_hermitian(build_hamiltonian(cfg));
            for (Eigen::Index j = 0; j < theta.cols(); ++j) {
                Eigen::VectorXcd e = Eigen::VectorXcd::Zero(theta.rows());
                e(j) = 1.0;
                err = std::max(err, (theta.col(j) - oracle::propagate_unitary(ref, e, t)).cwiseAbs().maxCoeff());
            }
        }
        out.push_back(make("theta_vs_propagator", "20 random networks, gamma=0", err, 1e-10));
    }

    {
        double err = 0.0;
        for (int i = 0; i < 50; ++i) {
            DispersiveConfig cfg;
            cfg.omega0 = s.uniform(1.0, 10.0);
            cfg.nu = cfg.omega0 + (s.integer(0, 1) ? 1.0 : -1.0) * s.uniform(0.5, 5.0);
            cfg.g = s.uniform(0.0, 0.3);
            const auto field = s.qubit();
            const double t = s.uniform(0.0, 100.0);
            const auto res = simulate_dispersive(cfg, field, t);
            Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
            for (int n = 0; n <= 1; ++n) {
                h(2 * n, 2 * n) = cfg.omega0 * n - cfg.nu;
                h(2 * n + 1, 2 * n + 1) = cfg.omega0 * n + cfg.nu - cfg.chi() * n;
            }
            Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(4);
            v0(1) = field.a0;
            v0(3) = field.a1;
            const auto v = oracle::propagate_unitary(h, v0, t);
            err = std::max({err, (res.joint - v).cwiseAbs().maxCoeff(), res.phase_error,
                            std::abs(res.field_purity - 1.0)});
        }
        out.push_back(make("dispersive_vs_joint_evolution", "50 random atom-field configs", err, 1e-10));
    }

    {
        // one-oscillator bus, cutoff 3: a few seconds of Runge-Kutta
        GateRequest req;
        req.phi = pi / 2;
        req.lambda = 1.0;
        req.kappa = 1;
        const auto plan = design_gate(req);
        const auto cfg = gate_network(plan);
        const auto psi = QubitState::from_angles(1.0 / std::sqrt(2.0), 0.3);
        const auto target = predict_gate_output(plan, psi);
        const TruncatedFockSpace space(3, 3);
        const auto h = oracle::fock_hamiltonian(build_hamiltonian(cfg).cast<cplx>(), space);

        const ReservoirParams warm{0.1, 0.3};
        const auto warm_run = oracle::lindblad_integrate(h, warm, space, gate_initial(space, psi), plan.t_ex);
        const double f_err = std::abs(drain_fidelity(warm_run.rho, space, target) -
                                      fidelity_point(1, exchange_exponent(0.1, 1), 0.3, std::abs(psi.a0)));
        out.push_back(make("fidelity_vs_lindblad", "kappa=N=1, gamma/lambda=0.1, nbar=0.3, n_max=3", f_err, 1e-2));

        const ReservoirParams cold{0.1, 0.0};
        const auto cold_run = oracle::lindblad_integrate(h, cold, space, gate_initial(space, psi), plan.t_ex);
        const auto series = rho_series(cfg, cold, psi, plan.t_ex, 3);
        out.push_back(make("rho_series_vs_lindblad", "kappa=N=1, gamma/lambda=0.1, nbar=0, fock_cut=3",
                           oracle::trace_distance(series.rho, cold_run.rho), 1e-6));
    }
    return out;
}

} // namespace qtrans::cli
