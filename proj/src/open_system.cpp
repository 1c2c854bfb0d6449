#include "qtrans/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "qtrans/errors.hpp"

namespace qtrans {
namespace {

double prefactor(int kappa, double x, double nbar) {
    return std::pow(1.0 + nbar * (-std::expm1(-x)), -(3.0 + kappa));
}

// 1 / ((1 + nbar) e^x - nbar)
double thermal_denominator(double x, double nbar) {
    return 1.0 / ((1.0 + nbar) * std::exp(x) - nbar);
}

double fbar_unchecked(int kappa, double x, double nbar, StateMeasure measure) {
    const double e1 = std::exp(-x);
    const double e2 = std::exp(-0.5 * x);
    const double den = thermal_denominator(x, nbar);
    double bracket = 0.0;
    if (measure == StateMeasure::alpha_uniform)
        bracket = nbar + 1.0 / 3.0 + (4.0 / 15.0) * e2 - (2.0 / 3.0 + nbar) * e1 + (16.0 / 15.0) * den;
    else
        bracket = nbar + 0.5 + (1.0 / 3.0) * e2 - (0.5 + nbar) * e1 + (2.0 / 3.0) * den;
    return prefactor(kappa, x, nbar) * bracket;
}

void check_fidelity_inputs(int kappa, double x, double nbar, const FidelityScope& scope) {
    if (kappa < 1) throw DomainError("fidelity requires kappa >= 1");
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("fidelity requires gamma >= 0");
    if (!(nbar >= 0.0 && nbar <= kMaxAnalyticNbar))
        throw DomainError(fmt::format("analytic fidelity valid only for 0 <= nbar <= 1 (nbar={:.6g})", nbar));
    if (scope.bus_size && *scope.bus_size != kappa && !scope.allow_partial_bus)
        throw ScopeError(fmt::format("fidelity formula derived for kappa = N (kappa={}, N={})", kappa,
                                     *scope.bus_size));
}

} // namespace

double planck_nbar(double temperature, double nu_hz) {
    if (!(temperature > 0.0) || !(nu_hz > 0.0))
        throw DomainError("planck_nbar requires T > 0 and nu > 0");
    const double ratio = constants::planck * nu_hz / (constants::boltzmann * temperature);
    return 1.0 / std::expm1(ratio);
}

double nbar_from_kbt_over_hnu(double kbt_over_hnu) {
    if (!(kbt_over_hnu >= 0.0)) throw DomainError("k_B T / h nu must be >= 0");
    if (kbt_over_hnu == 0.0) return 0.0;
    return 1.0 / std::expm1(1.0 / kbt_over_hnu);
}

double exchange_exponent(double gamma_over_lambda, int kappa) {
    if (kappa < 1) throw DomainError("exchange exponent requires kappa >= 1");
    return std::numbers::pi * gamma_over_lambda / std::sqrt(2.0 * kappa);
}

double fidelity_point(int kappa, double x, double nbar, double alpha, const FidelityScope& scope) {
    check_fidelity_inputs(kappa, x, nbar, scope);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    const double a2 = alpha * alpha;
    const double b2 = 1.0 - a2;
    const double e1 = std::exp(-x);
    const double bracket = nbar + a2 + 2.0 * a2 * b2 * std::exp(-0.5 * x) +
                           2.0 * b2 * b2 * thermal_denominator(x, nbar) + e1 * (a2 - 1.0 - nbar);
    const double f = prefactor(kappa, x, nbar) * bracket;
    if (!(f >= -1e-9 && f <= 1.0 + 1e-9))
        throw ConsistencyError(fmt::format("fidelity {:.17g} outside [0, 1]", f));
    return f;
}

double fidelity_avg(int kappa, double x, double nbar, StateMeasure measure, const FidelityScope& scope) {
    check_fidelity_inputs(kappa, x, nbar, scope);
    const double f = fbar_unchecked(kappa, x, nbar, measure);
    if (!(f >= -1e-9 && f <= 1.0 + 1e-9))
        throw ConsistencyError(fmt::format("average fidelity {:.17g} outside [0, 1]", f));
    return f;
}

Eigen::MatrixXcd theta_matrix(const Spectrum& spectrum, double gamma, double t) {
    const auto& c = spectrum.vectors;
    Eigen::VectorXcd phases(c.cols());
    for (Eigen::Index l = 0; l < c.cols(); ++l) phases(l) = std::polar(1.0, -spectrum.eigenvalues(l) * t);
    const Eigen::MatrixXcd cc = c.cast<cplx>();
    return std::exp(-0.5 * gamma * t) * (cc * phases.asDiagonal() * cc.transpose());
}

Eigen::MatrixXd j_matrix(const ReservoirParams& reservoir, double t, std::size_t dim) {
    validate(reservoir);
    const double value = 2.0 * reservoir.nbar * (-std::expm1(-reservoir.gamma * t));
    const auto n = static_cast<Eigen::Index>(dim);
    return Eigen::MatrixXd::Identity(n, n) * value;
}

RhoSeries rho_series(const NetworkConfig& cfg, const ReservoirParams& reservoir, const QubitState& psi,
                     double t, int fock_cut, double tail_tol) {
    validate(cfg);
    validate(reservoir);
    validate(psi);
    if (fock_cut < 1) throw DomainError("fock_cut must be >= 1");

    const int modes = static_cast<int>(cfg.dim());
    TruncatedFockSpace space(modes, fock_cut);
    const auto dim = static_cast<Eigen::Index>(space.dim());
    if (static_cast<double>(dim) * static_cast<double>(dim) > 5e7)
        throw ResourceError(fmt::format("rho_series: density matrix dimension {} too large", dim));

    // Amplitude transfer source -> mode l, damping included: Theta_{l0}(t).
    const Eigen::VectorXcd theta = theta_matrix(analytic_spectrum(cfg), reservoir.gamma, t).col(0);
    const double transmitted = std::exp(-reservoir.gamma * t); // sum_l |Theta_l0|^2
    const double n_th = reservoir.nbar * (-std::expm1(-reservoir.gamma * t));
    const double tau = 1.0 / (1.0 + n_th);
    const double q = n_th / (1.0 + n_th);

    // Single-mode block with d1 extra quanta on the ket side and d2 on the bra side:
    //   tau * (tau Theta)^d1 (tau Theta*)^d2 q^j sqrt((j+d1)! (j+d2)!) / j!  |j+d1><j+d2|
    const auto block = [&](int mode, int d1, int d2, int ket) -> cplx {
        const int j = ket - d1;
        if (j < 0 || j + d2 > fock_cut) return {0.0, 0.0};
        cplx v = tau * std::pow(q, j);
        const cplx th = theta(mode);
        for (int i = 0; i < d1; ++i) v *= tau * th * std::sqrt(static_cast<double>(j + 1));
        for (int i = 0; i < d2; ++i) v *= tau * std::conj(th) * std::sqrt(static_cast<double>(j + 1));
        return v;
    };

    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    // One product term: extra ket quantum on mode `ket_mode`, extra bra quantum on `bra_mode`
    // (-1 for none), weighted by `weight`.
    const auto add_term = [&](int ket_mode, int bra_mode, cplx weight) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            cplx v = weight;
            std::size_t s = static_cast<std::size_t>(r);
            for (int mode = 0; mode < modes && v != cplx{0.0, 0.0}; ++mode) {
                const int d1 = mode == ket_mode ? 1 : 0;
                const int d2 = mode == bra_mode ? 1 : 0;
                const int nr = space.occupation(static_cast<std::size_t>(r), mode);
                const int ns = nr - d1 + d2;
                if (ns < 0 || ns > fock_cut) {
                    v = 0.0;
                    break;
                }
                v *= block(mode, d1, d2, nr);
                s = s + static_cast<std::size_t>(ns) * space.stride(mode) -
                    static_cast<std::size_t>(nr) * space.stride(mode);
            }
            if (v != cplx{0.0, 0.0}) rho(r, static_cast<Eigen::Index>(s)) += v;
        }
    };

    // |m><n| of the source, m, n in {0, 1}: coefficient of z^m w*^n in
    //   exp(z w* (1 - tau T)) prod_l A_l[e^{z Theta_l a^dag}|0><0|e^{w* Theta_l^* a}],
    // where the z w* exponential collects loss into the vacuum and thermal smearing.
    const cplx b0 = psi.a0;
    const cplx b1 = psi.a1;
    add_term(-1, -1, b0 * std::conj(b0));
    for (int l = 0; l < modes; ++l) {
        add_term(l, -1, b1 * std::conj(b0));
        add_term(-1, l, b0 * std::conj(b1));
        for (int k = 0; k < modes; ++k) add_term(l, k, b1 * std::conj(b1));
    }
    add_term(-1, -1, b1 * std::conj(b1) * (1.0 - tau * transmitted));

    const double tail = 1.0 - rho.trace().real();
    if (!(tail < tail_tol))
        throw TruncationError(
            fmt::format("rho_series: probability {:.3e} beyond fock_cut={} exceeds tail_tol={:.1e}", tail,
                        fock_cut, tail_tol),
            tail);
    return {std::move(rho), space, tail};
}

double drain_fidelity(const DensityMatrix& rho, const TruncatedFockSpace& space, const QubitState& target) {
    std::vector<int> occ(static_cast<std::size_t>(space.modes()), 0);
    const auto vac = static_cast<Eigen::Index>(space.encode(occ));
    occ.back() = 1;
    const auto one = static_cast<Eigen::Index>(space.encode(occ));
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dim()));
    out(vac) = target.a0;
    out(one) = target.a1;
    return (out.adjoint() * rho * out)(0, 0).real();
}

std::vector<FidelityMapRow> fidelity_map(const FidelityMapGrid& grid, unsigned workers) {
    for (int k : grid.kappa)
        if (k < 1) throw DomainError("fidelity map requires kappa >= 1");
    for (double g : grid.gamma_over_lambda)
        if (!(g >= 0.0)) throw DomainError("fidelity map requires gamma/lambda >= 0");

    std::vector<double> nbars;
    nbars.reserve(grid.kbt_over_hnu.size());
    for (double r : grid.kbt_over_hnu) nbars.push_back(nbar_from_kbt_over_hnu(r));

    const std::size_t ng = grid.gamma_over_lambda.size();
    const std::size_t nk = grid.kappa.size();
    std::vector<FidelityMapRow> rows(grid.size());

    const auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t ig = i % ng;
            const std::size_t ik = (i / ng) % nk;
            const std::size_t it = i / (ng * nk);
            FidelityMapRow& row = rows[i];
            row.gamma_over_lambda = grid.gamma_over_lambda[ig];
            row.kbt_over_hnu = grid.kbt_over_hnu[it];
            row.kappa = grid.kappa[ik];
            row.nbar = nbars[it];
            row.valid = row.nbar <= kMaxAnalyticNbar;
            row.fbar = fbar_unchecked(row.kappa, exchange_exponent(row.gamma_over_lambda, row.kappa), row.nbar,
                                      grid.measure);
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(rows.size(), 1))));
    if (workers == 1) {
        fill(0, rows.size());
        return rows;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (rows.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(rows.size(), begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(fill, begin, end);
    }
    for (auto& th : pool) th.join();
    return rows;
}

OptimalKappa optimal_kappa(double gamma_over_lambda, double nbar, int kappa_max, StateMeasure measure) {
    if (kappa_max < 1) throw DomainError("kappa_max must be >= 1");
    OptimalKappa best{1, -1.0};
    for (int k = 1; k <= kappa_max; ++k) {
        const double f = fidelity_avg(k, exchange_exponent(gamma_over_lambda, k), nbar, measure);
        if (f > best.fbar) best = {k, f};
    }
    return best;
}

} // namespace qtrans
