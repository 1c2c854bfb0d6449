#include "qtrans/spectral.hpp"

#include <cmath>
#include <numbers>

#include "qtrans/errors.hpp"

namespace qtrans {
namespace {

struct Cubic {
    double delta;
    double two_n_l2;      // 2 N lambda^2
    double two_k_l2_d;    // 2 kappa lambda^2 delta

    double f(double x) const { return ((x - delta) * x - two_n_l2) * x + two_k_l2_d; }
    double df(double x) const { return (3.0 * x - 2.0 * delta) * x - two_n_l2; }

    // Newton polish; a step is kept only if it does not increase |f|.
    double refine(double x) const {
        for (int it = 0; it < 4; ++it) {
            const double d = df(x);
            if (d == 0.0) break;
            const double next = x - f(x) / d;
            if (!(std::abs(f(next)) <= std::abs(f(x)))) break;
            if (next == x) break;
            x = next;
        }
        return x;
    }
};

// Helmert vectors on the contiguous block of sites [first, first + count).
void fill_helmert(Eigen::MatrixXd& vecs, Eigen::Index& col, Eigen::Index first, int count) {
    for (int k = 1; k < count; ++k, ++col) {
        const double norm = std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i)
            vecs(first + i, col) = 1.0 / norm;
        vecs(first + k, col) = -static_cast<double>(k) / norm;
    }
}

} // namespace

const char* to_string(Family f) noexcept {
    switch (f) {
    case Family::antisymmetric: return "antisymmetric";
    case Family::resonant_degenerate: return "resonant-degenerate";
    case Family::detuned_degenerate: return "detuned-degenerate";
    case Family::cubic_trio: return "cubic-trio";
    }
    return "unknown";
}

CubicSpectralParams cubic_params(const NetworkConfig& cfg) {
    validate(cfg);
    const double n = cfg.capN;
    const double k = cfg.kappa;
    const double l2 = cfg.lambda * cfg.lambda;

    CubicSpectralParams p;
    // With every bus oscillator resonant the detuning does not enter the Hamiltonian.
    p.delta_eff = (cfg.kappa == cfg.capN) ? 0.0 : cfg.delta;
    const double d = p.delta_eff;
    const double d2 = d * d;

    p.big_phi = d2 + 6.0 * n * l2;
    p.eta = d * (d2 + 9.0 * (n - 3.0 * k) * l2);
    // Phi^3 - eta^2 expanded so that the leading D^6 terms cancel exactly.
    const double c2 = 108.0 * n * n - 81.0 * (n - 3.0 * k) * (n - 3.0 * k);
    const double disc = 54.0 * k * l2 * d2 * d2 + c2 * l2 * l2 * d2 + 216.0 * n * n * n * l2 * l2 * l2;
    p.theta = std::atan2(std::sqrt(std::max(disc, 0.0)), p.eta) / 3.0;

    const double sphi = std::sqrt(p.big_phi);
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    const double s3 = std::numbers::sqrt3;
    std::array<double, 3> r{d + 2.0 * sphi * ct, d - sphi * (ct + s3 * st), d - sphi * (ct - s3 * st)};

    const Cubic cubic{d, 2.0 * n * l2, 2.0 * k * l2 * d};
    const double eps = kRootCollisionScale * cfg.lambda;
    for (int j = 0; j < 3; ++j) {
        const double x = cubic.refine(r[j] / 3.0);
        p.R[j] = 3.0 * x;
        const double rd = p.R[j] - 3.0 * d;
        p.collided[j] = std::abs(p.R[j]) < eps || std::abs(rd) < eps;
        if (p.collided[j]) {
            p.A[j] = 0.0;
            continue;
        }
        const double a = 3.0 * cfg.lambda / p.R[j];
        const double b = 3.0 * cfg.lambda / rd;
        p.A[j] = 1.0 / (1.0 + 2.0 * k * a * a + 2.0 * (n - k) * b * b);
    }
    return p;
}

Spectrum analytic_spectrum(const NetworkConfig& cfg) {
    const CubicSpectralParams p = cubic_params(cfg);
    const auto dim = static_cast<Eigen::Index>(cfg.dim());
    const Eigen::Index drain = dim - 1;
    const int kappa = cfg.kappa;
    const int detuned = cfg.capN - cfg.kappa;

    Spectrum s;
    s.vectors = Eigen::MatrixXd::Zero(dim, dim);
    s.eigenvalues = Eigen::VectorXd::Zero(dim);
    s.families.reserve(static_cast<std::size_t>(dim));

    Eigen::Index col = 0;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    s.vectors(0, col) = inv_sqrt2;
    s.vectors(drain, col) = -inv_sqrt2;
    s.eigenvalues(col) = cfg.omega;
    s.families.push_back(Family::antisymmetric);
    ++col;

    const Eigen::Index res_begin = col;
    fill_helmert(s.vectors, col, 1, kappa);
    for (Eigen::Index c = res_begin; c < col; ++c) {
        s.eigenvalues(c) = cfg.omega;
        s.families.push_back(Family::resonant_degenerate);
    }
    const Eigen::Index det_begin = col;
    fill_helmert(s.vectors, col, 1 + kappa, detuned);
    for (Eigen::Index c = det_begin; c < col; ++c) {
        s.eigenvalues(c) = cfg.omega_tilde();
        s.families.push_back(Family::detuned_degenerate);
    }

    // Trio lives in span{(s+d)/sqrt2, resonant sum, detuned sum}.
    std::vector<Eigen::VectorXd> sector;
    {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v(0) = v(drain) = inv_sqrt2;
        sector.push_back(v);
        if (kappa > 0) {
            v.setZero();
            v.segment(1, kappa).setConstant(1.0 / std::sqrt(static_cast<double>(kappa)));
            sector.push_back(v);
        }
        if (detuned > 0) {
            v.setZero();
            v.segment(1 + kappa, detuned).setConstant(1.0 / std::sqrt(static_cast<double>(detuned)));
            sector.push_back(v);
        }
    }

    const double omega_tilde_eff = cfg.omega + p.delta_eff;
    std::vector<Eigen::VectorXd> trio_vecs;
    std::vector<CubicRoot> trio_roots;
    std::vector<int> pending;
    for (int j = 0; j < 3; ++j) {
        if (p.collided[j]) {
            pending.push_back(j);
            continue;
        }
        const double omega_j = cfg.omega + p.R[j] / 3.0;
        const double ra = 2.0 * cfg.lambda / (omega_j - cfg.omega);
        const double rb = 2.0 * cfg.lambda / (omega_j - omega_tilde_eff);
        const double nj = 1.0 / std::sqrt(2.0 + kappa * ra * ra + detuned * rb * rb);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v(0) = v(drain) = nj;
        if (kappa > 0) v.segment(1, kappa).setConstant(ra * nj);
        if (detuned > 0) v.segment(1 + kappa, detuned).setConstant(rb * nj);
        s.trio_normalization[j] = nj;
        trio_vecs.push_back(std::move(v));
        trio_roots.push_back(static_cast<CubicRoot>(j));
    }
    // Colliding roots: the divergent formula is replaced by the orthogonal complement
    // of the regular trio vectors inside the symmetric sector, when one exists.
    for (int j : pending) {
        if (trio_vecs.size() >= sector.size()) break;
        Eigen::VectorXd best;
        double best_norm = 0.0;
        for (const auto& basis : sector) {
            Eigen::VectorXd v = basis;
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& u : trio_vecs) v -= u.dot(v) * u;
            const double nv = v.norm();
            if (nv > best_norm) {
                best_norm = nv;
                best = v;
            }
        }
        if (best_norm < 1e-8) break;
        trio_vecs.push_back(best / best_norm);
        trio_roots.push_back(static_cast<CubicRoot>(j));
    }

    if (col + static_cast<Eigen::Index>(trio_vecs.size()) != dim)
        throw ConsistencyError("analytic spectrum produced " +
                               std::to_string(col + static_cast<Eigen::Index>(trio_vecs.size())) +
                               " eigenpairs, expected " + std::to_string(dim));

    for (std::size_t i = 0; i < trio_vecs.size(); ++i, ++col) {
        s.vectors.col(col) = trio_vecs[i];
        s.eigenvalues(col) = cfg.omega + p.R[static_cast<int>(trio_roots[i])] / 3.0;
        s.families.push_back(Family::cubic_trio);
    }
    s.trio_roots = std::move(trio_roots);
    return s;
}

std::array<std::size_t, 4> family_sizes(const Spectrum& s) {
    std::array<std::size_t, 4> out{};
    for (Family f : s.families) ++out[static_cast<std::size_t>(f)];
    return out;
}

} // namespace qtrans
