#include "qtrans/dynamics.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

namespace qtrans {
namespace {

cplx phase(double angle) { return std::polar(1.0, -angle); }

SurvivalProbabilities probabilities_from(const TransferAmplitudes& u, const QubitState& psi) {
    // alpha^2 + beta^2 u: the projection of |Psi(t)> on the initial (resp. transferred) state.
    const double alpha2 = std::norm(psi.a0);
    const double beta2 = std::norm(psi.a1);
    return {std::norm(alpha2 + beta2 * u.u_plus), std::norm(alpha2 + beta2 * u.u_minus)};
}

} // namespace

QubitState QubitState::from_angles(double alpha, double theta) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw DomainError("qubit amplitude alpha must lie in [0, 1]");
    const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    return {cplx{alpha, 0.0}, std::polar(beta, theta)};
}

void validate(const QubitState& psi) {
    if (std::abs(psi.norm2() - 1.0) > 1e-12)
        throw DomainError(fmt::format("qubit state not normalized: |a0|^2+|a1|^2 = {:.17g}", psi.norm2()));
}

TransferPropagator::TransferPropagator(const NetworkConfig& cfg)
    : cfg_(cfg), params_(cubic_params(cfg)), spectrum_(analytic_spectrum(cfg)) {}

TransferAmplitudes TransferPropagator::closed_form(double t) const {
    cplx lambda_t{0.0, 0.0};
    for (int j = 0; j < 3; ++j)
        lambda_t += params_.A[j] * phase(params_.R[j] * t / 3.0);
    const cplx carrier = phase(cfg_.omega * t);
    return {0.5 * (lambda_t + 1.0) * carrier, 0.5 * (lambda_t - 1.0) * carrier};
}

TransferAmplitudes TransferPropagator::spectral_sum(double t) const {
    const auto& c = spectrum_.vectors;
    const auto drain = static_cast<Eigen::Index>(cfg_.drain());
    TransferAmplitudes out{{0.0, 0.0}, {0.0, 0.0}};
    for (Eigen::Index l = 0; l < c.cols(); ++l) {
        const double c0 = c(0, l);
        if (c0 == 0.0) continue;
        const cplx e = phase(spectrum_.eigenvalues(l) * t);
        out.u_plus += c0 * c0 * e;
        out.u_minus += c(drain, l) * c0 * e;
    }
    return out;
}

TransferAmplitudes TransferPropagator::operator()(double t) const {
    const TransferAmplitudes a = closed_form(t);
    const TransferAmplitudes b = spectral_sum(t);
    const double err = std::max(std::abs(a.u_plus - b.u_plus), std::abs(a.u_minus - b.u_minus));
    if (!(err <= kAmplitudeCrossCheckTol))
        throw ConsistencyError(fmt::format(
            "closed-form and spectral transfer amplitudes disagree by {:.3e} at t={:.17g}", err, t));
    return a;
}

Eigen::VectorXcd TransferPropagator::propagate_source(double t) const {
    const auto& c = spectrum_.vectors;
    Eigen::VectorXcd weights(c.cols());
    for (Eigen::Index l = 0; l < c.cols(); ++l)
        weights(l) = c(0, l) * phase(spectrum_.eigenvalues(l) * t);
    return c.cast<cplx>() * weights;
}

TransferAmplitudes u_exact(const NetworkConfig& cfg, double t) {
    return TransferPropagator(cfg)(t);
}

TransferAmplitudes u_approx(const NetworkConfig& cfg, double t, Diagnostics* diag) {
    validate(cfg);
    if (diag && cfg.kappa < cfg.capN) {
        const bool ok = cfg.delta != 0.0 && blocking_margin(cfg).in_blocking_regime;
        if (!ok)
            diag->warn("u_approx: configuration outside the blocking regime; "
                       "small-ratio approximation may be inaccurate");
    }
    const cplx carrier = phase(cfg.omega * t);
    if (cfg.kappa == 0) return {carrier, {0.0, 0.0}};
    const double arg = std::sqrt(cfg.kappa / 2.0) * cfg.lambda * t;
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    return {carrier * (c * c), -carrier * (s * s)};
}

SurvivalProbabilities survival_probabilities(const TransferPropagator& prop, const QubitState& psi,
                                             double t) {
    validate(psi);
    return probabilities_from(prop(t), psi);
}

SurvivalProbabilities survival_probabilities(const NetworkConfig& cfg, const QubitState& psi,
                                             double t) {
    return survival_probabilities(TransferPropagator(cfg), psi, t);
}

SingleExcitationState evolve_closed(const TransferPropagator& prop, const QubitState& psi, double t) {
    validate(psi);
    SingleExcitationState out;
    out.vacuum = psi.a0;
    out.sites = psi.a1 * prop.propagate_source(t);
    return out;
}

SingleExcitationState evolve_closed(const NetworkConfig& cfg, const QubitState& psi, double t) {
    return evolve_closed(TransferPropagator(cfg), psi, t);
}

} // namespace qtrans
