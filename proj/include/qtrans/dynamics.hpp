// dynamics.hpp — closed-system evolution in the vacuum + single-excitation sector

#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "qtrans/errors.hpp"
#include "qtrans/network.hpp"
#include "qtrans/spectral.hpp"

namespace qtrans {

using cplx = std::complex<double>;

// a0 |0> + a1 |1>; from_angles builds alpha |0> + beta e^{i theta} |1>.
struct QubitState {
    cplx a0{1.0, 0.0};
    cplx a1{0.0, 0.0};

    static QubitState from_angles(double alpha, double theta);
    double norm2() const noexcept { return std::norm(a0) + std::norm(a1); }
};

// Distribution of input states used when averaging over them.
enum class StateMeasure { alpha_uniform, haar };

// Throws DomainError if |a0|^2 + |a1|^2 deviates from 1 by more than 1e-12.
void validate(const QubitState& psi);

struct SingleExcitationState {
    cplx vacuum{1.0, 0.0};
    Eigen::VectorXcd sites; // SiteIndexConvention amplitudes

    double norm2() const { return std::norm(vacuum) + sites.squaredNorm(); }
};

struct TransferAmplitudes {
    cplx u_plus{1.0, 0.0};  // stay on the source
    cplx u_minus{0.0, 0.0}; // arrive at the drain
};

// Discrepancy between the closed-form and spectral-sum routes that aborts evaluation.
inline constexpr double kAmplitudeCrossCheckTol = 1e-8;

// Precomputes the cubic parameters and the analytic spectrum of one network so that
// time grids can be evaluated cheaply. Immutable after construction.
class TransferPropagator {
public:
    explicit TransferPropagator(const NetworkConfig& cfg);

    const NetworkConfig& config() const noexcept { return cfg_; }
    const CubicSpectralParams& params() const noexcept { return params_; }
    const Spectrum& spectrum() const noexcept { return spectrum_; }

    // u± = [Lambda(t) ± 1] e^{-i omega t} / 2, Lambda(t) = sum_j A_j e^{-i R_j t / 3}.
    TransferAmplitudes closed_form(double t) const;
    // u+ = sum_l C_{0l}^2 e^{-i Omega_l t}, u- = sum_l C_{N+1,l} C_{0l} e^{-i Omega_l t}.
    TransferAmplitudes spectral_sum(double t) const;
    // closed_form, verified against spectral_sum; throws ConsistencyError on mismatch.
    TransferAmplitudes operator()(double t) const;

    // Row of e^{-iHt} applied to the source unit vector.
    Eigen::VectorXcd propagate_source(double t) const;

private:
    NetworkConfig cfg_;
    CubicSpectralParams params_;
    Spectrum spectrum_;
};

TransferAmplitudes u_exact(const NetworkConfig& cfg, double t);

// Small-ratio approximation: (e^{-iwt} cos^2(sqrt(k/2) l t), -e^{-iwt} sin^2(sqrt(k/2) l t)).
// Warns through diag when kappa < N and the blocking margin test fails.
TransferAmplitudes u_approx(const NetworkConfig& cfg, double t, Diagnostics* diag = nullptr);

struct SurvivalProbabilities {
    double p_source{1.0};
    double p_drain{1.0};
};

SurvivalProbabilities survival_probabilities(const TransferPropagator& prop, const QubitState& psi,
                                             double t);
SurvivalProbabilities survival_probabilities(const NetworkConfig& cfg, const QubitState& psi,
                                             double t);

SingleExcitationState evolve_closed(const TransferPropagator& prop, const QubitState& psi, double t);
SingleExcitationState evolve_closed(const NetworkConfig& cfg, const QubitState& psi, double t);

} // namespace qtrans
