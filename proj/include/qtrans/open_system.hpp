// open_system.hpp — thermal-reservoir analytics for the kappa = N transistor
//
// Fidelity of the phase gate at the exchange time, its average over input states, the
// damped propagator Theta(t), the diffusion matrix J(t), a Fock-space series for the full
// density matrix, and the data-bus sizing sweeps built on the averaged fidelity.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qtrans/dynamics.hpp"
#include "qtrans/fock_space.hpp"
#include "qtrans/network.hpp"
#include "qtrans/reservoir.hpp"
#include "qtrans/spectral.hpp"

namespace qtrans {

namespace constants {
inline constexpr double planck = 6.62607015e-34;    // J s
inline constexpr double boltzmann = 1.380649e-23;   // J / K
} // namespace constants

// 1 / (e^{h nu / k_B T} - 1); nu in Hz, T in kelvin.
double planck_nbar(double temperature, double nu_hz);
// Same distribution parameterised by k_B T / (h nu); 0 maps to nbar = 0.
double nbar_from_kbt_over_hnu(double kbt_over_hnu);

// x = pi gamma / (lambda sqrt(2 kappa)) = gamma t_ex.
double exchange_exponent(double gamma_over_lambda, int kappa);

// The closed forms assume kappa = N. Pass the bus size to have that enforced.
struct FidelityScope {
    std::optional<int> bus_size;
    bool allow_partial_bus{false};
};

// Largest nbar for which the closed forms are used.
inline constexpr double kMaxAnalyticNbar = 1.0;

double fidelity_point(int kappa, double x, double nbar, double alpha, const FidelityScope& scope = {});
double fidelity_avg(int kappa, double x, double nbar, StateMeasure measure = StateMeasure::alpha_uniform,
                    const FidelityScope& scope = {});

// Theta_{j'j}(t) = e^{-gamma t/2} sum_l C_{j'l} e^{-i Omega_l t} C_{lj}^T.
Eigen::MatrixXcd theta_matrix(const Spectrum& spectrum, double gamma, double t);

// J_{j'j}(t) = 2 nbar (1 - e^{-gamma t}) delta_{j'j}.
Eigen::MatrixXd j_matrix(const ReservoirParams& reservoir, double t, std::size_t dim);

struct RhoSeries {
    DensityMatrix rho;
    TruncatedFockSpace space;
    double tail{0.0}; // probability outside the cutoff, 1 - tr(rho)
};

inline constexpr int kDefaultFockCut = 4;
inline constexpr double kDefaultTailTol = 1e-8;

// Density matrix of the whole network for a source qubit, every Fock index <= fock_cut.
// Throws TruncationError when the neglected probability exceeds tail_tol.
RhoSeries rho_series(const NetworkConfig& cfg, const ReservoirParams& reservoir, const QubitState& psi,
                     double t, int fock_cut = kDefaultFockCut, double tail_tol = kDefaultTailTol);

// <psi_out| rho |psi_out> with psi_out = vacuum elsewhere (x) target on the drain mode.
double drain_fidelity(const DensityMatrix& rho, const TruncatedFockSpace& space, const QubitState& target);

struct FidelityMapRow {
    double gamma_over_lambda{0.0};
    double kbt_over_hnu{0.0};
    int kappa{1};
    double nbar{0.0};
    double fbar{1.0};
    bool valid{true}; // nbar within the analytic range
};

struct FidelityMapGrid {
    std::vector<double> gamma_over_lambda;
    std::vector<double> kbt_over_hnu;
    std::vector<int> kappa;
    StateMeasure measure{StateMeasure::alpha_uniform};

    std::size_t size() const { return gamma_over_lambda.size() * kbt_over_hnu.size() * kappa.size(); }
};

// Rows ordered with kbt_over_hnu outermost, then kappa, then gamma_over_lambda; the order
// does not depend on the worker count.
std::vector<FidelityMapRow> fidelity_map(const FidelityMapGrid& grid, unsigned workers = 1);

struct OptimalKappa {
    int kappa{1};
    double fbar{1.0};
};

// Exhaustive argmax over kappa in [1, kappa_max]; ties go to the smaller kappa.
OptimalKappa optimal_kappa(double gamma_over_lambda, double nbar, int kappa_max,
                           StateMeasure measure = StateMeasure::alpha_uniform);

} // namespace qtrans
