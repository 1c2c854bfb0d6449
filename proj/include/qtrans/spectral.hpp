// spectral.hpp — closed-form eigen-decomposition of the network Hamiltonian
//
// The spectrum splits into four families: the source/drain antisymmetric mode at
// omega, Helmert-type degenerate modes on the resonant and on the detuned bus
// sites, and a trio obtained from the cubic
//     x^3 - delta x^2 - 2 N lambda^2 x + 2 kappa lambda^2 delta = 0,   x = Omega - omega,
// written in trigonometric form with R_j = 3 x_j.

#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "qtrans/network.hpp"

namespace qtrans {

// Root labels follow the closed form: R0 = D + 2 sqrt(Phi) cos(theta),
// R+/- = D - sqrt(Phi) (cos(theta) +/- sqrt(3) sin(theta)).
enum class CubicRoot : int { zero = 0, plus = 1, minus = 2 };

struct CubicSpectralParams {
    double big_phi{0.0};   // D^2 + 6 N lambda^2
    double eta{0.0};       // D [D^2 + 9 (N - 3 kappa) lambda^2]
    double theta{0.0};     // in [0, pi/3]
    double delta_eff{0.0}; // detuning entering the cubic; 0 when kappa == N
    std::array<double, 3> R{};
    std::array<double, 3> A{};
    std::array<bool, 3> collided{}; // root within eps_R of omega or omega_tilde

    double root(CubicRoot j) const noexcept { return R[static_cast<int>(j)]; }
    double amplitude(CubicRoot j) const noexcept { return A[static_cast<int>(j)]; }
    // Omega_j = omega + R_j / 3
    double eigenvalue(CubicRoot j, double omega) const noexcept { return omega + root(j) / 3.0; }
};

// Collision threshold on |R_j| and |R_j - 3 delta|, in units of lambda.
inline constexpr double kRootCollisionScale = 1e-12;

CubicSpectralParams cubic_params(const NetworkConfig& cfg);

enum class Family { antisymmetric, resonant_degenerate, detuned_degenerate, cubic_trio };

const char* to_string(Family f) noexcept;

struct Spectrum {
    Eigen::VectorXd eigenvalues;  // Omega_l, ordered by family (antisym, resonant, detuned, trio)
    std::vector<Family> families; // one label per column
    Eigen::MatrixXd vectors;      // orthonormal columns in site basis
    // Normalization N_j' of each cubic root; 0 when the root has no eigenvector of its own.
    std::array<double, 3> trio_normalization{};
    std::vector<CubicRoot> trio_roots; // cubic root behind each trio column, in column order

    std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

Spectrum analytic_spectrum(const NetworkConfig& cfg);

// Number of columns per family, in enum order.
std::array<std::size_t, 4> family_sizes(const Spectrum& s);

} // namespace qtrans
