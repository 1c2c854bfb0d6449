// dispersive.hpp — atom-field dispersive coupling used to set a bus oscillator's detuning
//
// H = w0 n + nu sigma_z + chi n sigma_3 with chi = g^2 / (w0 - nu). The atom starts in |e>,
// where sigma_3 acts as -1, so the field sees the shifted frequency w0 - chi.

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qtrans/dynamics.hpp"

namespace qtrans {

struct DispersiveConfig {
    double omega0{1.0};     // field
    double nu{0.0};         // atom
    double g{0.0};          // atom-field coupling
    double gamma_spont{0.0};
    double nbar_field{1.0}; // photon number entering the validity condition

    double detuning() const noexcept { return omega0 - nu; }
    double chi() const { return g * g / detuning(); }
    // g^2 n < delta^2 + gamma^2
    bool valid() const noexcept {
        const double d = detuning();
        return g * g * nbar_field < d * d + gamma_spont * gamma_spont;
    }
};

// omega0 - g^2/delta. Throws ResonantAtomError for delta == 0.
double effective_frequency(const DispersiveConfig& cfg);

struct DispersiveResult {
    // Joint amplitudes, index 2 n + atom with atom 0 = |g>, 1 = |e>; n = 0..n_max.
    Eigen::VectorXcd joint;
    double field_purity{1.0};
    double phase_error{0.0}; // |arg c_1(t) - arg b + (w0 - chi) t| wrapped to [0, pi]
    bool valid{true};
};

inline constexpr int kDefaultDispersiveFockCut = 1;

DispersiveResult simulate_dispersive(const DispersiveConfig& cfg, const QubitState& field, double t,
                                     int n_max = kDefaultDispersiveFockCut,
                                     Diagnostics* diag = nullptr);

// Reduced density matrix of the field from a joint vector in the layout above.
Eigen::MatrixXcd reduced_field(const Eigen::VectorXcd& joint);

} // namespace qtrans
