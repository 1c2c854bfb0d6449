// network.hpp — source/data-bus/drain configuration and its single-excitation Hamiltonian
//
// Site convention: index 0 is the source, 1..kappa the resonant bus oscillators,
// kappa+1..N the detuned ones, N+1 the drain. All frequencies are angular (rad/s).

#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace qtrans {

enum class FrequencyUnit { angular, hz };

struct NetworkConfig {
    double omega{1.0};  // source/drain/resonant bus frequency
    double lambda{0.1}; // uniform real coupling
    int capN{1};        // data-bus size N
    int kappa{1};       // resonant bus oscillators
    double delta{0.0};  // detuning of the remaining N - kappa

    double omega_tilde() const noexcept { return omega + delta; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(capN) + 2; }
    std::size_t drain() const noexcept { return static_cast<std::size_t>(capN) + 1; }
};

// Converts a config given in Hz to angular units; angular input is returned as-is.
NetworkConfig to_angular(NetworkConfig cfg, FrequencyUnit unit);

// Throws ConfigError naming the first violated invariant.
void validate(const NetworkConfig& cfg);

// Real symmetric (N+2)x(N+2) matrix. Stored real: the complex Hermitian form of the
// general model reduces to this for identical real couplings.
Eigen::MatrixXd build_hamiltonian(const NetworkConfig& cfg);

struct BlockingMargin {
    double ratio{0.0};             // (lambda/|delta|) * 3 sqrt(N)
    bool in_blocking_regime{false};
};

inline constexpr double kDefaultMarginThreshold = 0.1;

// Throws DegenerateDetuningError when delta == 0.
BlockingMargin blocking_margin(const NetworkConfig& cfg,
                               double threshold = kDefaultMarginThreshold);

} // namespace qtrans
