#include "qtrans/network.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qtrans/errors.hpp"

namespace qtrans {

NetworkConfig to_angular(NetworkConfig cfg, FrequencyUnit unit) {
    if (unit == FrequencyUnit::hz) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        cfg.omega *= two_pi;
        cfg.lambda *= two_pi;
        cfg.delta *= two_pi;
    }
    return cfg;
}

void validate(const NetworkConfig& cfg) {
    if (!(std::isfinite(cfg.omega) && cfg.omega > 0.0))
        throw ConfigError("invalid network config: omega must be > 0");
    if (!(std::isfinite(cfg.lambda) && cfg.lambda > 0.0))
        throw ConfigError("invalid network config: lambda must be > 0");
    if (cfg.capN < 1)
        throw ConfigError("invalid network config: N must be >= 1");
    if (cfg.kappa < 0 || cfg.kappa > cfg.capN)
        throw ConfigError("invalid network config: kappa must satisfy 0 <= kappa <= N (kappa=" +
                          std::to_string(cfg.kappa) + ", N=" + std::to_string(cfg.capN) + ")");
    if (!std::isfinite(cfg.delta))
        throw ConfigError("invalid network config: delta must be finite");
}

Eigen::MatrixXd build_hamiltonian(const NetworkConfig& cfg) {
    validate(cfg);
    const auto n = static_cast<Eigen::Index>(cfg.dim());
    const auto drain = n - 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    h(0, 0) = cfg.omega;
    h(drain, drain) = cfg.omega;
    for (Eigen::Index m = 1; m <= cfg.capN; ++m) {
        h(m, m) = (m <= cfg.kappa) ? cfg.omega : cfg.omega_tilde();
        h(0, m) = h(m, 0) = cfg.lambda;
        h(drain, m) = h(m, drain) = cfg.lambda;
    }
    return h;
}

BlockingMargin blocking_margin(const NetworkConfig& cfg, double threshold) {
    validate(cfg);
    if (cfg.delta == 0.0)
        throw DegenerateDetuningError("blocking margin undefined for zero detuning");
    BlockingMargin out;
    out.ratio = cfg.lambda / std::abs(cfg.delta) * 3.0 * std::sqrt(static_cast<double>(cfg.capN));
    out.in_blocking_regime = out.ratio <= threshold;
    return out;
}

} // namespace qtrans
