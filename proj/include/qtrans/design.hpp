// design.hpp — transfer-time planning and phase-gate parameter design
//
// plan_transfer works in exact rational arithmetic: whether lambda sqrt(2 kappa) / omega
// reduces to a ratio of two odd integers is a number-theoretic question that floating
// point cannot certify.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "qtrans/dynamics.hpp"
#include "qtrans/network.hpp"

namespace qtrans {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "3", "-2/7", "1.25", "1e10", "6.02e-3" exactly. Anything else (nan, inf,
// symbolic constants) raises RequiresRationalError.
Rational parse_rational(std::string_view text);

struct TransferPlan {
    BigInt m;      // kappa = 2 m^2
    BigInt kappa;
    BigInt c1;     // lambda sqrt(2 kappa) / omega = c1 / c2, both odd and coprime
    BigInt c2;
    BigInt j;      // tau = (2j+1) pi / omega
    BigInt j_prime; // tau = (2j'+1) pi / (lambda sqrt(2 kappa))
    double tau_trans{0.0}; // seconds
};

// omega and lambda share one unit; with FrequencyUnit::hz the reported tau uses
// omega_rad = 2 pi omega. `odd_multiplier` scales m (larger kappa, shorter exchange time).
TransferPlan plan_transfer(const Rational& omega, const Rational& lambda,
                           const BigInt& odd_multiplier = 1,
                           FrequencyUnit unit = FrequencyUnit::angular);

enum class GateUnknown { omega, kappa };

struct GateRequest {
    double phi{0.0}; // target phase, (-pi, pi]
    std::optional<double> omega;
    std::optional<double> lambda;
    std::optional<int> kappa;
    std::optional<int> ell;        // force a specific odd ell
    int ell_search_max{99};
    std::optional<int> kappa_max;  // upper bound on a solved kappa (e.g. the bus size N)
};

struct GatePlan {
    double phi{0.0};
    int ell{1};
    double omega{0.0};
    double lambda{0.0};
    int kappa{1};
    GateUnknown solved{GateUnknown::omega};
    double t_ex{0.0}; // pi / (lambda sqrt(2 kappa))
};

inline constexpr double kGateIntegerTol = 1e-9;

// Exactly one of omega / kappa must be left unset; lambda is always fixed.
GatePlan design_gate(const GateRequest& req);

double exchange_time(double lambda, int kappa);

// Drain state R(phi)|psi> produced at t_ex by a valid plan.
QubitState predict_gate_output(const GatePlan& plan, const QubitState& psi);

// Convenience: network with every bus oscillator resonant (kappa = N) realising the plan.
NetworkConfig gate_network(const GatePlan& plan);

} // namespace qtrans
