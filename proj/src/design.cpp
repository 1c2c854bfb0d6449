#include "qtrans/design.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "qtrans/errors.hpp"

namespace qtrans {

namespace mp = boost::multiprecision;

Rational parse_rational(std::string_view text) {
    const auto fail = [&]() -> RequiresRationalError {
        return RequiresRationalError(fmt::format("'{}' is not an exact rational literal", text));
    };
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        if (text.find('/', slash + 1) != std::string_view::npos) throw fail();
        const Rational num = parse_rational(text.substr(0, slash));
        const Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw fail();
        return num / den;
    }
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';

    BigInt digits = 0;
    long frac_digits = 0;
    bool any_digit = false;
    bool in_fraction = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits = digits * 10 + (ch - '0');
            any_digit = true;
            if (in_fraction) ++frac_digits;
        } else if (ch == '.' && !in_fraction) {
            in_fraction = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw fail();

    long exponent = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
        bool exp_digit = false;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            exponent = exponent * 10 + (text[i] - '0');
            exp_digit = true;
            if (exponent > 100000) throw fail();
        }
        if (!exp_digit) throw fail();
        if (exp_negative) exponent = -exponent;
    }
    if (i != text.size()) throw fail();

    const long scale = exponent - frac_digits;
    const BigInt pow10 = mp::pow(BigInt(10), static_cast<unsigned>(std::abs(scale)));
    Rational value = scale >= 0 ? Rational(digits * pow10) : Rational(digits, pow10);
    return negative ? Rational(-value) : value;
}

TransferPlan plan_transfer(const Rational& omega, const Rational& lambda, const BigInt& odd_multiplier,
                           FrequencyUnit unit) {
    if (omega <= 0 || lambda <= 0)
        throw DomainError("plan_transfer requires positive omega and lambda");
    if (odd_multiplier <= 0 || !mp::bit_test(odd_multiplier, 0))
        throw DomainError("plan_transfer multiplier must be an odd positive integer");

    const Rational ratio = lambda / omega;
    const BigInt q = mp::denominator(ratio);
    if (mp::bit_test(q, 0))
        throw NoOddRatioSolution("no odd-ratio solution (reduced denominator is odd)");
    const auto twos = static_cast<unsigned>(mp::lsb(q));

    TransferPlan plan;
    plan.m = (BigInt(1) << (twos - 1)) * odd_multiplier;
    plan.kappa = 2 * plan.m * plan.m;
    // lambda sqrt(2 kappa) / omega = 2 m lambda / omega
    const Rational c = Rational(2 * plan.m) * ratio;
    plan.c1 = mp::numerator(c);
    plan.c2 = mp::denominator(c);
    if (!mp::bit_test(plan.c1, 0) || !mp::bit_test(plan.c2, 0))
        throw ConsistencyError("odd-ratio reduction produced an even term");
    plan.j = (plan.c2 - 1) / 2;
    plan.j_prime = (plan.c1 - 1) / 2;

    double omega_rad = omega.convert_to<double>();
    if (unit == FrequencyUnit::hz) omega_rad *= 2.0 * std::numbers::pi;
    plan.tau_trans = plan.c2.convert_to<double>() * std::numbers::pi / omega_rad;
    return plan;
}

double exchange_time(double lambda, int kappa) {
    return std::numbers::pi / (lambda * std::sqrt(2.0 * kappa));
}

GatePlan design_gate(const GateRequest& req) {
    constexpr double pi = std::numbers::pi;
    if (!(req.phi > -pi && req.phi <= pi))
        throw DomainError("gate phase must lie in (-pi, pi]");
    if (!req.lambda || !(*req.lambda > 0.0))
        throw DomainError("design_gate requires a fixed positive lambda");
    if (req.omega.has_value() == req.kappa.has_value())
        throw DomainError("design_gate solves for exactly one of omega or kappa");
    if (req.ell && (*req.ell <= 0 || *req.ell % 2 == 0))
        throw DomainError("ell must be an odd positive integer");

    const double shift = req.phi / pi;
    GatePlan plan;
    plan.phi = req.phi;
    plan.lambda = *req.lambda;

    if (req.kappa) {
        if (*req.kappa < 1) throw DomainError("kappa must be a positive integer");
        int ell = req.ell.value_or(1);
        if (!req.ell)
            while (ell - shift <= 0.0) ell += 2;
        if (!(ell - shift > 0.0))
            throw NoGateSolution(fmt::format("ell={} gives a non-positive ell - phi/pi", ell));
        plan.kappa = *req.kappa;
        plan.ell = ell;
        plan.omega = plan.lambda * std::sqrt(2.0 * plan.kappa) * (ell - shift);
        plan.solved = GateUnknown::omega;
    } else {
        if (!(*req.omega > 0.0)) throw DomainError("omega must be positive");
        struct Candidate {
            int ell;
            double kappa;
        };
        std::vector<Candidate> near;
        const int first = req.ell.value_or(1);
        const int last = req.ell.value_or(req.ell_search_max);
        bool found = false;
        for (int ell = first; ell <= last; ell += 2) {
            const double r = ell - shift;
            if (r <= 0.0) continue;
            const double k = (*req.omega * *req.omega) / (2.0 * plan.lambda * plan.lambda * r * r);
            const double rounded = std::round(k);
            near.push_back({ell, k});
            if (rounded < 1.0 || std::abs(k - rounded) > kGateIntegerTol * std::max(1.0, k)) continue;
            if (req.kappa_max && rounded > *req.kappa_max) continue;
            plan.ell = ell;
            plan.kappa = static_cast<int>(rounded);
            found = true;
            break;
        }
        if (!found) {
            std::sort(near.begin(), near.end(), [](const Candidate& a, const Candidate& b) {
                return std::abs(a.kappa - std::round(a.kappa)) < std::abs(b.kappa - std::round(b.kappa));
            });
            std::string list;
            for (std::size_t i = 0; i < near.size() && i < 3; ++i)
                list += fmt::format("{}(ell={}, kappa={:.6g})", i ? ", " : "", near[i].ell, near[i].kappa);
            throw NoGateSolution("no integral kappa within ell search bound; closest: " +
                                 (list.empty() ? std::string("none") : list));
        }
        plan.omega = *req.omega;
        plan.solved = GateUnknown::kappa;
    }
    plan.t_ex = exchange_time(plan.lambda, plan.kappa);
    return plan;
}

QubitState predict_gate_output(const GatePlan& plan, const QubitState& psi) {
    validate(psi);
    return {psi.a0, psi.a1 * std::polar(1.0, plan.phi)};
}

NetworkConfig gate_network(const GatePlan& plan) {
    return NetworkConfig{plan.omega, plan.lambda, plan.kappa, plan.kappa, 0.0};
}

} // namespace qtrans
