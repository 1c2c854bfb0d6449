#include "qtrans/dispersive.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qtrans/errors.hpp"

namespace qtrans {
namespace {

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return std::abs(a);
}

} // namespace

double effective_frequency(const DispersiveConfig& cfg) {
    if (cfg.detuning() == 0.0)
        throw ResonantAtomError("dispersive regime undefined: atom resonant with the field");
    return cfg.omega0 - cfg.chi();
}

Eigen::MatrixXcd reduced_field(const Eigen::VectorXcd& joint) {
    const Eigen::Index levels = joint.size() / 2;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(levels, levels);
    for (Eigen::Index m = 0; m < levels; ++m)
        for (Eigen::Index n = 0; n < levels; ++n)
            for (Eigen::Index atom = 0; atom < 2; ++atom)
                rho(m, n) += joint(2 * m + atom) * std::conj(joint(2 * n + atom));
    return rho;
}

DispersiveResult simulate_dispersive(const DispersiveConfig& cfg, const QubitState& field, double t,
                                     int n_max, Diagnostics* diag) {
    validate(field);
    if (n_max < 1) throw DomainError("dispersive Fock cutoff must be >= 1");
    const double shifted = effective_frequency(cfg);

    DispersiveResult out;
    out.valid = cfg.valid();
    if (!out.valid && diag)
        diag->warn(fmt::format("dispersive approximation outside validity: g^2 n = {:.6g} >= "
                               "delta^2 + gamma^2 = {:.6g}",
                               cfg.g * cfg.g * cfg.nbar_field,
                               cfg.detuning() * cfg.detuning() + cfg.gamma_spont * cfg.gamma_spont));

    // [n (w0 + chi sigma_3), sigma_z] = 0: the field factor evolves under w0 - chi,
    // the atom factor picks up e^{-i nu t} from sigma_z |e> = |e>.
    Eigen::VectorXcd field_t = Eigen::VectorXcd::Zero(n_max + 1);
    field_t(0) = field.a0;
    field_t(1) = field.a1 * std::polar(1.0, -shifted * t);
    const cplx atom_e = std::polar(1.0, -cfg.nu * t);

    out.joint = Eigen::VectorXcd::Zero(2 * (n_max + 1));
    for (int n = 0; n <= n_max; ++n) out.joint(2 * n + 1) = field_t(n) * atom_e;

    const Eigen::MatrixXcd rho = reduced_field(out.joint);
    out.field_purity = (rho * rho).trace().real();

    if (std::abs(field.a1) > 0.0) {
        const cplx c1 = out.joint(3) / atom_e;
        out.phase_error = wrap_angle(std::arg(c1) - std::arg(field.a1) + shifted * t);
    }
    return out;
}

} // namespace qtrans
