#include "qtrans/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>
#include <gsl/gsl_integration.h>

#include "qtrans/errors.hpp"

namespace qtrans {

void validate(const ReservoirParams& r) {
    if (!(std::isfinite(r.gamma) && r.gamma >= 0.0))
        throw DomainError("reservoir gamma must be >= 0");
    if (!(std::isfinite(r.nbar) && r.nbar >= 0.0))
        throw DomainError("reservoir nbar must be >= 0");
}

} // namespace qtrans

namespace qtrans::oracle {

EigenPairs eig_hermitian(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw DomainError("eig_hermitian: matrix is not square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError("eig_hermitian: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalInstabilityError("eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenPairs eig_hermitian(const Eigen::MatrixXd& h) {
    return eig_hermitian(Eigen::MatrixXcd(h.cast<cplx>()));
}

Eigen::VectorXcd propagate_unitary(const EigenPairs& eig, const Eigen::VectorXcd& v0, double t) {
    Eigen::VectorXcd coeff = eig.vectors.adjoint() * v0;
    for (Eigen::Index l = 0; l < coeff.size(); ++l)
        coeff(l) *= std::polar(1.0, -eig.values(l) * t);
    return eig.vectors * coeff;
}

Eigen::VectorXcd propagate_unitary(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v0, double t) {
    if (v0.size() != h.rows()) throw DomainError("propagate_unitary: dimension mismatch");
    return propagate_unitary(eig_hermitian(h), v0, t);
}

SparseOperator fock_hamiltonian(const Eigen::MatrixXcd& single_particle, const TruncatedFockSpace& space) {
    const int m = space.modes();
    if (single_particle.rows() != m || single_particle.cols() != m)
        throw DomainError("single-particle matrix does not match the number of modes");
    std::vector<Eigen::Triplet<cplx>> entries;
    for (std::size_t idx = 0; idx < space.dim(); ++idx) {
        const auto occ = space.decode(idx);
        cplx diag{0.0, 0.0};
        for (int i = 0; i < m; ++i) diag += single_particle(i, i) * static_cast<double>(occ[i]);
        if (diag != cplx{0.0, 0.0})
            entries.emplace_back(static_cast<int>(idx), static_cast<int>(idx), diag);
        // a_i^dag a_j |occ>, i != j
        for (int j = 0; j < m; ++j) {
            if (occ[j] == 0) continue;
            for (int i = 0; i < m; ++i) {
                if (i == j || occ[i] == space.n_max() || single_particle(i, j) == cplx{0.0, 0.0}) continue;
                const double amp = std::sqrt(static_cast<double>(occ[j]) * (occ[i] + 1));
                const std::size_t target = idx - space.stride(j) + space.stride(i);
                entries.emplace_back(static_cast<int>(target), static_cast<int>(idx),
                                     single_particle(i, j) * amp);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(space.dim());
    SparseOperator h(n, n);
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

DensityMatrix pure_density(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    const Eigen::MatrixXcd d = a - b;
    const Eigen::MatrixXcd herm = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

namespace {

using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// rho = re + i im, with re symmetric and im antisymmetric. Keeping the two parts as real
// matrices lets every product run on real arithmetic.
struct SplitDensity {
    RealMatrix re;
    RealMatrix im;

    static SplitDensity from(const DensityMatrix& rho) { return {rho.real(), rho.imag()}; }
    DensityMatrix to_complex() const {
        DensityMatrix out(re.rows(), re.cols());
        out.real() = re;
        out.imag() = im;
        return out;
    }
};

// Lindblad generator specialised to identical reservoirs on every mode.
class Liouvillian {
public:
    Liouvillian(const SparseOperator& h, const ReservoirParams& r, const TruncatedFockSpace& space)
        : down_rate_(r.gamma * (1.0 + r.nbar)), up_rate_(r.gamma * r.nbar) {
        const auto dim = static_cast<Eigen::Index>(space.dim());
        const int m = space.modes();

        h_re_ = h.real();
        h_im_ = h.imag();
        h_im_.prune(0.0);
        omega_max_ = 0.0;
        for (Eigen::Index row = 0; row < h.outerSize(); ++row) {
            double sum = 0.0;
            for (SparseOperator::InnerIterator it(h, row); it; ++it) sum += std::abs(it.value());
            omega_max_ = std::max(omega_max_, sum);
        }

        Eigen::VectorXd damping = Eigen::VectorXd::Zero(dim);
        for (int k = 0; k < m; ++k) {
            Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(dim);
            for (std::size_t idx = 0; idx < space.dim(); ++idx) {
                const int n = space.occupation(idx, k);
                // Truncated a a^dag vanishes on the top level.
                const double aad = n < space.n_max() ? n + 1.0 : 0.0;
                damping(static_cast<Eigen::Index>(idx)) += 0.5 * (down_rate_ * n + up_rate_ * aad);
                w(static_cast<Eigen::Index>(idx)) = std::sqrt(aad);
            }
            weights_.push_back(std::move(w));
            strides_.push_back(static_cast<Eigen::Index>(space.stride(k)));
        }
        // {D, rho}_{rs} = (d_r + d_s) rho_{rs}
        anticommutator_ = damping.replicate(1, dim) + damping.transpose().replicate(dim, 1);
    }

    // Gershgorin bound on the spectral radius of H, used for the step size.
    double omega_max() const noexcept { return omega_max_; }

    void apply(const SplitDensity& rho, SplitDensity& out) const {
        // M = H rho; -i[H, rho] = (M_im + M_im^T) - i (M_re - M_re^T).
        m_re_.noalias() = h_re_ * rho.re;
        m_im_.noalias() = h_re_ * rho.im;
        if (h_im_.nonZeros() > 0) {
            m_re_.noalias() -= h_im_ * rho.im;
            m_im_.noalias() += h_im_ * rho.re;
        }
        out.re = m_im_ + m_im_.transpose();
        out.im = m_re_.transpose() - m_re_;
        out.re -= anticommutator_.cwiseProduct(rho.re);
        out.im -= anticommutator_.cwiseProduct(rho.im);

        // a rho a^dag and a^dag rho a act as shifted element-wise products:
        //   (a X a^dag)_{rc} = w_r w_c X_{r+s, c+s},  (a^dag X a)_{rc} = w_{r-s} w_{c-s} X_{r-s, c-s},
        // with s the mode stride and w_i = sqrt(n_i + 1) below the cutoff, 0 on it.
        const Eigen::Index dim = rho.re.rows();
        for (std::size_t k = 0; k < weights_.size(); ++k) {
            const auto& w = weights_[k];
            const Eigen::Index s = strides_[k];
            const Eigen::Index len = dim - s;
            for (Eigen::Index r = 0; r < len; ++r) {
                if (down_rate_ != 0.0 && w(r) != 0.0) {
                    const double f = down_rate_ * w(r);
                    out.re.row(r).head(len) += f * w.head(len).cwiseProduct(rho.re.row(r + s).tail(len));
                    out.im.row(r).head(len) += f * w.head(len).cwiseProduct(rho.im.row(r + s).tail(len));
                }
                if (up_rate_ != 0.0 && w(r) != 0.0) {
                    const double f = up_rate_ * w(r);
                    out.re.row(r + s).tail(len) += f * w.head(len).cwiseProduct(rho.re.row(r).head(len));
                    out.im.row(r + s).tail(len) += f * w.head(len).cwiseProduct(rho.im.row(r).head(len));
                }
            }
        }
    }

private:
    double down_rate_;
    double up_rate_;
    double omega_max_{0.0};
    RealSparse h_re_;
    RealSparse h_im_;
    RealMatrix anticommutator_;
    std::vector<Eigen::RowVectorXd> weights_;
    std::vector<Eigen::Index> strides_;
    mutable RealMatrix m_re_, m_im_;
};

void axpy(SplitDensity& out, const SplitDensity& base, double h, const SplitDensity& k) {
    out.re = base.re + h * k.re;
    out.im = base.im + h * k.im;
}

DensityMatrix rk4(const Liouvillian& l, const DensityMatrix& rho0, double t, std::size_t steps,
                  const std::function<void(double)>& progress) {
    const double h = t / static_cast<double>(steps);
    SplitDensity rho = SplitDensity::from(rho0);
    SplitDensity k1, k2, k3, k4, tmp;
    for (std::size_t i = 0; i < steps; ++i) {
        l.apply(rho, k1);
        axpy(tmp, rho, 0.5 * h, k1);
        l.apply(tmp, k2);
        axpy(tmp, rho, 0.5 * h, k2);
        l.apply(tmp, k3);
        axpy(tmp, rho, h, k3);
        l.apply(tmp, k4);
        rho.re += (h / 6.0) * (k1.re + 2.0 * k2.re + 2.0 * k3.re + k4.re);
        rho.im += (h / 6.0) * (k1.im + 2.0 * k2.im + 2.0 * k3.im + k4.im);

        if (i % 64 == 63 || i + 1 == steps) {
            const double tr = rho.re.trace();
            const double herm = std::max((rho.re - rho.re.transpose()).cwiseAbs().maxCoeff(),
                                         (rho.im + rho.im.transpose()).cwiseAbs().maxCoeff());
            if (!std::isfinite(tr) || std::abs(tr - 1.0) > 1e-6 || herm > 1e-10)
                throw NumericalInstabilityError(fmt::format(
                    "Lindblad integration lost trace/Hermiticity at t={:.6g} with h={:.3e} "
                    "(trace={:.12g})",
                    h * static_cast<double>(i + 1), h, tr));
            if (progress) progress(static_cast<double>(i + 1) / static_cast<double>(steps));
        }
    }
    return rho.to_complex();
}

} // namespace

LindbladResult lindblad_integrate(const SparseOperator& hamiltonian, const ReservoirParams& reservoir,
                                  const TruncatedFockSpace& space, const DensityMatrix& rho0, double t,
                                  const StepControl& control) {
    validate(reservoir);
    const auto dim = static_cast<Eigen::Index>(space.dim());
    if (static_cast<double>(dim) * static_cast<double>(dim) > 5e7)
        throw ResourceError(fmt::format("density matrix of dimension {} is too large for the oracle", dim));
    if (hamiltonian.rows() != dim || rho0.rows() != dim || rho0.cols() != dim)
        throw DomainError("lindblad_integrate: operator dimensions do not match the Fock space");
    if (!(t >= 0.0)) throw DomainError("lindblad_integrate: t must be >= 0");

    LindbladResult out;
    if (t == 0.0) {
        out.rho = rho0;
        return out;
    }
    const Liouvillian l(hamiltonian, reservoir, space);
    double h_max = control.step_scale / std::max(l.omega_max(), 1e-300);
    if (reservoir.gamma > 0.0)
        h_max = std::min(h_max, control.step_scale / (reservoir.gamma * (1.0 + reservoir.nbar)));
    auto steps = static_cast<std::size_t>(std::ceil(t / h_max));
    steps = std::max<std::size_t>(steps, 1);

    DensityMatrix coarse = rk4(l, rho0, t, steps, {});
    for (int halving = 0;; ++halving) {
        steps *= 2;
        const bool last_try = halving + 1 >= control.max_halvings;
        DensityMatrix fine = rk4(l, rho0, t, steps, control.progress);
        const double change = trace_distance(coarse, fine);
        if (change < control.convergence_tol || last_try) {
            if (change >= control.convergence_tol)
                throw NumericalInstabilityError(fmt::format(
                    "step halving did not converge: change {:.3e} at h={:.3e}", change,
                    t / static_cast<double>(steps)));
            out.rho = std::move(fine);
            out.step = t / static_cast<double>(steps);
            out.steps = steps;
            out.halving_change = change;
            return out;
        }
        coarse = std::move(fine);
    }
}

double cutoff_population(const DensityMatrix& rho, const TruncatedFockSpace& space) {
    double pop = 0.0;
    for (std::size_t idx = 0; idx < space.dim(); ++idx) {
        bool at_top = false;
        for (int k = 0; k < space.modes() && !at_top; ++k) at_top = space.occupation(idx, k) == space.n_max();
        if (at_top) pop += rho(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)).real();
    }
    return pop;
}

AdaptiveLindbladResult lindblad_integrate_adaptive(
    const Eigen::MatrixXcd& single_particle, const ReservoirParams& reservoir,
    const std::function<DensityMatrix(const TruncatedFockSpace&)>& initial_state, double t,
    int start_cut, int max_cut, double tol, const StepControl& control) {
    AdaptiveLindbladResult out;
    for (int cut = std::max(1, start_cut); cut <= max_cut; ++cut) {
        const TruncatedFockSpace space(static_cast<int>(single_particle.rows()), cut);
        const SparseOperator h = fock_hamiltonian(single_particle, space);
        out.result = lindblad_integrate(h, reservoir, space, initial_state(space), t, control);
        out.n_max = cut;
        out.cutoff_population = cutoff_population(out.result.rho, space);
        if (out.cutoff_population < tol) return out;
    }
    return out;
}

double average_over_states(const std::function<double(const QubitState&)>& f, StateMeasure measure,
                           int nodes, bool integrate_phase) {
    if (nodes < 8) throw DomainError("state average needs at least 8 quadrature nodes");
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(nodes));
    if (!table) throw ResourceError("could not allocate Gauss-Legendre table");

    const int phase_nodes = integrate_phase ? nodes : 1;
    double total = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double x = 0.0;
        double w = 0.0;
        gsl_integration_glfixed_point(0.0, 1.0, static_cast<size_t>(i), &x, &w, table);
        const double alpha = measure == StateMeasure::alpha_uniform ? x : std::sqrt(x);
        double inner = 0.0;
        for (int p = 0; p < phase_nodes; ++p) {
            const double theta = 2.0 * std::numbers::pi * p / phase_nodes;
            inner += f(QubitState::from_angles(alpha, theta));
        }
        total += w * inner / phase_nodes;
    }
    gsl_integration_glfixed_table_free(table);
    return total;
}

} // namespace qtrans::oracle
