// oracle.hpp — brute-force reference implementations
//
// Nothing here calls into the analytic modules: these routines are the independent side
// of every equivalence check (dense eigensolver, eigen-basis propagation, Runge-Kutta
// Lindblad integration on a truncated Fock space, quadrature over input states).

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qtrans/dynamics.hpp"
#include "qtrans/fock_space.hpp"
#include "qtrans/reservoir.hpp"

namespace qtrans::oracle {

struct EigenPairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // orthonormal columns
};

// Throws DomainError when the input is not Hermitian to 1e-12 relative.
EigenPairs eig_hermitian(const Eigen::MatrixXcd& h);
EigenPairs eig_hermitian(const Eigen::MatrixXd& h);

// e^{-iHt} v0 through the eigen-decomposition of H.
Eigen::VectorXcd propagate_unitary(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v0, double t);
Eigen::VectorXcd propagate_unitary(const EigenPairs& eig, const Eigen::VectorXcd& v0, double t);

using qtrans::TruncatedFockSpace;

using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// sum_ij h_ij a_i^dag a_j on the truncated space; h is the single-particle matrix.
SparseOperator fock_hamiltonian(const Eigen::MatrixXcd& single_particle, const TruncatedFockSpace& space);

// |psi><psi| for a pure state given on the space.
DensityMatrix pure_density(const Eigen::VectorXcd& psi);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct StepControl {
    double step_scale{1e-2};    // h <= scale / omega_max and scale / (gamma (1 + nbar))
    double convergence_tol{1e-8};
    int max_halvings{6};
    std::function<void(double)> progress; // fraction of the final pass completed
};

struct LindbladResult {
    DensityMatrix rho;
    double step{0.0};
    std::size_t steps{0};
    double halving_change{0.0}; // trace distance between the last two step sizes
};

// drho/dt = -i[H, rho] + sum_k gamma (1+nbar) D[a_k] rho + gamma nbar D[a_k^dag] rho,
// D[c] rho = c rho c^dag - {c^dag c, rho}/2, integrated by classical RK4 with step halving.
LindbladResult lindblad_integrate(const SparseOperator& hamiltonian, const ReservoirParams& reservoir,
                                  const TruncatedFockSpace& space, const DensityMatrix& rho0, double t,
                                  const StepControl& control = {});

// Probability held by basis states with at least one mode at the cutoff.
double cutoff_population(const DensityMatrix& rho, const TruncatedFockSpace& space);

struct AdaptiveLindbladResult {
    LindbladResult result;
    int n_max{1};
    double cutoff_population{0.0};
};

// Raises the per-mode cutoff from start_cut until cutoff_population < tol or max_cut is hit.
AdaptiveLindbladResult lindblad_integrate_adaptive(
    const Eigen::MatrixXcd& single_particle, const ReservoirParams& reservoir,
    const std::function<DensityMatrix(const TruncatedFockSpace&)>& initial_state, double t,
    int start_cut, int max_cut, double tol = 1e-8, const StepControl& control = {});

// Gauss-Legendre average of f over input qubit states. alpha-uniform draws alpha ~ U[0,1];
// haar draws alpha^2 ~ U[0,1]. The phase is averaged with `nodes` equispaced points only
// when integrate_phase is set.
double average_over_states(const std::function<double(const QubitState&)>& f, StateMeasure measure,
                           int nodes, bool integrate_phase = false);

} // namespace qtrans::oracle
