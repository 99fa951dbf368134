#pragma once

#include "cavbh/lattice.hpp"
#include "cavbh/operator_matrix.hpp"
#include "cavbh/solvers.hpp"

namespace cavbh {

/// Scalar steady-state field amplitude eta / [kappa - i(delta_c - U0 J0 N)].
cplx steady_state_alpha(const ModelParams& p, double j0);

/// Rescaled detuning Delta'_c = delta_c - u0 * j0 * N (kappa units).
double delta_c_prime(const ModelParams& p, double j0);

struct EffectiveField {
  cplx alpha0;
  double delta_c_prime = 0.0;
  std::optional<OperatorMatrix> a_exact;
  std::optional<OperatorMatrix> a_expanded;
};

/// Full coupled Hamiltonian on the atom x photon space, in E_R.
OperatorMatrix build_full_hamiltonian(const ModelParams& p, const MatrixElements& me,
                                      const CoupledBasis& basis);

/// Field operator from exact inversion of the steady-state condition:
/// spectral calculus of lambda -> eta/[kappa - i(delta_c - u0(j0 N + j1 lambda))]
/// over the hop operator. Non-Hermitian, acts on the atom basis.
OperatorMatrix field_operator_exact(const ModelParams& p, const MatrixElements& me,
                                    const OperatorMatrix& hop);

/// Second-order expansion of the field operator in the tunneling element j1.
OperatorMatrix field_operator_expansion(const ModelParams& p, const MatrixElements& me,
                                        const OperatorMatrix& hop);

/// a^dag a from the exact inversion (Hermitian function of the hop operator).
OperatorMatrix photon_number_exact(const ModelParams& p, const MatrixElements& me,
                                   const OperatorMatrix& hop);

/// a^dag a from the expanded field operator, A^dag A.
OperatorMatrix photon_number_expansion(const ModelParams& p, const MatrixElements& me,
                                       const OperatorMatrix& hop);

/// Atom-only Hamiltonian with the field eliminated to second order in j1:
/// [E + J(V_cl - corr)] B - c2 J^2 B^2 + (U/2) sum n(n-1).
OperatorMatrix build_effective_hamiltonian(const ModelParams& p, const MatrixElements& me,
                                           const AtomBasis& basis);

/// Atom-only Hamiltonian with the exactly inverted field operator inserted
/// back into every cavity term.
OperatorMatrix build_exact_elimination_hamiltonian(const ModelParams& p,
                                                   const MatrixElements& me,
                                                   const AtomBasis& basis);

/// Coefficient of B in the eliminated Hamiltonian (E_R); half the two-well
/// energy splitting.
double effective_hopping_coefficient(const ModelParams& p, const MatrixElements& me);

/// Coefficient of B^2 in the eliminated Hamiltonian (E_R).
double correlated_hopping_coefficient(const ModelParams& p, const MatrixElements& me);

struct CoupledSolveResult {
  GroundStateResult ground;
  CoupledBasis basis;
  int n_max_used = 0;
};

/// Ground state of the full coupled Hamiltonian. When p.n_max is empty the
/// photon cutoff starts at ceil(4|alpha0|^2 + 10) and doubles until the ground
/// state's photon number changes by less than rel_tol.
CoupledSolveResult coupled_ground_state(const ModelParams& p, const MatrixElements& me,
                                        double rel_tol = 1e-6, int n_max_cap = 512);

/// Eigenvalue of H - i kappa a^dag a with the smallest real part; the
/// dissipative stand-in for the coupled ground state.
CoupledSolveResult coupled_ground_state_nonhermitian(const ModelParams& p,
                                                     const MatrixElements& me);

struct SelfConsistentOptions {
  double tol = 1e-8;  // E_R, on the effective depth
  int max_iter = 200;
  LatticeDepthSpec numerics{};
};

struct SelfConsistentResult {
  MatrixElements me;
  EffectiveField field;
  GroundStateResult ground;
  double v_eff = 0.0;  // converged scalar fixed point, E_R
  int iterations = 0;
  std::vector<double> v_history;  // depth after each update
  HamiltonianMode mode = HamiltonianMode::ExactElimination;
  std::optional<CoupledBasis> coupled_basis;  // set for the coupled modes
};

/// Fixed-point iteration: alpha0 from the scalar formula (J0 = 1 on the first
/// pass, then the computed J0), V_eff = V_cl + hbar U0 |alpha0|^2, Wannier
/// matrix elements at V_eff, repeat until V_eff settles; then build and solve
/// the requested Hamiltonian. Damping 0.5 kicks in when the update oscillates.
SelfConsistentResult self_consistent_depth(
    const ModelParams& p, HamiltonianMode mode = HamiltonianMode::ExactElimination,
    const SelfConsistentOptions& opts = {});

/// Pump amplitude that makes the scalar self-consistent depth equal v_target.
double eta_for_target_depth(const ModelParams& p, double v_target,
                            const LatticeDepthSpec& numerics = {});

}  // namespace cavbh
