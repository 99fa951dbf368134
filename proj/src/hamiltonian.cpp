#include "cavbh/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace cavbh {

namespace {

/// -i (a - a^dag), the Hermitian pump quadrature.
OperatorMatrix photon_drive(const PhotonBasis& pb) {
  const int d = pb.dim();
  OperatorMatrix::Dense m = OperatorMatrix::Dense::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    m(n - 1, n) = cplx(0.0, -std::sqrt(double(n)));
    m(n, n - 1) = cplx(0.0, std::sqrt(double(n)));
  }
  return OperatorMatrix(std::move(m), pb.tag(), true);
}

/// a + a^dag.
OperatorMatrix photon_position(const PhotonBasis& pb) {
  const int d = pb.dim();
  OperatorMatrix::Dense m = OperatorMatrix::Dense::Zero(d, d);
  for (int n = 1; n < d; ++n) m(n - 1, n) = m(n, n - 1) = std::sqrt(double(n));
  return OperatorMatrix(std::move(m), pb.tag(), true);
}

struct HopSpectral {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

HopSpectral decompose(const OperatorMatrix& hop) {
  hop.assert_hermitian(1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hop.to_dense());
  if (es.info() != Eigen::Success)
    throw NumericalError("hop operator diagonalization failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

OperatorMatrix assemble_function(const HopSpectral& sp,
                                 const Eigen::VectorXcd& fvals, const BasisTag& tag,
                                 bool hermitian) {
  Eigen::MatrixXcd m =
      sp.vectors * fvals.asDiagonal() * sp.vectors.adjoint();
  return OperatorMatrix(std::move(m), tag, hermitian);
}

cplx field_scalar(const ModelParams& p, const MatrixElements& me, double lambda) {
  const double detuning =
      p.delta_c - p.u0 * (me.j0 * p.n_atoms + me.j1 * lambda);
  return p.eta / cplx(p.kappa, -detuning);
}

void require_mirror_pump_only(const ModelParams& p, const char* what) {
  if (p.eta_eff != 0.0)
    throw std::invalid_argument(std::string(what) +
                                " requires eta_eff = 0; the transverse pump term "
                                "does not commute with the hop operator");
}

}  // namespace

cplx steady_state_alpha(const ModelParams& p, double j0) {
  return p.eta / cplx(p.kappa, -(p.delta_c - p.u0 * j0 * p.n_atoms));
}

double delta_c_prime(const ModelParams& p, double j0) {
  return p.delta_c - p.u0 * j0 * p.n_atoms;
}

OperatorMatrix build_full_hamiltonian(const ModelParams& p, const MatrixElements& me,
                                      const CoupledBasis& basis) {
  p.validate();
  if (basis.atoms.n_sites() != p.n_sites || basis.atoms.n_atoms() != p.n_atoms)
    throw std::invalid_argument("coupled basis does not match model parameters");
  const double kr = p.kappa_in_recoils;

  const OperatorMatrix n_at = total_number_operator(basis.atoms);
  const OperatorMatrix hop = hop_operator(basis.atoms, p.boundary);
  const OperatorMatrix lattice_coupling =
      cplx(me.j0) * n_at + cplx(me.j1) * hop;  // J0 N + J B
  const OperatorMatrix i_at = OperatorMatrix::identity(basis.atoms.tag());
  const OperatorMatrix i_ph = OperatorMatrix::identity(basis.photons.tag());
  const OperatorMatrix n_ph = photon_number_operator(basis.photons);

  OperatorMatrix h = tensor(cplx(me.e0) * n_at + cplx(me.e1) * hop, i_ph);
  h += cplx(p.u0 * kr) * tensor(lattice_coupling, n_ph);
  h += cplx(p.v_cl) * tensor(lattice_coupling, i_ph);
  h += cplx(-p.delta_c * kr) * tensor(i_at, n_ph);
  h += cplx(p.eta * kr) * tensor(i_at, photon_drive(basis.photons));
  h += cplx(0.5 * me.u_onsite) * tensor(interaction_operator(basis.atoms), i_ph);
  if (p.eta_eff != 0.0) {
    h += cplx(p.eta_eff * kr * me.jt0) *
         tensor(alternating_number_operator(basis.atoms), photon_position(basis.photons));
  }

  if (h.hermiticity_defect() > 1e-10)
    throw NumericalError("coupled Hamiltonian has non-Hermitian residual > 1e-10");
  return h;
}

OperatorMatrix field_operator_exact(const ModelParams& p, const MatrixElements& me,
                                    const OperatorMatrix& hop) {
  require_mirror_pump_only(p, "exact field inversion");
  const HopSpectral sp = decompose(hop);
  Eigen::VectorXcd f(sp.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    f(i) = field_scalar(p, me, sp.values(i));
  return assemble_function(sp, f, hop.tag(), false);
}

OperatorMatrix field_operator_expansion(const ModelParams& p, const MatrixElements& me,
                                        const OperatorMatrix& hop) {
  require_mirror_pump_only(p, "field expansion");
  const double dcp = delta_c_prime(p, me.j0);
  const cplx den(p.kappa, -dcp);
  const cplx lead = p.eta / den;
  const cplx c1 = -cplx(0, 1) * p.u0 * me.j1 / den;
  const cplx c2 = -(p.u0 * me.j1) * (p.u0 * me.j1) / (den * den);
  const OperatorMatrix ident = OperatorMatrix::identity(hop.tag());
  return lead * (ident + c1 * hop + c2 * (hop * hop));
}

OperatorMatrix photon_number_exact(const ModelParams& p, const MatrixElements& me,
                                   const OperatorMatrix& hop) {
  require_mirror_pump_only(p, "exact field inversion");
  const HopSpectral sp = decompose(hop);
  Eigen::VectorXcd f(sp.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    f(i) = std::norm(field_scalar(p, me, sp.values(i)));
  return assemble_function(sp, f, hop.tag(), true);
}

OperatorMatrix photon_number_expansion(const ModelParams& p, const MatrixElements& me,
                                       const OperatorMatrix& hop) {
  const OperatorMatrix a = field_operator_expansion(p, me, hop);
  OperatorMatrix n = a.adjoint() * a;
  return OperatorMatrix(n.to_dense(), hop.tag(), true);
}

double effective_hopping_coefficient(const ModelParams& p, const MatrixElements& me) {
  const double dcp = delta_c_prime(p, me.j0);
  const double k2 = p.kappa * p.kappa;
  const double d2 = dcp * dcp;
  const double corr =
      p.u0 * p.kappa_in_recoils * p.eta * p.eta * (k2 - d2) / ((k2 + d2) * (k2 + d2));
  // The potential multiplying J is the mean depth the Wannier basis was
  // computed at (me.v_depth = V_cl + hbar U0 |alpha0|^2); the eta^2 term is
  // the cavity-fluctuation correction around it. For U0 = 0 the elements are
  // computed at V_cl and this reduces to E + J V_cl.
  return me.e1 + me.j1 * (me.v_depth - corr);
}

double correlated_hopping_coefficient(const ModelParams& p, const MatrixElements& me) {
  const double dcp = delta_c_prime(p, me.j0);
  const double k2 = p.kappa * p.kappa;
  const double d2 = dcp * dcp;
  const double denom = (k2 + d2) * (k2 + d2) * (k2 + d2);
  return -3.0 * p.u0 * p.u0 * p.kappa_in_recoils * p.eta * p.eta * dcp *
         (3.0 * k2 - d2) / denom * me.j1 * me.j1;
}

OperatorMatrix build_effective_hamiltonian(const ModelParams& p, const MatrixElements& me,
                                           const AtomBasis& basis) {
  require_mirror_pump_only(p, "effective Hamiltonian");
  const OperatorMatrix hop = hop_operator(basis, p.boundary);
  OperatorMatrix h = cplx(effective_hopping_coefficient(p, me)) * hop;
  h += cplx(correlated_hopping_coefficient(p, me)) * (hop * hop);
  h += cplx(0.5 * me.u_onsite) * interaction_operator(basis);
  OperatorMatrix out(h.to_dense(), basis.tag(), true);
  out.assert_hermitian(1e-10);
  return out;
}

OperatorMatrix build_exact_elimination_hamiltonian(const ModelParams& p,
                                                   const MatrixElements& me,
                                                   const AtomBasis& basis) {
  require_mirror_pump_only(p, "exact elimination");
  const double kr = p.kappa_in_recoils;
  const double n = p.n_atoms;
  const OperatorMatrix hop = hop_operator(basis, p.boundary);
  const HopSpectral sp = decompose(hop);

  Eigen::VectorXcd g(sp.values.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double lam = sp.values(i);
    const cplx f = field_scalar(p, me, lam);
    const double nph = std::norm(f);
    double val = me.e0 * n + me.e1 * lam;
    val += (p.v_cl + p.u0 * kr * nph) * (me.j0 * n + me.j1 * lam);
    val += -p.delta_c * kr * nph;
    val += 2.0 * p.eta * kr * f.imag();
    g(i) = val;
  }
  OperatorMatrix h = assemble_function(sp, g, basis.tag(), true);
  h += cplx(0.5 * me.u_onsite) * interaction_operator(basis);
  OperatorMatrix out(h.to_dense(), basis.tag(), true);
  out.assert_hermitian(1e-10);
  return out;
}

CoupledSolveResult coupled_ground_state(const ModelParams& p, const MatrixElements& me,
                                        double rel_tol, int n_max_cap) {
  const cplx alpha0 = steady_state_alpha(p, me.j0);
  int n_max = p.n_max.value_or(
      static_cast<int>(std::ceil(4.0 * std::norm(alpha0) + 10.0)));

  auto solve_at = [&](int cutoff) {
    CoupledBasis basis{AtomBasis::enumerate(p.n_sites, p.n_atoms), PhotonBasis{cutoff}};
    OperatorMatrix h = build_full_hamiltonian(p, me, basis);
    GroundStateResult gs = ground_state(h);
    const OperatorMatrix nph =
        tensor(OperatorMatrix::identity(basis.atoms.tag()),
               photon_number_operator(basis.photons));
    gs.photon_mean = std::real(nph.expectation(gs.state));
    gs.v_eff = p.v_cl + p.u0 * p.kappa_in_recoils * *gs.photon_mean;
    return CoupledSolveResult{std::move(gs), std::move(basis), cutoff};
  };

  if (p.n_max) return solve_at(*p.n_max);

  CoupledSolveResult prev = solve_at(n_max);
  while (true) {
    if (2 * n_max > n_max_cap) {
      std::ostringstream msg;
      msg << "photon cutoff did not converge below n_max = " << n_max_cap
          << " (mean photon number " << *prev.ground.photon_mean
          << "); the Hermitian coupled ground state may be running away near a "
             "cavity resonance inside the hop spectrum";
      throw NumericalError(msg.str());
    }
    n_max *= 2;
    CoupledSolveResult next = solve_at(n_max);
    const double a = *prev.ground.photon_mean;
    const double b = *next.ground.photon_mean;
    if (std::abs(b - a) <= rel_tol * std::max(std::abs(b), 1e-9)) return next;
    prev = std::move(next);
  }
}

CoupledSolveResult coupled_ground_state_nonhermitian(const ModelParams& p,
                                                     const MatrixElements& me) {
  const cplx alpha0 = steady_state_alpha(p, me.j0);
  const int n_max = p.n_max.value_or(
      static_cast<int>(std::ceil(4.0 * std::norm(alpha0) + 10.0)));
  CoupledBasis basis{AtomBasis::enumerate(p.n_sites, p.n_atoms), PhotonBasis{n_max}};
  Eigen::MatrixXcd h = build_full_hamiltonian(p, me, basis).to_dense();
  const OperatorMatrix nph = tensor(OperatorMatrix::identity(basis.atoms.tag()),
                                    photon_number_operator(basis.photons));
  h -= cplx(0, p.kappa * p.kappa_in_recoils) * nph.to_dense();

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw NumericalError("non-Hermitian eigensolve failed");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < h.rows(); ++i)
    if (es.eigenvalues()(i).real() < es.eigenvalues()(best).real()) best = i;

  GroundStateResult gs;
  gs.energy = es.eigenvalues()(best).real();
  gs.state = es.eigenvectors().col(best);
  gs.state.normalize();
  fix_phase(gs.state);
  gs.converged = true;
  gs.photon_mean = std::real(nph.expectation(gs.state));
  gs.v_eff = p.v_cl + p.u0 * p.kappa_in_recoils * *gs.photon_mean;
  return {std::move(gs), std::move(basis), n_max};
}

SelfConsistentResult self_consistent_depth(const ModelParams& p, HamiltonianMode mode,
                                           const SelfConsistentOptions& opts) {
  p.validate();
  const double kr = p.kappa_in_recoils;

  // First pass with J0 = 1 as the field expectation approximation.
  double j0 = 1.0;
  cplx alpha0 = steady_state_alpha(p, j0);
  double v = p.v_cl + p.u0 * kr * std::norm(alpha0);
  MatrixElements me = matrix_elements_at_depth(v, p.g1d(), opts.numerics);
  j0 = me.j0;

  double damping = 1.0;
  double prev_delta = 0.0;
  int iterations = 1;
  bool converged = false;
  std::vector<double> history{v};
  for (; iterations <= opts.max_iter; ++iterations) {
    alpha0 = steady_state_alpha(p, j0);
    const double v_target = p.v_cl + p.u0 * kr * std::norm(alpha0);
    const double delta = v_target - v;
    if (std::abs(delta) < opts.tol) {
      converged = true;
      break;
    }
    if (prev_delta != 0.0 && delta * prev_delta < 0.0) damping = 0.5;
    prev_delta = delta;
    v += damping * delta;
    history.push_back(v);
    me = matrix_elements_at_depth(v, p.g1d(), opts.numerics);
    j0 = me.j0;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "self-consistent depth did not converge in " << opts.max_iter
        << " iterations; last V_eff = " << v << ", previous delta = " << prev_delta;
    throw NumericalError(msg.str());
  }

  SelfConsistentResult result;
  result.me = me;
  result.v_eff = v;
  result.iterations = iterations;
  result.v_history = std::move(history);
  result.mode = mode;
  result.field.alpha0 = alpha0;
  result.field.delta_c_prime = delta_c_prime(p, j0);

  const AtomBasis atoms = AtomBasis::enumerate(p.n_sites, p.n_atoms);
  if (p.eta_eff == 0.0) {
    const OperatorMatrix hop = hop_operator(atoms, p.boundary);
    result.field.a_exact = field_operator_exact(p, me, hop);
    result.field.a_expanded = field_operator_expansion(p, me, hop);
  }

  switch (mode) {
    case HamiltonianMode::ExactElimination: {
      const OperatorMatrix hop = hop_operator(atoms, p.boundary);
      OperatorMatrix h = build_exact_elimination_hamiltonian(p, me, atoms);
      result.ground = ground_state(h);
      const OperatorMatrix nph = photon_number_exact(p, me, hop);
      result.ground.photon_mean = std::real(nph.expectation(result.ground.state));
      result.ground.v_eff = p.v_cl + p.u0 * kr * *result.ground.photon_mean;
      break;
    }
    case HamiltonianMode::Effective: {
      const OperatorMatrix hop = hop_operator(atoms, p.boundary);
      OperatorMatrix h = build_effective_hamiltonian(p, me, atoms);
      result.ground = ground_state(h);
      const OperatorMatrix nph = photon_number_expansion(p, me, hop);
      result.ground.photon_mean = std::real(nph.expectation(result.ground.state));
      result.ground.v_eff = p.v_cl + p.u0 * kr * *result.ground.photon_mean;
      break;
    }
    case HamiltonianMode::Coupled: {
      CoupledSolveResult c = coupled_ground_state(p, me);
      result.ground = std::move(c.ground);
      result.coupled_basis = std::move(c.basis);
      break;
    }
    case HamiltonianMode::CoupledNonHermitian: {
      CoupledSolveResult c = coupled_ground_state_nonhermitian(p, me);
      result.ground = std::move(c.ground);
      result.coupled_basis = std::move(c.basis);
      break;
    }
  }
  return result;
}

double eta_for_target_depth(const ModelParams& p, double v_target,
                            const LatticeDepthSpec& numerics) {
  const double photons = (v_target - p.v_cl) / (p.u0 * p.kappa_in_recoils);
  if (!(photons >= 0))
    throw std::invalid_argument(
        "target depth is not reachable: (v_target - v_cl)/u0 must give a "
        "non-negative photon number");
  const MatrixElements me = matrix_elements_at_depth(v_target, p.g1d(), numerics);
  const double dcp = delta_c_prime(p, me.j0);
  return std::sqrt(photons * (p.kappa * p.kappa + dcp * dcp));
}

}  // namespace cavbh
