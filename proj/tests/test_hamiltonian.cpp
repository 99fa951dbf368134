#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "cavbh/hamiltonian.hpp"
#include "cavbh/observables.hpp"

using namespace cavbh;

namespace {

const LatticeDepthSpec kLat{};

ModelParams two_well_params() {
  ModelParams p;
  p.u0 = -0.8;
  p.delta_c = -3.0;
  p.eta = 2.0;
  p.v_cl = -4.0;
  p.a_s = 0.1;
  p.n_atoms = 2;
  p.n_sites = 2;
  return p;
}

}  // namespace

TEST_CASE("decoupled limit: block diagonal in photon number, classical atom block") {
  ModelParams p = two_well_params();
  p.u0 = 0.0;
  p.eta = 0.0;
  p.eta_eff = 0.0;
  const MatrixElements me = matrix_elements_at_depth(p.v_cl, p.g1d(), kLat);
  const CoupledBasis basis{AtomBasis::enumerate(2, 2), PhotonBasis{3}};
  const Eigen::MatrixXcd h = build_full_hamiltonian(p, me, basis).to_dense();

  const int dph = basis.photons.dim();
  for (std::size_t i = 0; i < basis.atoms.dim(); ++i)
    for (std::size_t j = 0; j < basis.atoms.dim(); ++j)
      for (int n = 0; n < dph; ++n)
        for (int m = 0; m < dph; ++m)
          if (n != m)
            CHECK(std::abs(h(basis.index(i, n), basis.index(j, m))) == 0.0);

  // photon-vacuum block equals the classical Bose-Hubbard Hamiltonian
  const AtomBasis& atoms = basis.atoms;
  Eigen::MatrixXcd block(atoms.dim(), atoms.dim());
  for (std::size_t i = 0; i < atoms.dim(); ++i)
    for (std::size_t j = 0; j < atoms.dim(); ++j)
      block(i, j) = h(basis.index(i, 0), basis.index(j, 0));
  Eigen::MatrixXcd classical =
      (cplx(me.e0 + me.j0 * p.v_cl) * total_number_operator(atoms).to_dense() +
       cplx(me.e1 + me.j1 * p.v_cl) * hop_operator(atoms, p.boundary).to_dense() +
       cplx(0.5 * me.u_onsite) * interaction_operator(atoms).to_dense());
  CHECK((block - classical).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pumped empty-lattice photon sector is a displaced vacuum") {
  ModelParams p;
  p.u0 = 0.0;
  p.delta_c = -3.0;
  p.eta = 2.0;
  p.v_cl = -4.0;
  p.a_s = 0.0;
  p.n_atoms = 1;
  p.n_sites = 2;
  const MatrixElements me = matrix_elements_at_depth(p.v_cl, 0.0, kLat);
  const CoupledSolveResult r = coupled_ground_state(p, me);
  CHECK(*r.ground.photon_mean ==
        doctest::Approx(p.eta * p.eta / (p.delta_c * p.delta_c)).epsilon(1e-8));
}

TEST_CASE("transverse pump term vanishes on the unit-filled state") {
  ModelParams p = two_well_params();
  p.n_atoms = 4;
  p.n_sites = 4;
  p.eta_eff = 0.7;
  const MatrixElements me = matrix_elements_at_depth(p.v_cl, p.g1d(), kLat);
  const CoupledBasis basis{AtomBasis::enumerate(4, 4), PhotonBasis{2}};
  const OperatorMatrix h = build_full_hamiltonian(p, me, basis);

  // Mott atoms x photon superposition with <a + a^dag> != 0
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(basis.dim());
  const std::size_t mott = basis.atoms.index_of({1, 1, 1, 1});
  state(basis.index(mott, 0)) = std::sqrt(0.5);
  state(basis.index(mott, 1)) = std::sqrt(0.5);

  ModelParams p_off = p;
  p_off.eta_eff = 0.0;
  const OperatorMatrix h_off = build_full_hamiltonian(p_off, me, basis);
  const cplx pump_term = h.expectation(state) - h_off.expectation(state);
  CHECK(std::abs(pump_term) < 1e-12);

  // while a superfluid-like imbalance couples
  Eigen::VectorXcd sf = Eigen::VectorXcd::Zero(basis.dim());
  const std::size_t imb = basis.atoms.index_of({2, 0, 1, 1});
  sf(basis.index(imb, 0)) = std::sqrt(0.5);
  sf(basis.index(imb, 1)) = std::sqrt(0.5);
  CHECK(std::abs(h.expectation(sf) - h_off.expectation(sf)) > 1e-3);
}

TEST_CASE("coupled Hamiltonian passes the hermiticity gate") {
  ModelParams p = two_well_params();
  p.eta_eff = 0.3;
  const MatrixElements me = matrix_elements_at_depth(-4.0, p.g1d(), kLat);
  const CoupledBasis basis{AtomBasis::enumerate(2, 2), PhotonBasis{6}};
  const OperatorMatrix h = build_full_hamiltonian(p, me, basis);
  CHECK(h.hermitian());
  CHECK(h.hermiticity_defect() < 1e-10);
}

TEST_CASE("exact field inversion: constant limit, closed form, modulus bound") {
  ModelParams p = two_well_params();
  p.n_atoms = 1;
  MatrixElements me = matrix_elements_at_depth(-4.0, 0.0, kLat);
  const AtomBasis atoms = AtomBasis::enumerate(2, 1);
  const OperatorMatrix hop = hop_operator(atoms, Boundary::Open);

  SUBCASE("J = 0 collapses to alpha0 times the identity") {
    MatrixElements m0 = me;
    m0.j1 = 0.0;
    const OperatorMatrix a = field_operator_exact(p, m0, hop);
    const cplx alpha0 =
        p.eta / cplx(p.kappa, -(p.delta_c - p.u0 * m0.j0 * p.n_atoms));
    const Eigen::MatrixXcd diff =
        a.to_dense() - alpha0 * Eigen::MatrixXcd::Identity(2, 2);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("two-eigenvalue closed form on the open two-site chain") {
    const OperatorMatrix a = field_operator_exact(p, me, hop);
    auto f = [&](double lam) {
      return p.eta /
             cplx(p.kappa, -(p.delta_c - p.u0 * (me.j0 * p.n_atoms + me.j1 * lam)));
    };
    // B = sigma_x: f(B) = (f(1)+f(-1))/2 I + (f(1)-f(-1))/2 sigma_x
    const cplx d = 0.5 * (f(1.0) + f(-1.0));
    const cplx o = 0.5 * (f(1.0) - f(-1.0));
    CHECK(std::abs(a.coeff(0, 0) - d) < 1e-14);
    CHECK(std::abs(a.coeff(1, 1) - d) < 1e-14);
    CHECK(std::abs(a.coeff(0, 1) - o) < 1e-14);
    CHECK(std::abs(a.coeff(1, 0) - o) < 1e-14);
  }

  SUBCASE("photon number is bounded by eta^2/kappa^2") {
    const OperatorMatrix nph = photon_number_exact(p, me, hop);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(nph.to_dense());
    CHECK(es.eigenvalues().maxCoeff() <= p.eta * p.eta / (p.kappa * p.kappa) + 1e-14);
    CHECK(es.eigenvalues().minCoeff() >= 0.0);
  }
}

TEST_CASE("field expansion: zeroth order exact, error falls as J^3") {
  ModelParams p = two_well_params();
  const MatrixElements base = matrix_elements_at_depth(-4.6, p.g1d(), kLat);
  const AtomBasis atoms = AtomBasis::enumerate(2, 2);
  const OperatorMatrix hop = hop_operator(atoms, Boundary::Open);

  MatrixElements m0 = base;
  m0.j1 = 0.0;
  const Eigen::MatrixXcd d0 = field_operator_expansion(p, m0, hop).to_dense() -
                              field_operator_exact(p, m0, hop).to_dense();
  CHECK(d0.cwiseAbs().maxCoeff() < 1e-14);

  double prev = 0.0;
  for (int s = 0; s < 4; ++s) {
    MatrixElements m = base;
    m.j1 *= std::pow(0.5, s);
    const Eigen::MatrixXcd diff = field_operator_expansion(p, m, hop).to_dense() -
                                  field_operator_exact(p, m, hop).to_dense();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
    const double err = svd.singularValues()(0);
    if (s > 0) CHECK(prev / err >= 8.0);  // halving J gains at least 8x
    prev = err;
  }
}

TEST_CASE("effective Hamiltonian: classical limit and the two-well splitting") {
  const AtomBasis atoms = AtomBasis::enumerate(2, 1);

  SUBCASE("u0 = 0 reduces to the static-lattice Bose-Hubbard") {
    ModelParams p = two_well_params();
    p.u0 = 0.0;
    p.n_atoms = 1;
    const MatrixElements me = matrix_elements_at_depth(p.v_cl, 0.0, kLat);
    const OperatorMatrix h = build_effective_hamiltonian(p, me, atoms);
    const double hopping = me.e1 + me.j1 * p.v_cl;
    CHECK(std::abs(h.coeff(0, 1) - cplx(hopping)) < 1e-14);
    CHECK(energy_gap_two_well(p, me) == doctest::Approx(2.0 * hopping).epsilon(1e-14));
  }

  SUBCASE("gap equals the closed form over random cavity parameters") {
    std::mt19937 rng(20260810);
    std::uniform_real_distribution<double> u0d(-2.0, -0.05), dcd(-8.0, 2.0),
        etad(0.3, 3.0), vd(-9.0, -2.5), krd(0.5, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
      ModelParams p;
      p.u0 = u0d(rng);
      p.delta_c = dcd(rng);
      p.eta = etad(rng);
      p.v_cl = vd(rng);
      p.a_s = 0.0;
      p.n_atoms = 1;
      p.n_sites = 2;
      p.kappa_in_recoils = krd(rng);
      const MatrixElements me = matrix_elements_at_depth(p.v_cl, 0.0, kLat);
      const OperatorMatrix h = build_effective_hamiltonian(p, me, atoms);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
      const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
      CHECK(std::abs(gap - std::abs(energy_gap_two_well(p, me))) < 1e-12);
    }
  }

  SUBCASE("cavity correction vanishes at delta'_c = +-kappa") {
    // pin delta_c so that delta_c - u0 j0 N = kappa
    ModelParams p = two_well_params();
    p.n_atoms = 1;
    const MatrixElements me = matrix_elements_at_depth(p.v_cl, 0.0, kLat);
    for (const double sign : {1.0, -1.0}) {
      p.delta_c = sign * p.kappa + p.u0 * me.j0 * p.n_atoms;
      CHECK(energy_gap_two_well(p, me) ==
            doctest::Approx(2.0 * (me.e1 + me.j1 * me.v_depth)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ground state solver: dense, iterative, and the strong-coupling limit") {
  SUBCASE("two-level hopping matrix") {
    const AtomBasis b = AtomBasis::enumerate(2, 1);
    const GroundStateResult r =
        ground_state(cplx(-1.0) * hop_operator(b, Boundary::Open));
    CHECK(r.energy == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(r.state(0) - cplx(std::sqrt(0.5))) < 1e-10);
    CHECK(std::abs(r.state(1) - cplx(std::sqrt(0.5))) < 1e-10);
    CHECK(r.converged);
  }

  SUBCASE("dense and Lanczos agree to 1e-9 on a random Hermitian matrix") {
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    const int n = 500;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    const BasisTag tag{BasisTag::Kind::Atom, n, "random"};
    const OperatorMatrix op(h, tag, true);
    GroundStateOptions dense_opts;
    dense_opts.method = GroundStateOptions::Method::Dense;
    GroundStateOptions lanczos_opts;
    lanczos_opts.method = GroundStateOptions::Method::Lanczos;
    const GroundStateResult a = ground_state(op, dense_opts);
    const GroundStateResult b = ground_state(op, lanczos_opts);
    CHECK(std::abs(a.energy - b.energy) < 1e-9);
    CHECK((op.apply(b.state) - b.energy * b.state).norm() < 1e-9);
  }

  SUBCASE("hard-core limit pins one atom per well") {
    ModelParams p;
    p.u0 = 0.0;
    p.eta = 0.0;
    p.v_cl = -4.0;
    p.a_s = 1e3;
    p.n_atoms = 4;
    p.n_sites = 4;
    const MatrixElements me = matrix_elements_at_depth(p.v_cl, p.g1d(), kLat);
    const AtomBasis atoms = AtomBasis::enumerate(4, 4);
    const GroundStateResult r = ground_state(build_effective_hamiltonian(p, me, atoms));
    const double fidelity = std::abs(r.state(atoms.index_of({1, 1, 1, 1})));
    CHECK(fidelity > 0.999);
  }

  SUBCASE("unreachable tolerance reports non-convergence") {
    const AtomBasis b = AtomBasis::enumerate(4, 4);
    GroundStateOptions opts;
    opts.method = GroundStateOptions::Method::Lanczos;
    opts.tol = 1e-30;
    opts.max_restarts = 3;
    CHECK_THROWS_AS(ground_state(hop_operator(b, Boundary::Open), opts), NumericalError);
  }
}

TEST_CASE("self-consistent depth: limits, back-solve, and history") {
  SUBCASE("u0 = 0 converges immediately to the classical depth") {
    ModelParams p = two_well_params();
    p.u0 = 0.0;
    const SelfConsistentResult r = self_consistent_depth(p);
    CHECK(r.v_eff == doctest::Approx(p.v_cl).epsilon(1e-12));
    CHECK(r.iterations <= 2);
  }

  SUBCASE("pump back-solve reproduces the target depth") {
    ModelParams p;
    p.u0 = -1.0;
    p.delta_c = -3.75;
    p.v_cl = 0.0;
    p.a_s = 0.0;
    p.n_atoms = 4;
    p.n_sites = 4;
    p.eta = eta_for_target_depth(p, -4.0, kLat);
    CHECK(p.eta == doctest::Approx(2.511033).epsilon(1e-4));
    const SelfConsistentResult r = self_consistent_depth(p);
    CHECK(std::abs(r.v_eff - (-4.0)) < 1e-6);
    CHECK(std::abs(std::norm(r.field.alpha0) -
                   p.eta * p.eta / (1.0 + r.field.delta_c_prime * r.field.delta_c_prime)) <
          1e-12);
  }

  SUBCASE("iteration contracts after the first few steps") {
    ModelParams p = two_well_params();
    const SelfConsistentResult r = self_consistent_depth(p);
    const auto& h = r.v_history;
    REQUIRE(h.size() >= 4);
    for (std::size_t i = 3; i + 1 < h.size(); ++i)
      CHECK(std::abs(h[i + 1] - h[i]) <= std::abs(h[i] - h[i - 1]) + 1e-15);
  }

  SUBCASE("unreachable target depth is rejected") {
    ModelParams p = two_well_params();
    CHECK_THROWS_AS(eta_for_target_depth(p, p.v_cl + 1.0, kLat), std::invalid_argument);
  }

  SUBCASE("exhausted iteration budget reports the last depths") {
    ModelParams p = two_well_params();
    SelfConsistentOptions opts;
    opts.max_iter = 0;
    try {
      self_consistent_depth(p, HamiltonianMode::Effective, opts);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("V_eff") != std::string::npos);
    }
  }
}

TEST_CASE("exact elimination at a_s = 0 shares statistics with the bare hop ground state") {
  ModelParams p;
  p.u0 = -1.0;
  p.delta_c = -3.75;
  p.v_cl = 0.0;
  p.a_s = 0.0;
  p.n_atoms = 4;
  p.n_sites = 4;
  p.eta = eta_for_target_depth(p, -4.0, kLat);
  const SelfConsistentResult r = self_consistent_depth(p, HamiltonianMode::ExactElimination);
  const AtomBasis atoms = AtomBasis::enumerate(4, 4);
  const GroundStateResult brute =
      ground_state(cplx(-1.0) * hop_operator(atoms, Boundary::Open));
  for (int site = 1; site <= 4; ++site) {
    const SiteStatistics a = site_statistics(r.ground.state, atoms, site);
    const SiteStatistics b = site_statistics(brute.state, atoms, site);
    CHECK((a.p_occupation - b.p_occupation).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("eta_eff blocks the elimination pathway") {
  ModelParams p = two_well_params();
  p.eta_eff = 0.2;
  const MatrixElements me = matrix_elements_at_depth(-4.0, p.g1d(), kLat);
  const AtomBasis atoms = AtomBasis::enumerate(2, 2);
  const OperatorMatrix hop = hop_operator(atoms, Boundary::Open);
  CHECK_THROWS_AS(field_operator_exact(p, me, hop), std::invalid_argument);
  CHECK_THROWS_AS(build_effective_hamiltonian(p, me, atoms), std::invalid_argument);
}
