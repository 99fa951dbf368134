#include <doctest.h>

#include <cmath>
#include <random>

#include "cavbh/observables.hpp"

using namespace cavbh;

namespace {

const LatticeDepthSpec kLat{};

Eigen::VectorXcd basis_state(const AtomBasis& b, const std::vector<int>& occ) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(b.dim());
  v(b.index_of(occ)) = 1.0;
  return v;
}

Eigen::VectorXcd random_state(std::size_t dim, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (auto& x : v.reshaped()) x = cplx(g(rng), g(rng));
  v.normalize();
  return v;
}

}  // namespace

TEST_CASE("site statistics on product and symmetric states") {
  const AtomBasis mott = AtomBasis::enumerate(4, 4);
  const SiteStatistics sm = site_statistics(basis_state(mott, {1, 1, 1, 1}), mott, 2);
  CHECK(sm.p_occupation(1) == doctest::Approx(1.0));
  CHECK(sm.variance_n == doctest::Approx(0.0));
  CHECK(sm.mean_n == doctest::Approx(1.0));

  const AtomBasis b = AtomBasis::enumerate(2, 1);
  Eigen::VectorXcd sym(2);
  sym << std::sqrt(0.5), std::sqrt(0.5);
  for (int site = 1; site <= 2; ++site) {
    const SiteStatistics s = site_statistics(sym, b, site);
    CHECK(s.p_occupation(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.p_occupation(1) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK_THROWS_AS(site_statistics(sym, b, 3), std::invalid_argument);
  Eigen::VectorXcd unnormalized = 2.0 * sym;
  CHECK_THROWS_AS(site_statistics(unnormalized, b, 1), std::invalid_argument);
}

TEST_CASE("periodic hopping condensate has binomial site occupations") {
  const AtomBasis b = AtomBasis::enumerate(4, 4);
  const GroundStateResult gs =
      ground_state(cplx(-1.0) * hop_operator(b, Boundary::Periodic));
  const SiteStatistics s = site_statistics(gs.state, b, 1);
  for (int k = 0; k <= 4; ++k) {
    const double binom = std::tgamma(5.0) / (std::tgamma(k + 1.0) * std::tgamma(5.0 - k)) *
                         std::pow(0.25, k) * std::pow(0.75, 4 - k);
    CHECK(std::abs(s.p_occupation(k) - binom) < 1e-2);
  }
}

TEST_CASE("probability vectors are normalized and consistent on random states") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + trial % 3;
    const int n = 1 + trial % 4;
    const AtomBasis b = AtomBasis::enumerate(m, n);
    const Eigen::VectorXcd psi = random_state(b.dim(), rng);
    for (int site = 1; site <= m; ++site) {
      const SiteStatistics s = site_statistics(psi, b, site);
      CHECK(std::abs(s.p_occupation.sum() - 1.0) < 1e-10);
      CHECK(s.p_occupation.minCoeff() >= 0.0);
      double second = 0;
      for (int k = 0; k <= n; ++k) second += double(k) * k * s.p_occupation(k);
      CHECK(std::abs(s.variance_n - (second - s.mean_n * s.mean_n)) < 1e-10);
    }
  }
}

TEST_CASE("density correlations: product states and the sum rule") {
  const AtomBasis b = AtomBasis::enumerate(4, 4);
  const CorrelationReport mott = density_correlations(basis_state(b, {1, 1, 1, 1}), b);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(mott.pairs(i, j) == doctest::Approx(1.0));
  CHECK(mott.difference_13_12 == doctest::Approx(0.0));

  const CorrelationReport stack = density_correlations(basis_state(b, {4, 0, 0, 0}), b);
  CHECK(stack.pairs(0, 1) == doctest::Approx(0.0));
  CHECK(stack.pairs(0, 2) == doctest::Approx(0.0));

  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::VectorXcd psi = random_state(b.dim(), rng);
    const CorrelationReport r = density_correlations(psi, b);
    CHECK(std::abs(r.pairs.sum() - 16.0) < 1e-10);  // sum rule <N^2> = N^2
    CHECK((r.pairs - r.pairs.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("variance vanishes exactly on occupation eigenstates and only there") {
  const AtomBasis b = AtomBasis::enumerate(3, 2);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    const SiteStatistics s = site_statistics(basis_state(b, b.state(i)), b, 2);
    CHECK(s.variance_n == doctest::Approx(0.0));
  }
  Eigen::VectorXcd mix = Eigen::VectorXcd::Zero(b.dim());
  mix(b.index_of({2, 0, 0})) = std::sqrt(0.5);
  mix(b.index_of({0, 2, 0})) = std::sqrt(0.5);
  CHECK(site_statistics(mix, b, 2).variance_n > 0.1);
}

TEST_CASE("effective depth from coupled states") {
  ModelParams p;
  p.u0 = -1.0;
  p.delta_c = -3.0;
  p.v_cl = -1.5;
  p.n_atoms = 2;
  p.n_sites = 2;
  const CoupledBasis basis{AtomBasis::enumerate(2, 2), PhotonBasis{40}};

  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(basis.dim());
  vac(basis.index(0, 0)) = 1.0;
  CHECK(effective_depth(vac, basis, p) == doctest::Approx(p.v_cl));

  // truncated coherent state with |alpha|^2 = 4
  Eigen::VectorXcd coh = Eigen::VectorXcd::Zero(basis.dim());
  double amp = std::exp(-2.0);  // e^{-|alpha|^2/2}
  for (int n = 0; n <= basis.photons.n_max; ++n) {
    coh(basis.index(1, n)) = amp;
    amp *= 2.0 / std::sqrt(double(n + 1));
  }
  coh.normalize();
  ModelParams pc = p;
  pc.v_cl = 0.0;
  CHECK(effective_depth(coh, basis, pc) == doctest::Approx(-4.0).epsilon(1e-8));

  const AtomBasis atoms = AtomBasis::enumerate(2, 2);
  Eigen::VectorXcd atom_state = Eigen::VectorXcd::Zero(atoms.dim());
  atom_state(0) = 1.0;
  CHECK_THROWS_AS(effective_depth(atom_state, basis, p), std::invalid_argument);
}

TEST_CASE("state-based depth tracks the scalar steady-state prediction") {
  ModelParams p;
  p.u0 = -0.6;
  p.delta_c = -3.5;
  p.eta = 2.0;
  p.v_cl = -4.0;
  p.a_s = 0.1;
  p.n_atoms = 2;
  p.n_sites = 2;
  const SelfConsistentResult r = self_consistent_depth(p, HamiltonianMode::ExactElimination);
  // agreement to O(J): the hop element is ~2% of j0 here
  CHECK(std::abs(r.ground.v_eff - r.v_eff) < 0.05);
}

TEST_CASE("photon-conditioned statistics") {
  const CoupledBasis basis{AtomBasis::enumerate(2, 2), PhotonBasis{5}};

  SUBCASE("product state reduces to a single unconditioned entry") {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.dim());
    const std::size_t a1 = basis.atoms.index_of({1, 1});
    const std::size_t a2 = basis.atoms.index_of({2, 0});
    psi(basis.index(a1, 0)) = std::sqrt(0.7);
    psi(basis.index(a2, 0)) = std::sqrt(0.3);
    const auto cond = photon_conditioned_statistics(psi, basis, 1);
    REQUIRE(cond.size() == 1);
    CHECK(cond.count(0) == 1);
    CHECK(cond.at(0).probability == doctest::Approx(1.0));
    CHECK(cond.at(0).stats.p_occupation(1) == doctest::Approx(0.7));
    CHECK(cond.at(0).stats.p_occupation(2) == doctest::Approx(0.3));
  }

  SUBCASE("probabilities sum to one and tiny sectors are dropped") {
    std::mt19937 rng(3);
    Eigen::VectorXcd psi(basis.dim());
    std::normal_distribution<double> g;
    for (auto& x : psi.reshaped()) x = cplx(g(rng), g(rng));
    psi.normalize();
    const auto cond = photon_conditioned_statistics(psi, basis, 2);
    double total = 0;
    for (const auto& [n, pc] : cond) total += pc.probability;
    CHECK(std::abs(total - 1.0) < 1e-10);

    Eigen::VectorXcd sparse = Eigen::VectorXcd::Zero(basis.dim());
    sparse(basis.index(0, 0)) = 1.0;
    sparse(basis.index(0, 3)) = 1e-8;  // probability 1e-16, below the cutoff
    sparse.normalize();
    CHECK(photon_conditioned_statistics(sparse, basis, 1).count(3) == 0);
  }

  SUBCASE("near the transition, more photons mean a more localized well") {
    // Direction established numerically: for u0 < 0 the (nbar+1)-photon
    // conditional state sees the deeper lattice and has the smaller variance.
    ModelParams p;
    p.u0 = -0.5;
    p.delta_c = -3.0;
    p.eta = 2.0;
    p.v_cl = -4.0;
    p.a_s = 0.6;
    p.n_atoms = 2;
    p.n_sites = 2;
    const SelfConsistentResult r = self_consistent_depth(p, HamiltonianMode::Coupled);
    REQUIRE(r.coupled_basis);
    const auto cond = photon_conditioned_statistics(r.ground.state, *r.coupled_basis, 2);
    const int nbar = static_cast<int>(std::lround(*r.ground.photon_mean));
    REQUIRE(cond.count(nbar - 1) == 1);
    REQUIRE(cond.count(nbar + 1) == 1);
    CHECK(cond.at(nbar + 1).stats.variance_n < cond.at(nbar - 1).stats.variance_n);
  }
}
