#include "cavbh/observables.hpp"

#include <cmath>
#include <limits>

namespace cavbh {

namespace {

void check_normalized(const Eigen::VectorXcd& state) {
  if (std::abs(state.squaredNorm() - 1.0) > 1e-8)
    throw std::invalid_argument("state is not normalized");
}

SiteStatistics stats_from_weights(const AtomBasis& basis, int site,
                                  const std::vector<double>& weight_per_atom_state) {
  if (site < 1 || site > basis.n_sites())
    throw std::invalid_argument("site index out of range");
  SiteStatistics s;
  s.site = site;
  s.p_occupation = Eigen::VectorXd::Zero(basis.n_atoms() + 1);
  for (std::size_t i = 0; i < basis.dim(); ++i)
    s.p_occupation(basis.state(i)[site - 1]) += weight_per_atom_state[i];
  for (int n = 0; n <= basis.n_atoms(); ++n) {
    s.mean_n += n * s.p_occupation(n);
    s.variance_n += double(n) * n * s.p_occupation(n);
  }
  s.variance_n -= s.mean_n * s.mean_n;
  return s;
}

std::vector<double> atom_weights(const Eigen::VectorXcd& state, const AtomBasis& basis) {
  std::vector<double> w(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) w[i] = std::norm(state(i));
  return w;
}

std::vector<double> atom_weights(const Eigen::VectorXcd& state, const CoupledBasis& basis) {
  std::vector<double> w(basis.atoms.dim(), 0.0);
  const int dph = basis.photons.dim();
  for (std::size_t i = 0; i < basis.atoms.dim(); ++i)
    for (int n = 0; n < dph; ++n) w[i] += std::norm(state(basis.index(i, n)));
  return w;
}

CorrelationReport correlations_from_weights(const AtomBasis& basis,
                                            const std::vector<double>& weights) {
  const int m = basis.n_sites();
  CorrelationReport r;
  r.pairs = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto& occ = basis.state(s);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        r.pairs(i, j) += weights[s] * occ[i] * occ[j];
  }
  r.difference_13_12 = m >= 3 ? r.pairs(0, 2) - r.pairs(0, 1)
                              : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace

SiteStatistics site_statistics(const Eigen::VectorXcd& state, const AtomBasis& basis,
                               int site) {
  check_normalized(state);
  if (state.size() != static_cast<Eigen::Index>(basis.dim()))
    throw std::invalid_argument("state dimension does not match basis");
  return stats_from_weights(basis, site, atom_weights(state, basis));
}

SiteStatistics site_statistics(const Eigen::VectorXcd& state, const CoupledBasis& basis,
                               int site) {
  check_normalized(state);
  if (state.size() != static_cast<Eigen::Index>(basis.dim()))
    throw std::invalid_argument("state dimension does not match basis");
  return stats_from_weights(basis.atoms, site, atom_weights(state, basis));
}

CorrelationReport density_correlations(const Eigen::VectorXcd& state,
                                       const AtomBasis& basis) {
  check_normalized(state);
  return correlations_from_weights(basis, atom_weights(state, basis));
}

CorrelationReport density_correlations(const Eigen::VectorXcd& state,
                                       const CoupledBasis& basis) {
  check_normalized(state);
  return correlations_from_weights(basis.atoms, atom_weights(state, basis));
}

double energy_gap_two_well(const ModelParams& p, const MatrixElements& me) {
  return 2.0 * effective_hopping_coefficient(p, me);
}

double effective_depth(const Eigen::VectorXcd& state, const CoupledBasis& basis,
                       const ModelParams& p) {
  check_normalized(state);
  if (state.size() != static_cast<Eigen::Index>(basis.dim()))
    throw std::invalid_argument(
        "effective_depth needs a coupled-basis state; atom-only states carry no "
        "field information");
  double nph = 0.0;
  for (std::size_t i = 0; i < basis.atoms.dim(); ++i)
    for (int n = 0; n < basis.photons.dim(); ++n)
      nph += n * std::norm(state(basis.index(i, n)));
  return p.v_cl + p.u0 * p.kappa_in_recoils * nph;
}

std::map<int, PhotonConditioned> photon_conditioned_statistics(
    const Eigen::VectorXcd& state, const CoupledBasis& basis, int site) {
  check_normalized(state);
  std::map<int, PhotonConditioned> out;
  for (int n = 0; n < basis.photons.dim(); ++n) {
    std::vector<double> w(basis.atoms.dim());
    double prob = 0.0;
    for (std::size_t i = 0; i < basis.atoms.dim(); ++i) {
      w[i] = std::norm(state(basis.index(i, n)));
      prob += w[i];
    }
    if (prob < 1e-12) continue;
    for (double& x : w) x /= prob;
    PhotonConditioned pc;
    pc.probability = prob;
    pc.stats = stats_from_weights(basis.atoms, site, w);
    out.emplace(n, std::move(pc));
  }
  return out;
}

}  // namespace cavbh
