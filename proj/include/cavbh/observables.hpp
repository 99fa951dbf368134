#pragma once

#include <map>

#include "cavbh/hamiltonian.hpp"

namespace cavbh {

/// Occupation statistics of one well.
struct SiteStatistics {
  int site = 0;                   // 1-based
  Eigen::VectorXd p_occupation;   // p_0 .. p_N
  double mean_n = 0.0;
  double variance_n = 0.0;
};

/// All pair expectations <n_i n_j> plus the Fig.-style nearest vs
/// next-nearest difference <n_1 n_3> - <n_1 n_2> (NaN when M < 3).
struct CorrelationReport {
  Eigen::MatrixXd pairs;  // (i-1, j-1) -> <n_i n_j>
  double difference_13_12 = 0.0;
};

SiteStatistics site_statistics(const Eigen::VectorXcd& state, const AtomBasis& basis,
                               int site);
SiteStatistics site_statistics(const Eigen::VectorXcd& state, const CoupledBasis& basis,
                               int site);

CorrelationReport density_correlations(const Eigen::VectorXcd& state,
                                       const AtomBasis& basis);
CorrelationReport density_correlations(const Eigen::VectorXcd& state,
                                       const CoupledBasis& basis);

/// Closed-form two-well splitting: 2 [E + J(V_cl - cavity correction)].
double energy_gap_two_well(const ModelParams& p, const MatrixElements& me);

/// V_cl + hbar U0 <a^dag a> in E_R, from a coupled-space state.
double effective_depth(const Eigen::VectorXcd& state, const CoupledBasis& basis,
                       const ModelParams& p);

struct PhotonConditioned {
  double probability = 0.0;
  SiteStatistics stats;
};

/// P(n) and the site statistics of the renormalized conditional atomic state,
/// for every photon number with probability above 1e-12.
std::map<int, PhotonConditioned> photon_conditioned_statistics(
    const Eigen::VectorXcd& state, const CoupledBasis& basis, int site);

}  // namespace cavbh
