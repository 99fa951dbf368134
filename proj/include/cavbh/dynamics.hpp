#pragma once

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "cavbh/hamiltonian.hpp"

namespace cavbh {

/// Interaction quench protocol: evolve with a_s_final after preparing the
/// ground state at a_s_initial. Times in 1/kappa.
struct QuenchSpec {
  double a_s_initial = 0.0;
  double a_s_final = 3.0;
  double t_final = 100.0;
  double dt = 1e-3;
  int recompute_cadence = 1;  // 1: per-evaluation matrix elements; k: frozen for k steps
  int record_stride = 10;     // observable row every this many steps
  int snapshot_stride = 0;    // full state every this many steps; 0 = endpoints only

  void validate() const {
    if (dt <= 0) throw std::invalid_argument("dt must be > 0");
    if (t_final <= 0) throw std::invalid_argument("t_final must be > 0");
    if (recompute_cadence < 1)
      throw std::invalid_argument("recompute_cadence must be >= 1");
  }
};

enum class RecomputePolicy {
  Cached,  // depth grid with linear interpolation (default)
  Exact,   // full band + Wannier solve at every evaluation
};

/// Matrix elements on a lazily filled depth grid with linear interpolation.
/// Grid spacing 0.01 E_R keeps the interpolation error far below the
/// integrator error. Safe to share across threads.
class DepthCache {
 public:
  DepthCache(double g1d, LatticeDepthSpec numerics, double step = 0.01)
      : g1d_(g1d), step_(step), numerics_(numerics) {}

  MatrixElements at(double v) const;

 private:
  const MatrixElements& node(long long k) const;

  double g1d_;
  double step_;
  LatticeDepthSpec numerics_;
  mutable std::map<long long, MatrixElements> nodes_;
  mutable std::mutex mutex_;
};

/// Precomputed fixed-basis operators for the semiclassical equations.
struct SemiclassicalOperators {
  AtomBasis basis;
  OperatorMatrix hop;
  Eigen::VectorXd interaction_diag;  // sum_k n_k(n_k-1) per basis state

  static SemiclassicalOperators build(const ModelParams& p);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<cplx> alpha;
  std::vector<double> v_eff;
  std::vector<double> norm;
  std::vector<double> b_expect;
  std::vector<Eigen::VectorXd> mean_n;  // per site
  std::vector<Eigen::VectorXd> var_n;   // per site
  std::vector<double> snapshot_times;
  std::vector<Eigen::VectorXcd> state_snapshots;
  std::vector<std::pair<double, std::string>> warnings;
};

struct Derivatives {
  cplx dalpha;
  Eigen::VectorXcd dpsi;
};

/// One evaluation of the coupled mean-field equations:
///   dalpha = [i(delta_c - u0 <J0 N + J B>) - kappa] alpha + eta
///   dpsi   = -(i/hbar) [ (E + J(V_cl + hbar u0 |alpha|^2)) B + (U/2) sum n(n-1) ] psi
/// with the interaction diagonal centered (a pure global phase) to keep the
/// integrator's norm drift down.
Derivatives rhs(cplx alpha, const Eigen::VectorXcd& psi, const ModelParams& p,
                const MatrixElements& me, const SemiclassicalOperators& ops);

/// Classical RK4 on the joint (alpha, psi) system. psi is renormalized only
/// for reporting, never inside a step; drift beyond 1e-6 aborts.
Trajectory evolve(const Eigen::VectorXcd& psi0, cplx alpha0, const ModelParams& p,
                  const QuenchSpec& quench,
                  RecomputePolicy policy = RecomputePolicy::Cached,
                  const LatticeDepthSpec& numerics = {});

/// Ground state of the semiclassical atomic Hamiltonian at the joint
/// atom-field fixed point. The matrix-element policy must match the one the
/// trajectory will run with, or the returned pair is a fixed point of a
/// slightly different flow.
std::pair<Eigen::VectorXcd, cplx> prepare_quench_initial(
    const ModelParams& p, double a_s_initial = 0.0,
    const LatticeDepthSpec& numerics = {},
    RecomputePolicy policy = RecomputePolicy::Cached);

/// Least-squares line through (times, values).
std::pair<double, double> linear_fit(const std::vector<double>& times,
                                     const std::vector<double>& values);

}  // namespace cavbh
