#pragma once

#include <Eigen/Dense>
#include <functional>

#include "cavbh/operator_matrix.hpp"

namespace cavbh {

struct GroundStateResult {
  double energy = 0.0;
  Eigen::VectorXcd state;
  bool converged = false;
  std::optional<double> photon_mean;  // filled for coupled-space solves
  double v_eff = 0.0;                 // filled by the self-consistent pipeline
};

struct GroundStateOptions {
  enum class Method { Auto, Dense, Lanczos };
  Method method = Method::Auto;
  Eigen::Index dense_limit = 2000;  // dense solver below, Lanczos above
  double tol = 1e-10;               // residual ||H psi - E psi||
  int max_subspace = 250;           // Krylov vectors per restart cycle
  int max_restarts = 60;
};

/// Lowest eigenpair of a Hermitian operator given only its action. Lanczos with
/// full reorthogonalization and thick restart on the best Ritz vector.
GroundStateResult lanczos_lowest(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
    Eigen::Index dim, const GroundStateOptions& opts = {});

/// Lowest eigenpair; dense below opts.dense_limit, Lanczos above. Degenerate
/// levels tie-break toward the eigenvector with the largest weight on the
/// first basis state, phase-fixed to make that amplitude real positive.
GroundStateResult ground_state(const OperatorMatrix& h,
                               const GroundStateOptions& opts = {});

/// Fixes the global phase of an eigenvector: the largest-magnitude amplitude
/// (or the first-basis-state amplitude, when non-negligible) made real > 0.
void fix_phase(Eigen::VectorXcd& v);

}  // namespace cavbh
