#include "cavbh/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace cavbh {

void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index pivot = 0;
  if (std::abs(v(0)) < 1e-8) {
    v.cwiseAbs().maxCoeff(&pivot);
  }
  const cplx a = v(pivot);
  if (std::abs(a) == 0.0) return;
  v *= std::conj(a) / std::abs(a);
}

namespace {

GroundStateResult dense_lowest(const OperatorMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
  if (es.info() != Eigen::Success)
    throw NumericalError("dense eigensolver failed to converge");

  GroundStateResult r;
  r.energy = es.eigenvalues()(0);
  // Tie-break degenerate ground levels toward the largest weight on the
  // lexicographically first basis state.
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::Index best = 0;
  double best_w = std::abs(es.eigenvectors()(0, 0));
  for (Eigen::Index i = 1; i < h.dim(); ++i) {
    if (es.eigenvalues()(i) - r.energy > 1e-10 * scale) break;
    const double w = std::abs(es.eigenvectors()(0, i));
    if (w > best_w + 1e-12) {
      best_w = w;
      best = i;
    }
  }
  r.state = es.eigenvectors().col(best);
  fix_phase(r.state);
  r.converged = true;
  return r;
}

}  // namespace

GroundStateResult lanczos_lowest(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
    Eigen::Index dim, const GroundStateOptions& opts) {
  const int m = static_cast<int>(std::min<Eigen::Index>(opts.max_subspace, dim));

  // Deterministic start vector with weight everywhere.
  Eigen::VectorXcd v0(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    v0(i) = cplx(1.0 + 1e-3 * std::sin(0.7 * double(i + 1)),
                 1e-3 * std::cos(1.3 * double(i + 1)));
  v0.normalize();

  GroundStateResult result;
  Eigen::MatrixXcd basis(dim, m);
  double last_residual = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    basis.col(0) = v0;
    int built = 0;

    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd w = apply(basis.col(j));
      alpha(j) = std::real(basis.col(j).dot(w));
      w -= alpha(j) * basis.col(j);
      if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
      // Full reorthogonalization, twice for stability.
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
      built = j + 1;
      const double nrm = w.norm();
      if (j + 1 < m) {
        if (nrm < 1e-14) break;  // invariant subspace found
        beta(j) = nrm;
        basis.col(j + 1) = w / nrm;
      }
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
    for (int i = 0; i < built; ++i) {
      tri(i, i) = alpha(i);
      if (i + 1 < built) tri(i, i + 1) = tri(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    if (es.info() != Eigen::Success)
      throw NumericalError("Lanczos tridiagonal eigensolve failed");

    Eigen::VectorXcd ritz = basis.leftCols(built) * es.eigenvectors().col(0).cast<cplx>();
    ritz.normalize();
    const double theta = es.eigenvalues()(0);
    const double residual = (apply(ritz) - theta * ritz).norm();
    result.energy = theta;
    result.state = ritz;
    last_residual = residual;
    if (residual < opts.tol) {
      result.converged = true;
      fix_phase(result.state);
      return result;
    }
    v0 = ritz;  // thick restart from the best Ritz vector
  }

  std::ostringstream msg;
  msg << "Lanczos did not reach tolerance " << opts.tol << " after "
      << opts.max_restarts << " restarts (residual " << last_residual << ")";
  throw NumericalError(msg.str());
}

GroundStateResult ground_state(const OperatorMatrix& h, const GroundStateOptions& opts) {
  h.assert_hermitian(1e-10);
  if (!h.hermitian())
    throw std::invalid_argument("ground_state requires a hermitian operator");
  const bool use_dense = opts.method == GroundStateOptions::Method::Dense ||
                         (opts.method == GroundStateOptions::Method::Auto &&
                          h.dim() < opts.dense_limit);
  if (use_dense) return dense_lowest(h);
  return lanczos_lowest([&h](const Eigen::VectorXcd& v) { return h.apply(v); },
                        h.dim(), opts);
}

}  // namespace cavbh
