#include "cavbh/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cavbh {

namespace {

constexpr double kPi = std::numbers::pi;

double trapezoid(const Eigen::ArrayXd& f, double h) {
  const auto n = f.size();
  double s = f.segment(1, n - 2).sum();
  return h * (s + 0.5 * (f(0) + f(n - 1)));
}

/// Integral of a(x) * b(x - periods) on the common grid; b is the same sampled
/// function shifted right by an integer number of periods. Trapezoid over the
/// subrange where both samples exist; the dropped tails are below 1e-12 of the
/// result for the window in use.
double shifted_overlap(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                       const Eigen::ArrayXd& weight, int shift, double h) {
  const auto n = a.size();
  double s = 0.0;
  for (Eigen::Index i = shift; i < n; ++i) {
    const double f = a(i) * b(i - shift) * weight(i);
    s += (i == shift || i == n - 1) ? 0.5 * f : f;
  }
  return h * s;
}

}  // namespace

BlochSpectrum solve_bloch_band(const LatticeDepthSpec& spec) {
  spec.validate();
  const int npw = spec.n_planewaves;
  const int half = (npw - 1) / 2;
  const double v = spec.v_depth;
  const double xc = v > 0 ? 0.5 : 0.0;

  BlochSpectrum out;
  out.v_depth = v;
  out.well_center = xc;
  out.n_planewaves = npw;
  out.n_grid = spec.n_grid;
  out.quasimomenta.resize(spec.n_q);
  out.band_energy.resize(spec.n_q);
  out.coefficients.resize(npw, spec.n_q);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(npw, npw);
  for (int jq = 0; jq < spec.n_q; ++jq) {
    const double q = -1.0 + 2.0 * jq / spec.n_q;
    for (int i = 0; i < npw; ++i) {
      const double g = q + 2.0 * (i - half);
      h(i, i) = g * g + 0.5 * v;
      if (i + 1 < npw) h(i, i + 1) = h(i + 1, i) = 0.25 * v;
    }
    // Hermitian by construction; keep the assertion cheap and exact.
    if ((h - h.transpose()).cwiseAbs().maxCoeff() != 0.0)
      throw std::logic_error("plane-wave Hamiltonian lost its symmetry");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "band diagonalization failed at q = " << q;
      throw NumericalError(msg.str());
    }
    Eigen::VectorXd c = es.eigenvectors().col(0);

    // Kohn gauge: u_q at the well center real and positive. With real
    // coefficients u_q(xc) = sum_m c_m exp(i 2 pi m xc) is real for xc in
    // {0, 1/2}.
    double s = 0.0;
    for (int i = 0; i < npw; ++i) {
      const int m = i - half;
      s += c(i) * ((xc == 0.0) ? 1.0 : (m % 2 == 0 ? 1.0 : -1.0));
    }
    if (std::abs(s) < 1e-8) {
      std::ostringstream msg;
      msg << "phase fixing failed (degenerate band point) at q = " << q;
      throw NumericalError(msg.str());
    }
    if (s < 0) c = -c;

    out.quasimomenta(jq) = q;
    out.band_energy(jq) = es.eigenvalues()(0);
    out.coefficients.col(jq) = c / c.norm();
  }
  return out;
}

WannierFunction build_wannier(const BlochSpectrum& spectrum, int center_site) {
  const int nq = static_cast<int>(spectrum.quasimomenta.size());
  const int npw = spectrum.n_planewaves;
  const int half = (npw - 1) / 2;
  const int ppp = spectrum.n_grid;       // points per period
  const int span = 4;                    // periods on each side, >= 5 total
  const int npts = 2 * span * ppp + 1;
  const double hstep = 1.0 / ppp;
  const double x0 = spectrum.well_center + center_site - span;

  WannierFunction w;
  w.center_site = center_site;
  w.center_position = spectrum.well_center + center_site;
  w.points_per_period = ppp;
  w.v_depth = spectrum.v_depth;
  w.grid.resize(npts);
  for (int t = 0; t < npts; ++t) w.grid(t) = x0 + t * hstep;

  // Plane-wave phasors exp(i 2 pi m x_t), shared by all q.
  Eigen::MatrixXcd pw(npts, npw);
  for (int t = 0; t < npts; ++t) {
    const cplx b = std::polar(1.0, 2.0 * kPi * w.grid(t));
    cplx acc = std::pow(b, -half);
    for (int i = 0; i < npw; ++i) {
      pw(t, i) = acc;
      acc *= b;
    }
  }

  Eigen::VectorXcd val = Eigen::VectorXcd::Zero(npts);
  Eigen::VectorXcd der = Eigen::VectorXcd::Zero(npts);
  Eigen::VectorXcd der2 = Eigen::VectorXcd::Zero(npts);
  const double xn = w.center_position;
  for (int jq = 0; jq < nq; ++jq) {
    const double q = spectrum.quasimomenta(jq);
    for (int t = 0; t < npts; ++t) {
      const cplx bloch_phase = std::polar(1.0, kPi * q * (w.grid(t) - xn));
      cplx u = 0.0, du = 0.0, ddu = 0.0;
      for (int i = 0; i < npw; ++i) {
        const cplx term = spectrum.coefficients(i, jq) * pw(t, i);
        const double g = kPi * (q + 2.0 * (i - half));
        u += term;
        du += term * cplx(0.0, g);
        ddu -= term * g * g;
      }
      val(t) += bloch_phase * u;
      der(t) += bloch_phase * du;
      der2(t) += bloch_phase * ddu;
    }
  }
  const double qnorm = std::sqrt(static_cast<double>(nq));
  val /= qnorm;
  der /= qnorm;
  der2 /= qnorm;

  const double imag_max = val.imag().cwiseAbs().maxCoeff();
  const double real_max = val.real().cwiseAbs().maxCoeff();
  if (imag_max > 1e-9 * real_max) {
    std::ostringstream msg;
    msg << "Wannier function failed to come out real (max imag " << imag_max << ")";
    throw NumericalError(msg.str());
  }
  w.values = val.real();
  w.derivative = der.real();
  w.second_derivative = der2.real();

  // The discrete q-sum normalizes over an n_q-period supercell; renormalize on
  // the stored window.
  const double norm = trapezoid(w.values.array().square(), hstep);
  const double scale = 1.0 / std::sqrt(norm);
  w.values *= scale;
  w.derivative *= scale;
  w.second_derivative *= scale;
  return w;
}

MatrixElements compute_matrix_elements(const WannierFunction& w, double g1d) {
  if (g1d < 0) throw std::invalid_argument("g1d must be >= 0");
  const double h = 1.0 / w.points_per_period;
  const int shift = w.points_per_period;
  const Eigen::ArrayXd val = w.values.array();
  const Eigen::ArrayXd der = w.derivative.array();
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(val.size());
  Eigen::ArrayXd cos2(val.size()), cos1(val.size());
  for (Eigen::Index i = 0; i < val.size(); ++i) {
    const double c = std::cos(kPi * w.grid(i));
    cos1(i) = c;
    cos2(i) = c * c;
  }

  const double inv_pi2 = 1.0 / (kPi * kPi);
  MatrixElements me;
  me.v_depth = w.v_depth;
  me.e0 = inv_pi2 * trapezoid(der.square(), h);
  me.e1 = inv_pi2 * shifted_overlap(der, der, ones, shift, h);
  me.e2 = inv_pi2 * shifted_overlap(der, der, ones, 2 * shift, h);
  me.j0 = trapezoid(val.square() * cos2, h);
  me.j1 = shifted_overlap(val, val, cos2, shift, h);
  me.j2 = shifted_overlap(val, val, cos2, 2 * shift, h);
  me.jt0 = trapezoid(val.square() * cos1, h);
  me.jt1 = shifted_overlap(val, val, cos1, shift, h);
  me.u_onsite = g1d * trapezoid(val.square().square(), h);
  return me;
}

MatrixElements matrix_elements_at_depth(double v_depth, double g1d,
                                        const LatticeDepthSpec& numerics) {
  LatticeDepthSpec spec = numerics.at_depth(v_depth);
  const BlochSpectrum bands = solve_bloch_band(spec);
  const WannierFunction w = build_wannier(bands, 0);
  MatrixElements me = compute_matrix_elements(w, g1d);
  me.v_depth = v_depth;
  const double nn = std::abs(me.net_hopping(v_depth));
  const double nnn = std::abs(me.e2 + me.j2 * v_depth);
  if (nn > 0 && nnn > 0.1 * nn) {
    std::ostringstream msg;
    msg << "next-nearest hopping " << nnn << " exceeds 10% of nearest " << nn
        << " at depth " << v_depth << " E_R; outside the model's validity range";
    me.warning = msg.str();
  }
  return me;
}

}  // namespace cavbh
