#include "cavbh/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "cavbh/observables.hpp"

namespace cavbh {

const MatrixElements& DepthCache::node(long long k) const {
  auto it = nodes_.find(k);
  if (it == nodes_.end()) {
    MatrixElements me = matrix_elements_at_depth(k * step_, g1d_, numerics_);
    it = nodes_.emplace(k, std::move(me)).first;
  }
  return it->second;
}

MatrixElements DepthCache::at(double v) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const double x = v / step_;
  const long long k0 = static_cast<long long>(std::floor(x));
  const double t = x - k0;
  const MatrixElements& a = node(k0);
  if (t == 0.0) return a;
  const MatrixElements& b = node(k0 + 1);
  MatrixElements me;
  auto lerp = [t](double u, double w) { return (1.0 - t) * u + t * w; };
  me.e0 = lerp(a.e0, b.e0);
  me.e1 = lerp(a.e1, b.e1);
  me.e2 = lerp(a.e2, b.e2);
  me.j0 = lerp(a.j0, b.j0);
  me.j1 = lerp(a.j1, b.j1);
  me.j2 = lerp(a.j2, b.j2);
  me.jt0 = lerp(a.jt0, b.jt0);
  me.jt1 = lerp(a.jt1, b.jt1);
  me.u_onsite = lerp(a.u_onsite, b.u_onsite);
  me.v_depth = v;
  return me;
}

SemiclassicalOperators SemiclassicalOperators::build(const ModelParams& p) {
  SemiclassicalOperators ops{AtomBasis::enumerate(p.n_sites, p.n_atoms), {}, {}};
  ops.hop = hop_operator(ops.basis, p.boundary);
  ops.interaction_diag.resize(ops.basis.dim());
  for (std::size_t i = 0; i < ops.basis.dim(); ++i) {
    double s = 0;
    for (int n : ops.basis.state(i)) s += double(n) * double(n - 1);
    ops.interaction_diag(i) = s;
  }
  return ops;
}

Derivatives rhs(cplx alpha, const Eigen::VectorXcd& psi, const ModelParams& p,
                const MatrixElements& me, const SemiclassicalOperators& ops) {
  const double kr = p.kappa_in_recoils;
  const Eigen::VectorXcd hop_psi = ops.hop.apply(psi);
  const double b_mean = std::real(psi.dot(hop_psi));

  Derivatives d;
  d.dalpha = (cplx(0.0, 1.0) * (p.delta_c - p.u0 * (me.j0 * p.n_atoms + me.j1 * b_mean)) -
              p.kappa) * alpha + p.eta;

  const double hopping = me.e1 + me.j1 * (p.v_cl + p.u0 * kr * std::norm(alpha));
  const double u_half = 0.5 * me.u_onsite;
  const double center = u_half * ops.interaction_diag.mean();
  Eigen::VectorXcd h_psi = hopping * hop_psi;
  h_psi.array() += (u_half * ops.interaction_diag.array() - center).cast<cplx>() *
                   psi.array();
  d.dpsi = cplx(0.0, -1.0 / kr) * h_psi;
  return d;
}

Trajectory evolve(const Eigen::VectorXcd& psi0, cplx alpha0, const ModelParams& p,
                  const QuenchSpec& quench, RecomputePolicy policy,
                  const LatticeDepthSpec& numerics) {
  p.validate();
  quench.validate();
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-8)
    throw std::invalid_argument("psi0 is not normalized");

  const double g1d_final = quench.a_s_final;
  const SemiclassicalOperators ops = SemiclassicalOperators::build(p);
  const DepthCache cache(g1d_final, numerics);

  auto depth_of = [&](cplx a) {
    return p.v_cl + p.u0 * p.kappa_in_recoils * std::norm(a);
  };
  auto elements_at = [&](double v) {
    return policy == RecomputePolicy::Cached
               ? cache.at(v)
               : matrix_elements_at_depth(v, g1d_final, numerics);
  };

  const int n_steps = static_cast<int>(std::llround(quench.t_final / quench.dt));
  Trajectory traj;

  MatrixElements frozen = elements_at(depth_of(alpha0));
  auto eval = [&](cplx a, const Eigen::VectorXcd& psi) {
    if (quench.recompute_cadence == 1) {
      const MatrixElements me = elements_at(depth_of(a));
      return rhs(a, psi, p, me, ops);
    }
    return rhs(a, psi, p, frozen, ops);
  };

  Eigen::VectorXcd psi = psi0;
  cplx alpha = alpha0;
  bool shallow = false;

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.alpha.push_back(alpha);
    traj.v_eff.push_back(depth_of(alpha));
    const double nrm = psi.norm();
    traj.norm.push_back(nrm);
    Eigen::VectorXcd unit = psi / nrm;
    traj.b_expect.push_back(std::real(unit.dot(ops.hop.apply(unit))));
    Eigen::VectorXd mean(p.n_sites), var(p.n_sites);
    for (int s = 1; s <= p.n_sites; ++s) {
      const SiteStatistics st = site_statistics(unit, ops.basis, s);
      mean(s - 1) = st.mean_n;
      var(s - 1) = st.variance_n;
    }
    traj.mean_n.push_back(std::move(mean));
    traj.var_n.push_back(std::move(var));
  };

  record(0.0);
  traj.snapshot_times.push_back(0.0);
  traj.state_snapshots.push_back(psi);

  for (int step = 0; step < n_steps; ++step) {
    if (quench.recompute_cadence > 1 && step % quench.recompute_cadence == 0)
      frozen = elements_at(depth_of(alpha));

    const double h = quench.dt;
    const Derivatives k1 = eval(alpha, psi);
    const Derivatives k2 = eval(alpha + 0.5 * h * k1.dalpha,
                                psi + (0.5 * h) * k1.dpsi);
    const Derivatives k3 = eval(alpha + 0.5 * h * k2.dalpha,
                                psi + (0.5 * h) * k2.dpsi);
    const Derivatives k4 = eval(alpha + h * k3.dalpha, psi + h * k3.dpsi);
    alpha += (h / 6.0) * (k1.dalpha + 2.0 * k2.dalpha + 2.0 * k3.dalpha + k4.dalpha);
    psi += (h / 6.0) * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);

    const double t = (step + 1) * h;
    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > 1e-6) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " at t = " << t
          << " exceeds 1e-6; reduce dt (currently " << quench.dt << ")";
      throw NumericalError(msg.str());
    }

    const double v_now = depth_of(alpha);
    if (!shallow && std::abs(v_now) < 2.0) {
      shallow = true;
      traj.warnings.emplace_back(
          t, "effective depth entered the shallow-lattice regime (|V_eff| < 2 E_R); "
             "the single-band model is unreliable here");
    } else if (shallow && std::abs(v_now) >= 2.0) {
      shallow = false;
    }

    const bool last = step + 1 == n_steps;
    if ((step + 1) % quench.record_stride == 0 || last) record(t);
    if ((quench.snapshot_stride > 0 && (step + 1) % quench.snapshot_stride == 0) || last) {
      traj.snapshot_times.push_back(t);
      traj.state_snapshots.push_back(psi);
    }
  }
  return traj;
}

std::pair<Eigen::VectorXcd, cplx> prepare_quench_initial(const ModelParams& p,
                                                         double a_s_initial,
                                                         const LatticeDepthSpec& numerics,
                                                         RecomputePolicy policy) {
  ModelParams prep = p;
  prep.a_s = a_s_initial;
  const SemiclassicalOperators ops = SemiclassicalOperators::build(prep);
  const DepthCache cache(prep.g1d(), numerics);
  auto elements_at = [&](double v) {
    return policy == RecomputePolicy::Cached
               ? cache.at(v)
               : matrix_elements_at_depth(v, prep.g1d(), numerics);
  };

  // Seed with the scalar fixed point, then iterate the joint (alpha, psi)
  // consistency including the <B> feedback.
  SelfConsistentOptions sc;
  sc.numerics = numerics;
  SelfConsistentResult seed =
      self_consistent_depth(prep, HamiltonianMode::Effective, sc);
  cplx alpha = seed.field.alpha0;
  Eigen::VectorXcd psi;

  for (int it = 0; it < 500; ++it) {
    const double v = prep.v_cl + prep.u0 * prep.kappa_in_recoils * std::norm(alpha);
    const MatrixElements me = elements_at(v);
    const double hopping = me.e1 + me.j1 * v;
    OperatorMatrix h = cplx(hopping) * ops.hop;
    h += cplx(0.5 * me.u_onsite) * interaction_operator(ops.basis);
    OperatorMatrix hermit(h.to_dense(), ops.basis.tag(), true);
    psi = ground_state(hermit).state;
    const double b_mean = std::real(psi.dot(ops.hop.apply(psi)));
    const cplx alpha_next =
        prep.eta / cplx(prep.kappa,
                        -(prep.delta_c - prep.u0 * (me.j0 * prep.n_atoms + me.j1 * b_mean)));
    if (std::abs(alpha_next - alpha) < 1e-13) {
      alpha = alpha_next;
      break;
    }
    alpha += 0.6 * (alpha_next - alpha);
    if (it == 499)
      throw NumericalError("joint atom-field fixed point did not converge");
  }
  return {psi, alpha};
}

std::pair<double, double> linear_fit(const std::vector<double>& times,
                                     const std::vector<double>& values) {
  if (times.size() < 2 || times.size() != values.size())
    throw std::invalid_argument("linear_fit needs >= 2 matching samples");
  const double n = double(times.size());
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    st += times[i];
    sv += values[i];
    stt += times[i] * times[i];
    stv += times[i] * values[i];
  }
  const double denom = n * stt - st * st;
  if (denom <= 0)
    throw std::invalid_argument("degenerate fit: all time samples coincide");
  const double slope = (n * stv - st * sv) / denom;
  const double intercept = (sv - slope * st) / n;
  return {slope, intercept};
}

}  // namespace cavbh
