#include "cavbh/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace cavbh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_jobs(const ScenarioConfig& cfg) {
  if (cfg.jobs > 0) return cfg.jobs;
  if (const char* env = std::getenv("SIM_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

/// Runs f(i) for i in [0, n) on up to `jobs` threads; results land by index.
void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

SelfConsistentOptions sc_options(const ScenarioConfig& cfg) {
  SelfConsistentOptions o;
  o.tol = cfg.numerics.self_consistent_tol;
  o.numerics = cfg.numerics.lattice();
  return o;
}

void set_swept(ModelParams& p, const std::string& field, double v) {
  if (field == "u0") p.u0 = v;
  else if (field == "delta_c") p.delta_c = v;
  else if (field == "eta") p.eta = v;
  else if (field == "eta_eff") p.eta_eff = v;
  else if (field == "v_cl") p.v_cl = v;
  else if (field == "a_s") p.a_s = v;
  else if (field == "kappa_in_recoils") p.kappa_in_recoils = v;
  else throw std::invalid_argument("not a sweepable field: " + field);
}

/// tr(rho_atoms M) for a coupled pure state.
double reduced_atom_expectation(const Eigen::VectorXcd& state, const CoupledBasis& basis,
                                const OperatorMatrix& atom_op) {
  const int dph = basis.photons.dim();
  cplx acc = 0.0;
  Eigen::VectorXcd column(basis.atoms.dim());
  for (int n = 0; n < dph; ++n) {
    for (std::size_t i = 0; i < basis.atoms.dim(); ++i)
      column(i) = state(basis.index(i, n));
    acc += column.dot(atom_op.apply(column));
  }
  return std::real(acc);
}

/// <a^dag a> of the ground state by exact inversion and by the expansion,
/// honoring the configured mode for the reference state.
struct ExpansionComparison {
  double n_exact, n_expansion;
};

ExpansionComparison compare_field_routes(const ModelParams& p,
                                         const SelfConsistentResult& sc) {
  const AtomBasis atoms = AtomBasis::enumerate(p.n_sites, p.n_atoms);
  const OperatorMatrix hop = hop_operator(atoms, p.boundary);
  const OperatorMatrix n_ex = photon_number_exact(p, sc.me, hop);
  const OperatorMatrix n_xp = photon_number_expansion(p, sc.me, hop);
  if (sc.coupled_basis) {
    // Entangled reference: exact route reads the physical photon number,
    // the expansion is evaluated on the reduced atomic state.
    return {*sc.ground.photon_mean,
            reduced_atom_expectation(sc.ground.state, *sc.coupled_basis, n_xp)};
  }
  return {std::real(n_ex.expectation(sc.ground.state)),
          std::real(n_xp.expectation(sc.ground.state))};
}

SiteStatistics stats_of(const SelfConsistentResult& sc, const ScenarioConfig& cfg) {
  if (sc.coupled_basis)
    return site_statistics(sc.ground.state, *sc.coupled_basis, cfg.site);
  const AtomBasis atoms =
      AtomBasis::enumerate(cfg.params.n_sites, cfg.params.n_atoms);
  return site_statistics(sc.ground.state, atoms, cfg.site);
}

CorrelationReport correlations_of(const SelfConsistentResult& sc,
                                  const ScenarioConfig& cfg) {
  if (sc.coupled_basis) return density_correlations(sc.ground.state, *sc.coupled_basis);
  const AtomBasis atoms =
      AtomBasis::enumerate(cfg.params.n_sites, cfg.params.n_atoms);
  return density_correlations(sc.ground.state, atoms);
}

/// Classical-field reference: no cavity, the equivalent static lattice.
ModelParams classical_reference(const ScenarioConfig& cfg, double a_s) {
  ModelParams p = cfg.params;
  p.u0 = 0.0;
  p.eta = 0.0;
  p.eta_eff = 0.0;
  p.v_cl = cfg.eta_match_depth ? cfg.target_v_eff : cfg.params.v_cl;
  p.a_s = a_s;
  return p;
}

std::string fmt_val(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return std::string(buf);
}

using RowFn = std::function<std::vector<double>(int)>;

void fill_rows(ResultTable& table, int n_rows, int jobs, const RowFn& compute) {
  table.rows.assign(n_rows, {});
  table.row_errors.assign(n_rows, "");
  const std::size_t width = table.header.size();
  parallel_for(n_rows, jobs, [&](int i) {
    try {
      table.rows[i] = compute(i);
    } catch (const std::exception& e) {
      table.rows[i].assign(width, kNaN);
      table.row_errors[i] = e.what();
    }
  });
}

ResultTable run_fig2(const ScenarioConfig& cfg) {
  const SweepSpec inner = *cfg.sweep;   // delta_c
  const SweepSpec outer = *cfg.sweep2;  // u0
  ResultTable t;
  t.header = {outer.parameter, inner.parameter, "n_exact", "n_expansion",
              "v_eff_exact", "v_eff_expansion", "relative_error"};
  const int n = outer.n_points * inner.n_points;
  fill_rows(t, n, resolve_jobs(cfg), [&](int idx) {
    const int i2 = idx / inner.n_points;
    const int i1 = idx % inner.n_points;
    ModelParams p = cfg.params;
    set_swept(p, outer.parameter, outer.value_at(i2));
    set_swept(p, inner.parameter, inner.value_at(i1));
    p.eta = cfg.resolved_eta(p.delta_c);
    const SelfConsistentResult sc = self_consistent_depth(p, cfg.mode, sc_options(cfg));
    const ExpansionComparison cmp = compare_field_routes(p, sc);
    const double kr = p.kappa_in_recoils;
    const double rel =
        std::abs(cmp.n_expansion - cmp.n_exact) / std::max(cmp.n_exact, 1e-300);
    return std::vector<double>{outer.value_at(i2),
                               inner.value_at(i1),
                               cmp.n_exact,
                               cmp.n_expansion,
                               p.v_cl + p.u0 * kr * cmp.n_exact,
                               p.v_cl + p.u0 * kr * cmp.n_expansion,
                               rel};
  });
  return t;
}

ResultTable run_fig3(const ScenarioConfig& cfg) {
  const SweepSpec sweep = *cfg.sweep;  // delta_c
  ResultTable t;
  t.header = {"delta_c",
              "delta_e_u0_" + fmt_val(cfg.params.u0),
              "v_eff_u0_" + fmt_val(cfg.params.u0),
              "delta_e_u0_" + fmt_val(cfg.u0_second),
              "v_eff_u0_" + fmt_val(cfg.u0_second)};
  fill_rows(t, sweep.n_points, resolve_jobs(cfg), [&](int i) {
    std::vector<double> row{sweep.value_at(i)};
    for (const double u0 : {cfg.params.u0, cfg.u0_second}) {
      ModelParams p = cfg.params;
      p.u0 = u0;
      set_swept(p, sweep.parameter, sweep.value_at(i));
      p.eta = cfg.resolved_eta(p.delta_c);
      const SelfConsistentResult sc =
          self_consistent_depth(p, cfg.mode, sc_options(cfg));
      row.push_back(energy_gap_two_well(p, sc.me));
      row.push_back(sc.v_eff);
    }
    return row;
  });
  return t;
}

ResultTable run_fig4a(const ScenarioConfig& cfg) {
  const SweepSpec sweep = *cfg.sweep;  // a_s
  const int n_occ = cfg.params.n_atoms + 1;
  ResultTable t;
  t.header = {"a_s"};
  for (int k = 0; k < n_occ; ++k) t.header.push_back("quantum_p" + std::to_string(k));
  for (int k = 0; k < n_occ; ++k) t.header.push_back("classical_p" + std::to_string(k));
  const double eta_q = cfg.resolved_eta(cfg.params.delta_c);
  fill_rows(t, sweep.n_points, resolve_jobs(cfg), [&](int i) {
    const double a_s = sweep.value_at(i);
    std::vector<double> row{a_s};
    ModelParams pq = cfg.params;
    pq.a_s = a_s;
    pq.eta = eta_q;
    const SelfConsistentResult sq = self_consistent_depth(pq, cfg.mode, sc_options(cfg));
    const SiteStatistics stq = stats_of(sq, cfg);
    for (int k = 0; k < n_occ; ++k) row.push_back(stq.p_occupation(k));
    const ModelParams pc = classical_reference(cfg, a_s);
    const SelfConsistentResult scl =
        self_consistent_depth(pc, HamiltonianMode::Effective, sc_options(cfg));
    const SiteStatistics stc = stats_of(scl, cfg);
    for (int k = 0; k < n_occ; ++k) row.push_back(stc.p_occupation(k));
    return row;
  });
  return t;
}

ResultTable run_fig4b_or_5a(const ScenarioConfig& cfg, bool correlations) {
  const SweepSpec sweep = *cfg.sweep;  // a_s
  const std::string what = correlations ? "corr_diff" : "variance";
  ResultTable t;
  t.header = {"a_s", what + "_dc_" + fmt_val(cfg.params.delta_c),
              what + "_dc_" + fmt_val(cfg.delta_c_second), what + "_classical"};
  const double eta_1 = cfg.resolved_eta(cfg.params.delta_c);
  const double eta_2 = cfg.resolved_eta(cfg.delta_c_second);
  fill_rows(t, sweep.n_points, resolve_jobs(cfg), [&](int i) {
    const double a_s = sweep.value_at(i);
    auto value = [&](const SelfConsistentResult& sc) {
      return correlations ? correlations_of(sc, cfg).difference_13_12
                          : stats_of(sc, cfg).variance_n;
    };
    std::vector<double> row{a_s};
    for (int which = 0; which < 2; ++which) {
      ModelParams p = cfg.params;
      p.a_s = a_s;
      p.delta_c = which == 0 ? cfg.params.delta_c : cfg.delta_c_second;
      p.eta = which == 0 ? eta_1 : eta_2;
      row.push_back(value(self_consistent_depth(p, cfg.mode, sc_options(cfg))));
    }
    const ModelParams pc = classical_reference(cfg, a_s);
    row.push_back(
        value(self_consistent_depth(pc, HamiltonianMode::Effective, sc_options(cfg))));
    return row;
  });
  return t;
}

ResultTable run_fig5b(const ScenarioConfig& cfg) {
  ModelParams p = cfg.params;
  p.eta = cfg.resolved_eta(p.delta_c);

  const auto [psi0, alpha0] =
      prepare_quench_initial(p, cfg.a_s_initial, cfg.numerics.lattice());
  QuenchSpec q;
  q.a_s_initial = cfg.a_s_initial;
  q.a_s_final = p.a_s;
  q.t_final = cfg.numerics.t_final;
  q.dt = cfg.numerics.dt;
  q.recompute_cadence = cfg.numerics.recompute_cadence;
  q.record_stride = cfg.numerics.record_stride;
  const Trajectory traj =
      evolve(psi0, alpha0, p, q, RecomputePolicy::Cached, cfg.numerics.lattice());

  ResultTable t;
  t.header = {"t", "re_alpha", "im_alpha", "alpha_sq", "v_eff", "norm"};
  for (int s = 1; s <= p.n_sites; ++s) t.header.push_back("mean_n_" + std::to_string(s));
  for (int s = 1; s <= p.n_sites; ++s) t.header.push_back("var_n_" + std::to_string(s));
  t.header.push_back("b_expect");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i],     traj.alpha[i].real(),
                            traj.alpha[i].imag(), std::norm(traj.alpha[i]),
                            traj.v_eff[i],     traj.norm[i]};
    for (int s = 0; s < p.n_sites; ++s) row.push_back(traj.mean_n[i](s));
    for (int s = 0; s < p.n_sites; ++s) row.push_back(traj.var_n[i](s));
    row.push_back(traj.b_expect[i]);
    t.rows.push_back(std::move(row));
    t.row_errors.emplace_back();
  }
  for (const auto& [time, msg] : traj.warnings)
    t.metadata.emplace_back("warning", "t=" + fmt_val(time) + ": " + msg);
  return t;
}

ResultTable run_custom(const ScenarioConfig& cfg) {
  const int n_occ = cfg.params.n_atoms + 1;
  ResultTable t;
  std::vector<SweepSpec> axes;
  if (cfg.sweep2) axes.push_back(*cfg.sweep2);
  if (cfg.sweep) axes.push_back(*cfg.sweep);
  for (const auto& ax : axes) t.header.push_back(ax.parameter);
  t.header.insert(t.header.end(),
                  {"energy", "v_eff_scalar", "v_eff_state", "photon_mean", "re_alpha0",
                   "im_alpha0", "delta_c_prime"});
  for (int k = 0; k < n_occ; ++k) t.header.push_back("p" + std::to_string(k));
  t.header.push_back("variance");
  t.header.push_back("corr_diff_13_12");

  int n_rows = 1;
  for (const auto& ax : axes) n_rows *= ax.n_points;
  fill_rows(t, n_rows, resolve_jobs(cfg), [&](int idx) {
    ModelParams p = cfg.params;
    std::vector<double> row;
    int rem = idx;  // innermost axis varies fastest
    std::vector<double> axis_vals(axes.size());
    for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
      axis_vals[a] = axes[a].value_at(rem % axes[a].n_points);
      rem /= axes[a].n_points;
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      set_swept(p, axes[a].parameter, axis_vals[a]);
      row.push_back(axis_vals[a]);
    }
    p.eta = cfg.resolved_eta(p.delta_c);
    const SelfConsistentResult sc = self_consistent_depth(p, cfg.mode, sc_options(cfg));
    row.insert(row.end(),
               {sc.ground.energy, sc.v_eff, sc.ground.v_eff,
                sc.ground.photon_mean.value_or(kNaN), sc.field.alpha0.real(),
                sc.field.alpha0.imag(), sc.field.delta_c_prime});
    const SiteStatistics st = stats_of(sc, cfg);
    for (int k = 0; k < n_occ; ++k) row.push_back(st.p_occupation(k));
    row.push_back(st.variance_n);
    row.push_back(correlations_of(sc, cfg).difference_13_12);
    return row;
  });
  return t;
}

}  // namespace

ResultTable run_scenario(const ScenarioConfig& cfg) {
  ResultTable t;
  switch (cfg.scenario) {
    case Scenario::Fig2a:
    case Scenario::Fig2b: t = run_fig2(cfg); break;
    case Scenario::Fig3: t = run_fig3(cfg); break;
    case Scenario::Fig4a: t = run_fig4a(cfg); break;
    case Scenario::Fig4b: t = run_fig4b_or_5a(cfg, false); break;
    case Scenario::Fig5a: t = run_fig4b_or_5a(cfg, true); break;
    case Scenario::Fig5b: t = run_fig5b(cfg); break;
    case Scenario::Custom: t = run_custom(cfg); break;
  }
  auto meta = serialize_config(cfg);
  t.metadata.insert(t.metadata.begin(), meta.begin(), meta.end());
  return t;
}

ResultTable wannier_table(const ScenarioConfig& cfg) {
  ModelParams p = cfg.params;
  p.eta = cfg.resolved_eta(p.delta_c);
  const SelfConsistentResult sc =
      self_consistent_depth(p, HamiltonianMode::Effective, sc_options(cfg));
  const BlochSpectrum bands =
      solve_bloch_band(cfg.numerics.lattice().at_depth(sc.v_eff));
  const WannierFunction w = build_wannier(bands, 0);
  ResultTable t;
  t.header = {"x", "w", "dw_dx"};
  for (Eigen::Index i = 0; i < w.grid.size(); ++i) {
    t.rows.push_back({w.grid(i), w.values(i), w.derivative(i)});
    t.row_errors.emplace_back();
  }
  t.metadata = serialize_config(cfg);
  t.metadata.emplace_back("wannier_depth", std::to_string(sc.v_eff));
  return t;
}

void write_csv(const ResultTable& table, std::ostream& out) {
  out << "# cavbh " << kVersion << "\n";
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%FT%TZ", std::gmtime(&now));
  out << "# generated " << stamp << "\n";
  for (const auto& [k, v] : table.metadata) out << "# " << k << " = " << v << "\n";

  const bool any_error = std::any_of(table.row_errors.begin(), table.row_errors.end(),
                                     [](const std::string& e) { return !e.empty(); });
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  if (any_error) out << ",error";
  out << "\n";

  char buf[40];
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.15g", row[i]);
      out << (i ? "," : "") << buf;
    }
    if (any_error) {
      std::string msg = r < table.row_errors.size() ? table.row_errors[r] : "";
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out << ",\"" << msg << "\"";
    }
    out << "\n";
  }
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_csv(table, out);
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace cavbh
