#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cavbh/dynamics.hpp"
#include "cavbh/observables.hpp"
#include "cavbh/scenario.hpp"

namespace py = pybind11;
using namespace cavbh;

namespace {

HamiltonianMode mode_from_string(const std::string& s) {
  if (s == "exact-elim") return HamiltonianMode::ExactElimination;
  if (s == "effective") return HamiltonianMode::Effective;
  if (s == "coupled") return HamiltonianMode::Coupled;
  if (s == "coupled-nh") return HamiltonianMode::CoupledNonHermitian;
  throw std::invalid_argument("unknown mode: " + s);
}

OperatorMatrix hermitian_from_dense(const Eigen::MatrixXcd& m) {
  BasisTag tag{BasisTag::Kind::Atom, m.rows(), "dense"};
  OperatorMatrix op(m, tag, true);
  op.assert_hermitian(1e-10);
  return op;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ultracold bosons in a pumped-cavity optical lattice";
  m.attr("__version__") = kVersion;

  py::class_<LatticeDepthSpec>(m, "LatticeDepthSpec")
      .def(py::init<>())
      .def_readwrite("v_depth", &LatticeDepthSpec::v_depth)
      .def_readwrite("n_planewaves", &LatticeDepthSpec::n_planewaves)
      .def_readwrite("n_q", &LatticeDepthSpec::n_q)
      .def_readwrite("n_grid", &LatticeDepthSpec::n_grid);

  py::class_<MatrixElements>(m, "MatrixElements")
      .def_readonly("e0", &MatrixElements::e0)
      .def_readonly("e1", &MatrixElements::e1)
      .def_readonly("j0", &MatrixElements::j0)
      .def_readonly("j1", &MatrixElements::j1)
      .def_readonly("jt0", &MatrixElements::jt0)
      .def_readonly("jt1", &MatrixElements::jt1)
      .def_readonly("u_onsite", &MatrixElements::u_onsite)
      .def_readonly("v_depth", &MatrixElements::v_depth)
      .def_readonly("warning", &MatrixElements::warning)
      .def("net_hopping", &MatrixElements::net_hopping)
      .def("__repr__", [](const MatrixElements& me) {
        return "MatrixElements(v_depth=" + std::to_string(me.v_depth) +
               ", e1=" + std::to_string(me.e1) + ", j1=" + std::to_string(me.j1) +
               ", u_onsite=" + std::to_string(me.u_onsite) + ")";
      });

  m.def("matrix_elements_at_depth", &matrix_elements_at_depth, py::arg("v_depth"),
        py::arg("g1d") = 0.0, py::arg("numerics") = LatticeDepthSpec{},
        "Band solve + Wannier construction + tight-binding integrals");

  m.def(
      "wannier",
      [](double v_depth, const LatticeDepthSpec& numerics) {
        const WannierFunction w =
            build_wannier(solve_bloch_band(numerics.at_depth(v_depth)), 0);
        return py::make_tuple(w.grid, w.values, w.derivative);
      },
      py::arg("v_depth"), py::arg("numerics") = LatticeDepthSpec{},
      "Lowest-band Wannier function at a given depth: (x, w, dw_dx)");

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("u0", &ModelParams::u0)
      .def_readwrite("delta_c", &ModelParams::delta_c)
      .def_readwrite("eta", &ModelParams::eta)
      .def_readwrite("eta_eff", &ModelParams::eta_eff)
      .def_readwrite("v_cl", &ModelParams::v_cl)
      .def_readwrite("a_s", &ModelParams::a_s)
      .def_readwrite("n_atoms", &ModelParams::n_atoms)
      .def_readwrite("n_sites", &ModelParams::n_sites)
      .def_readwrite("kappa_in_recoils", &ModelParams::kappa_in_recoils)
      .def_property(
          "periodic", [](const ModelParams& p) { return p.boundary == Boundary::Periodic; },
          [](ModelParams& p, bool on) {
            p.boundary = on ? Boundary::Periodic : Boundary::Open;
          })
      .def_property(
          "n_max",
          [](const ModelParams& p) { return p.n_max ? py::cast(*p.n_max) : py::none(); },
          [](ModelParams& p, py::object v) {
            if (v.is_none()) p.n_max.reset();
            else p.n_max = v.cast<int>();
          });

  py::class_<AtomBasis>(m, "AtomBasis")
      .def(py::init([](int n_sites, int n_atoms) {
             return AtomBasis::enumerate(n_sites, n_atoms);
           }),
           py::arg("n_sites"), py::arg("n_atoms"))
      .def_property_readonly("dim", &AtomBasis::dim)
      .def_property_readonly("states", [](const AtomBasis& b) { return b.states(); })
      .def("index_of", &AtomBasis::index_of);

  m.def(
      "hop_matrix",
      [](const AtomBasis& b, bool periodic) {
        return hop_operator(b, periodic ? Boundary::Periodic : Boundary::Open).to_dense();
      },
      py::arg("basis"), py::arg("periodic") = false);
  m.def(
      "number_matrix",
      [](const AtomBasis& b, int site) { return number_operator(b, site).to_dense(); },
      py::arg("basis"), py::arg("site"));

  m.def(
      "effective_hamiltonian",
      [](const ModelParams& p, const MatrixElements& me) {
        return build_effective_hamiltonian(p, me, AtomBasis::enumerate(p.n_sites, p.n_atoms))
            .to_dense();
      },
      py::arg("params"), py::arg("matrix_elements"),
      "Atom-only Hamiltonian with the field eliminated to second order");
  m.def(
      "exact_elimination_hamiltonian",
      [](const ModelParams& p, const MatrixElements& me) {
        return build_exact_elimination_hamiltonian(
                   p, me, AtomBasis::enumerate(p.n_sites, p.n_atoms))
            .to_dense();
      },
      py::arg("params"), py::arg("matrix_elements"));
  m.def(
      "full_hamiltonian",
      [](const ModelParams& p, const MatrixElements& me, int n_max) {
        CoupledBasis basis{AtomBasis::enumerate(p.n_sites, p.n_atoms), PhotonBasis{n_max}};
        return build_full_hamiltonian(p, me, basis).to_dense();
      },
      py::arg("params"), py::arg("matrix_elements"), py::arg("n_max"),
      "Coupled atom x photon Hamiltonian (atom index slow, photon fast)");

  m.def(
      "ground_state",
      [](const Eigen::MatrixXcd& h) {
        const GroundStateResult r = cavbh::ground_state(hermitian_from_dense(h));
        return py::make_tuple(r.energy, r.state);
      },
      py::arg("hamiltonian"), "Lowest eigenpair of a Hermitian matrix: (energy, state)");

  m.def("energy_gap_two_well", &energy_gap_two_well, py::arg("params"),
        py::arg("matrix_elements"));
  m.def("eta_for_target_depth", &eta_for_target_depth, py::arg("params"),
        py::arg("v_target"), py::arg("numerics") = LatticeDepthSpec{});

  py::class_<SelfConsistentResult>(m, "SelfConsistentResult")
      .def_readonly("me", &SelfConsistentResult::me)
      .def_readonly("v_eff", &SelfConsistentResult::v_eff)
      .def_readonly("iterations", &SelfConsistentResult::iterations)
      .def_property_readonly("alpha0",
                             [](const SelfConsistentResult& r) { return r.field.alpha0; })
      .def_property_readonly(
          "delta_c_prime",
          [](const SelfConsistentResult& r) { return r.field.delta_c_prime; })
      .def_property_readonly("energy",
                             [](const SelfConsistentResult& r) { return r.ground.energy; })
      .def_property_readonly("state",
                             [](const SelfConsistentResult& r) { return r.ground.state; })
      .def_property_readonly(
          "photon_mean",
          [](const SelfConsistentResult& r) {
            return r.ground.photon_mean ? py::cast(*r.ground.photon_mean) : py::none();
          })
      .def_property_readonly(
          "v_eff_state", [](const SelfConsistentResult& r) { return r.ground.v_eff; })
      .def_property_readonly("n_max", [](const SelfConsistentResult& r) {
        return r.coupled_basis ? py::cast(r.coupled_basis->photons.n_max) : py::none();
      });

  m.def(
      "self_consistent_ground_state",
      [](const ModelParams& p, const std::string& mode) {
        return self_consistent_depth(p, mode_from_string(mode));
      },
      py::arg("params"), py::arg("mode") = "exact-elim",
      "Self-consistent lattice depth, then the ground state of the chosen model");

  py::class_<SiteStatistics>(m, "SiteStatistics")
      .def_readonly("site", &SiteStatistics::site)
      .def_readonly("p_occupation", &SiteStatistics::p_occupation)
      .def_readonly("mean_n", &SiteStatistics::mean_n)
      .def_readonly("variance_n", &SiteStatistics::variance_n);

  m.def(
      "site_statistics",
      [](const Eigen::VectorXcd& state, const AtomBasis& basis, int site) {
        return site_statistics(state, basis, site);
      },
      py::arg("state"), py::arg("basis"), py::arg("site"));
  m.def(
      "density_correlations",
      [](const Eigen::VectorXcd& state, const AtomBasis& basis) {
        const CorrelationReport r = density_correlations(state, basis);
        return py::make_tuple(r.pairs, r.difference_13_12);
      },
      py::arg("state"), py::arg("basis"),
      "All <n_i n_j> pair expectations and <n_1 n_3> - <n_1 n_2>");

  py::class_<QuenchSpec>(m, "QuenchSpec")
      .def(py::init<>())
      .def_readwrite("a_s_initial", &QuenchSpec::a_s_initial)
      .def_readwrite("a_s_final", &QuenchSpec::a_s_final)
      .def_readwrite("t_final", &QuenchSpec::t_final)
      .def_readwrite("dt", &QuenchSpec::dt)
      .def_readwrite("recompute_cadence", &QuenchSpec::recompute_cadence)
      .def_readwrite("record_stride", &QuenchSpec::record_stride);

  m.def(
      "evolve_quench",
      [](const ModelParams& p, const QuenchSpec& q) {
        const auto [psi0, alpha0] = prepare_quench_initial(p, q.a_s_initial);
        const Trajectory traj = evolve(psi0, alpha0, p, q);
        py::dict out;
        out["t"] = traj.times;
        out["alpha"] = traj.alpha;
        out["v_eff"] = traj.v_eff;
        out["norm"] = traj.norm;
        out["b_expect"] = traj.b_expect;
        out["mean_n"] = traj.mean_n;
        out["var_n"] = traj.var_n;
        std::vector<std::string> warnings;
        for (const auto& [t, msg] : traj.warnings) warnings.push_back(msg);
        out["warnings"] = warnings;
        return out;
      },
      py::arg("params"), py::arg("quench"),
      "Prepare the pre-quench fixed point and integrate the coupled mean-field "
      "equations; a_s jumps from a_s_initial to a_s_final at t = 0");

  m.def("linear_fit", &linear_fit, py::arg("times"), py::arg("values"));

  m.def(
      "run_scenario",
      [](const std::string& config_text) {
        const ScenarioConfig cfg = parse_config(config_text);
        const ResultTable t = run_scenario(cfg);
        py::dict out;
        out["header"] = t.header;
        Eigen::MatrixXd rows(t.rows.size(), t.header.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i)
          for (std::size_t j = 0; j < t.rows[i].size(); ++j) rows(i, j) = t.rows[i][j];
        out["rows"] = rows;
        out["row_errors"] = t.row_errors;
        out["metadata"] = t.metadata;
        return out;
      },
      py::arg("config_text"),
      "Run a scenario from a key = value config document and return the table");

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
}
