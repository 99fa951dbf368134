#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace cavbh {

using cplx = std::complex<double>;

/// Internal units: length in lambda/2, energy in recoils E_R = hbar^2 k^2 / 2m,
/// hbar = 1. Cavity quantities (u0, delta_c, eta) are in units of kappa and are
/// bridged to recoils through ModelParams::kappa_in_recoils.

enum class Boundary { Open, Periodic };

enum class HamiltonianMode {
  ExactElimination,     // atom-only H with the field operator inverted exactly
  Effective,            // atom-only H from the second-order field expansion
  Coupled,              // full atom x photon Hamiltonian, Hermitian
  CoupledNonHermitian,  // coupled H - i*kappa*a^dag a, smallest real part
};

/// Numerical controls for the single-particle band / Wannier solver.
struct LatticeDepthSpec {
  double v_depth = -4.0;  // signed depth in E_R; < 0 puts wells at cos^2(kx) = 1
  double lattice_period = 1.0;  // lambda/2; fixed internal length unit
  int n_planewaves = 21;        // odd plane-wave cutoff
  int n_q = 32;                 // quasimomentum samples, even
  int n_grid = 128;             // real-space grid points per period

  void validate() const {
    if (n_planewaves < 11 || n_planewaves % 2 == 0)
      throw std::invalid_argument("n_planewaves must be odd and >= 11");
    if (n_q < 16 || n_q % 2 != 0)
      throw std::invalid_argument("n_q must be even and >= 16");
    if (n_grid < 64) throw std::invalid_argument("n_grid must be >= 64");
    if (lattice_period != 1.0)
      throw std::invalid_argument("lattice_period is fixed to 1 (lambda/2 units)");
  }

  LatticeDepthSpec at_depth(double v) const {
    LatticeDepthSpec s = *this;
    s.v_depth = v;
    return s;
  }
};

/// All physical inputs of the model.
struct ModelParams {
  double u0 = -1.0;      // light shift per photon, units of kappa
  double delta_c = -3.0; // cavity-pump detuning, units of kappa
  double kappa = 1.0;    // cavity decay rate; the kappa unit itself
  double eta = 2.0;      // mirror pump amplitude, units of kappa
  double eta_eff = 0.0;  // transverse pump, units of kappa
  double v_cl = 0.0;     // classical lattice depth, E_R
  double a_s = 0.0;      // interaction scale, E_R; maps linearly to g1d
  int n_atoms = 1;
  int n_sites = 2;
  double kappa_in_recoils = 1.0;  // hbar*kappa / E_R unit bridge
  Boundary boundary = Boundary::Open;
  std::optional<int> n_max;  // photon cutoff; empty = adaptive

  void validate() const {
    if (kappa_in_recoils <= 0) throw std::invalid_argument("kappa_in_recoils must be > 0");
    if (eta < 0) throw std::invalid_argument("eta must be >= 0");
    if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
    if (n_sites < 2) throw std::invalid_argument("n_sites must be >= 2");
    if (kappa != 1.0) throw std::invalid_argument("kappa is the unit and fixed to 1");
    if (boundary == Boundary::Periodic && n_sites < 3)
      throw std::invalid_argument("periodic boundary requires n_sites >= 3");
    if (n_max && *n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  }

  /// Effective 1D interaction coupling in E_R * (lambda/2). The scattering
  /// length is quoted in energy units, so the map is the identity; U then
  /// follows as g1d * integral(w^4).
  double g1d() const { return a_s; }
};

/// Raised when an eigensolver or fixed-point iteration fails to converge.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cavbh
