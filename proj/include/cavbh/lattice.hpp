#pragma once

#include <Eigen/Dense>
#include <string>

#include "cavbh/params.hpp"

namespace cavbh {

/// Lowest Bloch band of H = -(1/pi^2) d^2/dx^2 + v_depth cos^2(pi x),
/// x in units of lambda/2, energies in E_R.
struct BlochSpectrum {
  Eigen::VectorXd quasimomenta;  // units of k, in [-1, 1)
  Eigen::VectorXd band_energy;   // E_R
  Eigen::MatrixXd coefficients;  // plane-wave amplitudes; column per q, real gauge
  double v_depth = 0.0;
  double well_center = 0.0;  // 0 for v <= 0, 0.5 for v > 0
  int n_planewaves = 0;
  int n_grid = 128;
};

/// Real, even, maximally localized lowest-band Wannier orbital.
struct WannierFunction {
  Eigen::VectorXd grid;        // positions, lambda/2 units; uniform spacing
  Eigen::VectorXd values;      // w(x)
  Eigen::VectorXd derivative;  // dw/dx, evaluated spectrally
  Eigen::VectorXd second_derivative;
  int center_site = 0;
  double center_position = 0.0;
  int points_per_period = 0;
  double v_depth = 0.0;  // depth the band problem was solved at
};

/// Tight-binding matrix elements at a given depth. e* are kinetic integrals,
/// j* the cos^2 overlaps, jt* the cos overlaps; u_onsite = g1d * integral(w^4).
struct MatrixElements {
  double e0 = 0, e1 = 0;
  double j0 = 0, j1 = 0;
  double jt0 = 0, jt1 = 0;
  double u_onsite = 0;
  double v_depth = 0;
  double e2 = 0, j2 = 0;  // next-nearest; computed, asserted small, then dropped
  std::string warning;    // set when next-nearest hopping exceeds 10% of nearest

  /// Net nearest-neighbor hopping coefficient at lattice depth v (E_R).
  double net_hopping(double v) const { return e1 + j1 * v; }
};

BlochSpectrum solve_bloch_band(const LatticeDepthSpec& spec);

WannierFunction build_wannier(const BlochSpectrum& spectrum, int center_site);

MatrixElements compute_matrix_elements(const WannierFunction& w, double g1d);

/// Convenience: band solve + Wannier + integrals in one call.
MatrixElements matrix_elements_at_depth(double v_depth, double g1d,
                                        const LatticeDepthSpec& numerics);

}  // namespace cavbh
