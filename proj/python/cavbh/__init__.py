"""Ultracold bosons in a pumped-cavity optical lattice.

The heavy lifting lives in the compiled extension; this package re-exports
its surface: band-structure matrix elements, Fock-space Hamiltonians, the
self-consistent ground-state pipeline, observables, the mean-field quench
integrator, and the scenario runner.
"""

from cavbh._core import (  # noqa: F401
    AtomBasis,
    ConfigError,
    LatticeDepthSpec,
    MatrixElements,
    ModelParams,
    NumericalError,
    QuenchSpec,
    SelfConsistentResult,
    SiteStatistics,
    __version__,
    density_correlations,
    effective_hamiltonian,
    energy_gap_two_well,
    eta_for_target_depth,
    evolve_quench,
    exact_elimination_hamiltonian,
    full_hamiltonian,
    ground_state,
    hop_matrix,
    linear_fit,
    matrix_elements_at_depth,
    number_matrix,
    run_scenario,
    self_consistent_ground_state,
    site_statistics,
    wannier,
)
