"""Bloch spectra of the water-wave Dirichlet-Neumann operator over periodic bathymetry."""

__version__ = "0.1.0"

from .bathymetry import BathymetryProfile
from .dno import DnoSeries, assemble_G_theta, build_M_terms
from .fourier import (
    BlochParameter,
    FourierField,
    Truncation,
    analyze,
    diag_symbol,
    g_symbol,
    s_symbol,
    synthesize,
    toeplitz_mult,
)
from .oracle import OracleResolution, apply_dno_oracle
from .perturbation import (
    PerturbationData,
    analytic_gap_formulas,
    effective_matrices,
    effective_matrix_A,
    fit_gap_scaling,
    gap_from_A,
    gap_opening_predicate,
    gap_pair,
    off_block_residual,
    second_order_coefficients,
    solve_T_recursion,
)
from .spectrum import (
    BandStructure,
    GapReport,
    LinearPropagator,
    WaveState,
    band_edges,
    band_sweep,
    eigen_decompose,
    evolve_linearized,
    flat_bottom_reference,
    reconstruct_bloch_eigenfunction,
    theta_grid,
)
