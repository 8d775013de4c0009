"""Numerical laboratory for vector coherent states and companion Hamiltonians.

The library builds coherent-state families on truncated sector-decomposed
spaces from arbitrary discrete spectra, verifies their defining properties
(normalization, action identity, temporal stability, annihilation-eigenstate
relation, resolution of the identity), and constructs isospectral and
spectrum-mapped companion Hamiltonians via intertwining operators, with
numerical certificates for every claim.
"""

from . import errors
from .spectra import (
    SpectralSequence,
    ShiftedSequence,
    FactorialCache,
    make_sequence,
    linear_sequence,
    quon_sequence,
    sequence_from_config,
    shift,
    factorials,
    eds_check,
    radius_estimate,
)
from .hilbert import (
    SectorSpace,
    SusyVector,
    BlockOperator,
    LadderRealization,
    GridSpec,
    basis_vector,
    gk_ladder,
    lowering_operator,
    eds_lowering_operator,
    delta_lowering_operator,
    boson_ladder,
    quon_ladder,
    grid_ladder,
    susy_hamiltonian,
    shifted_hamiltonian,
    evolution_operator,
    delta_evolution_operator,
    write_complex_matrix,
    read_complex_matrix,
)
from .vcs import (
    VcsParams,
    CoherentState,
    series_norm,
    delta_family_state,
    eds_family_state,
    action_identity_residual,
    temporal_stability_residual,
    eigenstate_residual,
    write_coefficients,
)
from .moments import (
    MomentWeight,
    QuadratureSpec,
    verify_moments,
    resolution_check,
    delta_zero_failure,
    cesaro_phase_average,
    write_residual_table,
)
from .intertwine import (
    SpectralMap,
    IntertwiningProblem,
    IntertwiningResult,
    construct_companion,
    map_companion,
    example_problem,
    h_tau_residual,
    power_series_equality_probe,
    projection_identity_check,
    quon_closed_forms,
    grid_partner_comparison,
    fit_power_law,
)

__version__ = "0.1.0"
