"""Vector coherent states on the truncated sector space.

Two families are built here.  The *delta family* lives in the zero-ground
regime and needs a strictly positive regulator ``delta``; its two sectors
carry opposite phase signs.  The *shift family* (built on spectra with
positive, pairwise disjoint eigenvalues) needs no regulator, uses shifted
factorial weights, and carries the same phase sign in every sector.  The
residual checks quantify normalization, the action identity, temporal
stability and the annihilation-eigenstate relation on the truncated space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    LengthMismatchError,
    OutOfDiscError,
    RegimeError,
    TailTooLargeError,
)
from .hilbert import (
    BlockOperator,
    SectorSpace,
    SusyVector,
    delta_evolution_operator,
    evolution_operator,
    susy_hamiltonian,
    window_mask,
)
from .spectra import ShiftedSequence, radius_estimate, require_disjoint, shift

__all__ = [
    "VcsParams",
    "CoherentState",
    "series_norm",
    "delta_family_state",
    "eds_family_state",
    "action_identity_residual",
    "temporal_stability_residual",
    "eigenstate_residual",
    "intensity_sqrt_operator",
    "write_coefficients",
    "TAIL_TOLERANCE",
]

#: states whose truncated-mass bound exceeds this are rejected outright
TAIL_TOLERANCE = 1e-10

#: eigenstate residuals exclude this many top levels (ladder degree 1 + buffer 2)
EIGENSTATE_EXCLUDE_TOP = 3


@dataclass(frozen=True)
class VcsParams:
    """Coherent-state labels: per-sector intensities, common phase, regulator."""

    intensities: tuple
    gamma: float
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "intensities", tuple(float(j) for j in self.intensities))
        if any(j < 0 for j in self.intensities):
            raise OutOfDiscError(f"intensities must be nonnegative, got {self.intensities}")
        if self.delta < 0:
            raise RegimeError(f"delta must be nonnegative, got {self.delta}")


@dataclass(frozen=True)
class CoherentState:
    """A built coherent state with its normalization bookkeeping.

    ``norm_const`` is the sum of the per-sector coefficient series (partial
    sums to the truncation); ``tail_bound`` bounds the squared coefficient
    mass lost to truncation, so the stored vector has unit norm up to it.
    """

    vector: SusyVector
    norm_const: float
    tail_bound: float
    regime: str
    params: VcsParams
    seqs: tuple
    series_values: tuple

    @property
    def space(self) -> SectorSpace:
        return self.vector.space


def _series_terms(shifted: ShiftedSequence, j_value: float) -> np.ndarray:
    """Terms J^k / (shifted factorial), computed by stable ratio recursion."""
    if j_value == 0.0:
        out = np.zeros(shifted.dim)
        out[0] = 1.0
        return out
    return np.concatenate(([1.0], np.cumprod(j_value / shifted.values[1:])))


def series_norm(
    shifted: ShiftedSequence, j_value: float, tail_tol: float | None = TAIL_TOLERANCE
):
    """Partial sum of ``sum_k J^k / e~[k]!`` with an explicit tail bound.

    The tail is bounded geometrically through the last term ratio
    ``r = J / e~[D-1]`` (valid because the shifted values increase).  Raises
    ``OutOfDiscError`` when J reaches the estimated convergence radius of a
    bounded-looking sequence, and ``TailTooLargeError`` when no tail bound
    below ``tail_tol`` can be certified at this truncation.
    """
    if j_value < 0:
        raise OutOfDiscError(f"intensity must be nonnegative, got {j_value}")
    terms = _series_terms(shifted, j_value)
    value = float(terms.sum())
    if j_value == 0.0:
        return value, 0.0
    guess = radius_estimate(shifted.as_sequence())
    if guess.flag == "bounded-suspect" and j_value >= guess.limit:
        raise OutOfDiscError(
            f"J={j_value} is outside the estimated convergence disc "
            f"(radius ~ {guess.limit:.6g})"
        )
    ratio = j_value / shifted.values[-1]
    if ratio >= 1.0:
        raise TailTooLargeError(
            f"no geometric tail control: J={j_value} >= top shifted level "
            f"{shifted.values[-1]:.6g}; increase the truncation"
        )
    tail = float(terms[-1] * ratio / (1.0 - ratio))
    if tail_tol is not None and tail > tail_tol:
        raise TailTooLargeError(
            f"series tail bound {tail:.3e} exceeds tolerance {tail_tol:.1e}"
        )
    return value, tail


def _common_dim(seqs) -> int:
    dims = {s.dim for s in seqs}
    if len(dims) != 1:
        raise LengthMismatchError(f"sector truncations differ: {sorted(dims)}")
    return dims.pop()


def _assemble(seqs, shifted, params, phase_signs, regime, tail_tol):
    """Shared coefficient assembly for the two families.

    Phases always use the unshifted eigenvalues (plus the regulator for the
    delta family); amplitudes always use the shifted factorial terms.
    """
    dim = _common_dim(seqs)
    space = SectorSpace(len(seqs), dim)
    values, tails, blocks = [], [], []
    for seq, sh, j_value, sign in zip(seqs, shifted, params.intensities, phase_signs):
        m_value, tail = series_norm(sh, j_value, tail_tol=tail_tol)
        values.append(m_value)
        tails.append(tail)
        amp = np.sqrt(_series_terms(sh, j_value))
        phase = np.exp(sign * 1j * (seq.values + params.delta) * params.gamma)
        blocks.append(amp * phase)
    norm_const = float(sum(values))
    data = np.concatenate(blocks) / np.sqrt(norm_const)
    return CoherentState(
        vector=SusyVector(space, data),
        norm_const=norm_const,
        tail_bound=float(sum(tails)) / norm_const,
        regime=regime,
        params=params,
        seqs=tuple(seqs),
        series_values=tuple(values),
    )


def delta_family_state(
    seqs, params: VcsParams, tail_tol: float = TAIL_TOLERANCE
) -> CoherentState:
    """Coherent state of the delta-regularized two-sector family.

    Requires two spectra with ground level exactly zero and ``delta > 0``.
    Sector coefficients::

        c[n,0] = J1^(n/2) exp(-i (e1[n]+delta) gamma) / sqrt(e1[n]! * N)
        c[n,1] = J2^(n/2) exp(+i (e2[n]+delta) gamma) / sqrt(e2[n]! * N)

    with ``N`` the sum of the two coefficient series.  Note the opposite
    phase signs of the sectors.
    """
    if len(seqs) != 2:
        raise RegimeError(f"the delta family is two-sector, got {len(seqs)}")
    if len(params.intensities) != 2:
        raise RegimeError("need exactly two intensities")
    if params.delta <= 0:
        raise RegimeError(f"the delta family needs delta > 0, got {params.delta}")
    for j, s in enumerate(seqs):
        if s.ground != 0.0:
            raise RegimeError(
                f"sector {j} ground level {s.ground} != 0; "
                "delta-family spectra must start at zero"
            )
    shifted = [shift(s) for s in seqs]
    return _assemble(seqs, shifted, params, (-1.0, +1.0), "delta-family", tail_tol)


def eds_family_state(
    seqs,
    params: VcsParams,
    tail_tol: float = TAIL_TOLERANCE,
    disjoint_tol: float = 1e-9,
) -> CoherentState:
    """Coherent state of the shift-based family (no regulator).

    For two or more sectors the spectra must have strictly positive ground
    levels and be pairwise disjoint; a single sector reproduces the classic
    one-Hamiltonian coherent state and is exempt from both conditions.
    Every sector carries the same phase sign::

        c[n,j] = Jj^(n/2) exp(-i ej[n] gamma) / sqrt(e~j[n]! * N~)
    """
    if not seqs:
        raise RegimeError("need at least one sector")
    if len(params.intensities) != len(seqs):
        raise RegimeError(
            f"{len(seqs)} sectors but {len(params.intensities)} intensities"
        )
    if len(seqs) > 1:
        for j, s in enumerate(seqs):
            if not s.ground > 0:
                raise RegimeError(
                    f"sector {j} ground level {s.ground} must be positive "
                    "in the multi-sector shift regime"
                )
        for a in range(len(seqs)):
            for b in range(a + 1, len(seqs)):
                require_disjoint(seqs[a], seqs[b], tol=disjoint_tol)
    shifted = [shift(s) for s in seqs]
    signs = (-1.0,) * len(seqs)
    params = VcsParams(params.intensities, params.gamma, 0.0)
    return _assemble(seqs, shifted, params, signs, "eds-family", tail_tol)


def action_identity_residual(state: CoherentState, hamiltonian: BlockOperator) -> float:
    """|<psi, H psi> - closed form| for the energy expectation identity.

    For the shift family pass the ground-shifted Hamiltonian; the closed form
    is ``sum_j Jj Mj / sum_j Mj`` with the per-sector series values stored in
    the state.
    """
    if hamiltonian.space != state.space:
        raise DimensionMismatchError("state and Hamiltonian live on different spaces")
    lhs = state.vector.inner(hamiltonian.apply(state.vector)).real
    j = np.asarray(state.params.intensities)
    m = np.asarray(state.series_values)
    rhs = float((j * m).sum() / state.norm_const)
    return abs(lhs - rhs)


def _build_state(seqs, params, regime, tail_tol):
    if regime == "delta-family":
        return delta_family_state(seqs, params, tail_tol)
    if regime == "eds-family":
        return eds_family_state(seqs, params, tail_tol)
    raise RegimeError(f"unknown regime {regime!r}")


def temporal_stability_residual(
    seqs,
    params: VcsParams,
    t: float,
    regime: str,
    evolution: str = "family",
    tail_tol: float = TAIL_TOLERANCE,
) -> float:
    """Norm distance between the evolved state and the state at shifted gamma.

    ``evolution="family"`` uses each family's own invariance operator: the
    physical ``exp(-i H t)`` for the shift family, the ad-hoc split-sign
    operator for the delta family.  ``evolution="physical"`` forces
    ``exp(-i H t)`` in both cases; for the delta family this documents that
    the physical evolution does NOT preserve the family.
    """
    before = _build_state(seqs, params, regime, tail_tol)
    after = _build_state(
        seqs, VcsParams(params.intensities, params.gamma + t, params.delta), regime, tail_tol
    )
    if regime == "delta-family" and evolution == "family":
        u = delta_evolution_operator(seqs, params.delta, t)
    elif evolution in ("family", "physical"):
        u = evolution_operator(susy_hamiltonian(seqs), t)
    else:
        raise RegimeError(f"unknown evolution {evolution!r}")
    return (u.apply(before.vector) - after.vector).norm()


def intensity_sqrt_operator(state: CoherentState) -> BlockOperator:
    """Blockwise ``sqrt(Jj) * identity`` matching the state's intensities."""
    dim = state.space.dim
    blocks = [np.sqrt(j) * np.eye(dim, dtype=complex) for j in state.params.intensities]
    return BlockOperator.from_blocks(blocks)


def eigenstate_residual(
    state: CoherentState,
    lowering: BlockOperator,
    exclude_top: int = EIGENSTATE_EXCLUDE_TOP,
) -> float:
    """Windowed norm of ``A psi - sqrt(J) psi``.

    The lowering operator must be built at the same gamma as the state for
    this to vanish; a mismatched gamma is allowed input and simply produces a
    large residual.  The top levels are excluded because the truncated ladder
    cannot reproduce the coefficient recursion there.
    """
    if lowering.space != state.space:
        raise DimensionMismatchError("state and operator live on different spaces")
    diff = lowering.apply(state.vector) - intensity_sqrt_operator(state).apply(state.vector)
    mask = window_mask(state.space, exclude_top)
    return float(np.linalg.norm(diff.data[mask]))


def write_coefficients(state: CoherentState, path) -> None:
    """Dump the coefficient table as delimited text: sector, level, re, im."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# sector\tlevel\tre\tim\n")
        for j in range(state.space.sectors):
            block = state.vector.block(j)
            for n, z in enumerate(block):
                fh.write(f"{j}\t{n}\t{z.real:.17g}\t{z.imag:.17g}\n")
