"""Truncated sector space, block operators, and ladder realizations.

The working arena is ``C^N (x) H_D``: ``N`` sectors of one truncated
``D``-level space each.  Vectors and operators are stored flat (sector-major,
``flat index = sector*D + level``) with block accessors.  All values are
immutable after construction; every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadDeformationError,
    DimensionMismatchError,
    LengthMismatchError,
    NonPositiveDerivativeError,
    NotHermitianError,
    RegimeError,
)
from .spectra import ShiftedSequence, SpectralSequence, quon_numbers

__all__ = [
    "SectorSpace",
    "SusyVector",
    "BlockOperator",
    "LadderRealization",
    "GridSpec",
    "basis_vector",
    "gk_ladder",
    "lowering_operator",
    "eds_lowering_operator",
    "delta_lowering_operator",
    "boson_ladder",
    "quon_ladder",
    "grid_ladder",
    "susy_hamiltonian",
    "shifted_hamiltonian",
    "evolution_operator",
    "delta_evolution_operator",
    "window_mask",
    "window_levels",
    "max_abs",
    "write_complex_matrix",
    "read_complex_matrix",
]

HERMITIAN_TOL = 1e-12

#: extra levels excluded from the valid window beyond the ladder degree
WINDOW_BUFFER = 2


def max_abs(m) -> float:
    """Entrywise max-norm, the norm used by all operator residuals."""
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


@dataclass(frozen=True)
class SectorSpace:
    """``sectors`` copies of a ``dim``-level truncated space."""

    sectors: int
    dim: int

    def __post_init__(self):
        if self.sectors < 1 or self.dim < 2:
            raise DimensionMismatchError(
                f"need sectors >= 1 and dim >= 2, got {self.sectors}, {self.dim}"
            )

    @property
    def total_dim(self) -> int:
        return self.sectors * self.dim

    def flat_index(self, sector: int, level: int) -> int:
        return sector * self.dim + level


@dataclass(frozen=True)
class SusyVector:
    """Coefficient vector on the sector space, stored flat (sector-major)."""

    space: SectorSpace
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (self.space.total_dim,):
            raise DimensionMismatchError(
                f"vector length {data.shape} does not match space {self.space}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def block(self, sector: int) -> np.ndarray:
        d = self.space.dim
        return self.data[sector * d : (sector + 1) * d]

    def inner(self, other: "SusyVector") -> complex:
        """Sector-summed inner product <self, other> (conjugate-linear left)."""
        if self.space != other.space:
            raise DimensionMismatchError("vectors live on different spaces")
        return complex(np.vdot(self.data, other.data))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __sub__(self, other: "SusyVector") -> "SusyVector":
        if self.space != other.space:
            raise DimensionMismatchError("vectors live on different spaces")
        return SusyVector(self.space, self.data - other.data)

    def __add__(self, other: "SusyVector") -> "SusyVector":
        if self.space != other.space:
            raise DimensionMismatchError("vectors live on different spaces")
        return SusyVector(self.space, self.data + other.data)

    def __rmul__(self, scalar) -> "SusyVector":
        return SusyVector(self.space, scalar * self.data)


@dataclass(frozen=True)
class BlockOperator:
    """Operator on the sector space, stored as one dense complex matrix."""

    space: SectorSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.total_dim
        if m.shape != (n, n):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} does not match space dimension {n}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_blocks(cls, blocks) -> "BlockOperator":
        """Block-diagonal operator from a list of equal-size square blocks."""
        dims = {b.shape for b in blocks}
        if len(dims) != 1 or any(b.shape[0] != b.shape[1] for b in blocks):
            raise LengthMismatchError("blocks must be square and equally sized")
        d = blocks[0].shape[0]
        space = SectorSpace(len(blocks), d)
        m = np.zeros((space.total_dim, space.total_dim), dtype=complex)
        for j, b in enumerate(blocks):
            m[j * d : (j + 1) * d, j * d : (j + 1) * d] = b
        return cls(space, m)

    @classmethod
    def single_sector(cls, matrix) -> "BlockOperator":
        return cls.from_blocks([np.asarray(matrix, dtype=complex)])

    def block(self, i: int, j: int) -> np.ndarray:
        d = self.space.dim
        return self.matrix[i * d : (i + 1) * d, j * d : (j + 1) * d]

    def adjoint(self) -> "BlockOperator":
        return BlockOperator(self.space, self.matrix.conj().T)

    def apply(self, vec: SusyVector) -> SusyVector:
        if vec.space != self.space:
            raise DimensionMismatchError("operator and vector spaces differ")
        return SusyVector(self.space, self.matrix @ vec.data)

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        if self.space != other.space:
            raise DimensionMismatchError("operator spaces differ")
        return BlockOperator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        if self.space != other.space:
            raise DimensionMismatchError("operator spaces differ")
        return BlockOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        if self.space != other.space:
            raise DimensionMismatchError("operator spaces differ")
        return BlockOperator(self.space, self.matrix - other.matrix)

    def hermitian_defect(self) -> float:
        return max_abs(self.matrix - self.matrix.conj().T)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermitian_defect() < tol

    def is_block_diagonal(self, tol: float = 0.0) -> bool:
        n = self.space.sectors
        return all(
            max_abs(self.block(i, j)) <= tol
            for i in range(n)
            for j in range(n)
            if i != j
        )


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1-d grid on [xmin, xmax] with a fixed number of points."""

    xmin: float
    xmax: float
    points: int

    def __post_init__(self):
        if self.points < 64:
            raise NonPositiveDerivativeError(
                f"grid needs at least 64 points, got {self.points}"
            )
        if not self.xmax > self.xmin:
            raise NonPositiveDerivativeError("grid needs xmax > xmin")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.points)

    @property
    def dx(self) -> float:
        return (self.xmax - self.xmin) / (self.points - 1)


@dataclass(frozen=True)
class LadderRealization:
    """One concrete lowering operator on a single sector.

    ``kind`` is one of ``gk``, ``boson``, ``quon``, ``grid``.  ``diagnostics``
    records the deviation of the realization's commutation relation from its
    ideal form (truncation or discretization artifacts).
    """

    kind: str
    matrix: np.ndarray
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def basis_vector(space: SectorSpace, sector: int, level: int) -> SusyVector:
    """Unit vector with a single 1 at ``level`` of block ``sector``."""
    if not (0 <= sector < space.sectors):
        raise IndexError(f"sector {sector} outside 0..{space.sectors - 1}")
    if not (0 <= level < space.dim):
        raise IndexError(f"level {level} outside 0..{space.dim - 1}")
    data = np.zeros(space.total_dim, dtype=complex)
    data[space.flat_index(sector, level)] = 1.0
    return SusyVector(space, data)


def _phase_twisted_lowering(amplitudes, diffs, gamma, sign=+1.0):
    """D x D lowering matrix: entry (n-1, n) = amp[n] * exp(sign*i*diffs[n]*gamma)."""
    d = len(amplitudes)
    m = np.zeros((d, d), dtype=complex)
    n = np.arange(1, d)
    m[n - 1, n] = np.sqrt(amplitudes[1:]) * np.exp(sign * 1j * diffs * gamma)
    return m


def gk_ladder(shifted: ShiftedSequence, gamma: float) -> LadderRealization:
    """Single-sector lowering operator of the abstract coherent-state family.

    Acts as ``sqrt(e~[n]) * exp(i*(e[n]-e[n-1])*gamma)`` on level ``n``,
    mapping it to ``n-1``; the ground level is annihilated.  Eigenvalue
    differences are shift-invariant, so the shifted values determine the
    phases as well.
    """
    diffs = np.diff(shifted.values)
    m = _phase_twisted_lowering(shifted.values, diffs, gamma)
    return LadderRealization(kind="gk", matrix=m, params={"gamma": gamma})


def lowering_operator(seqs, gamma: float) -> BlockOperator:
    """Block-diagonal lowering operator, one phase-twisted ladder per sector.

    Parameters
    ----------
    seqs : list of ShiftedSequence
        One shifted spectrum per sector (any number of sectors).
    gamma : float
        Phase parameter shared by all sectors.
    """
    if not seqs:
        raise LengthMismatchError("need at least one sector sequence")
    dims = {s.dim for s in seqs}
    if len(dims) != 1:
        raise LengthMismatchError(f"sector truncations differ: {sorted(dims)}")
    blocks = [gk_ladder(s, gamma).matrix for s in seqs]
    return BlockOperator.from_blocks(blocks)


def eds_lowering_operator(seqs, gamma: float) -> BlockOperator:
    """Two-sector lowering operator of the shift-based (delta-free) family.

    Both sectors carry the same phase sign; the matrix coincides entrywise
    with :func:`lowering_operator` on the same inputs.
    """
    if len(seqs) != 2:
        raise LengthMismatchError(f"this family is two-sector, got {len(seqs)}")
    return lowering_operator(seqs, gamma)


def delta_lowering_operator(seqs, gamma: float) -> BlockOperator:
    """Two-sector lowering operator of the delta-regularized family.

    Requires both spectra to start at exactly zero.  The two sectors carry
    opposite phase signs (plus in the first, minus in the second); this is a
    genuinely different operator from :func:`eds_lowering_operator` whenever
    ``gamma != 0``.
    """
    if len(seqs) != 2:
        raise LengthMismatchError(f"this family is two-sector, got {len(seqs)}")
    dims = {s.dim for s in seqs}
    if len(dims) != 1:
        raise LengthMismatchError(f"sector truncations differ: {sorted(dims)}")
    for j, s in enumerate(seqs):
        if not isinstance(s, SpectralSequence):
            raise RegimeError("delta family takes unshifted sequences starting at zero")
        if s.ground != 0.0:
            raise RegimeError(
                f"sector {j} ground level {s.ground} != 0; "
                "the delta family lives in the zero-ground regime"
            )
    signs = (+1.0, -1.0)
    blocks = [
        _phase_twisted_lowering(s.values, np.diff(s.values), gamma, sign)
        for s, sign in zip(seqs, signs)
    ]
    return BlockOperator.from_blocks(blocks)


def boson_ladder(dim: int) -> LadderRealization:
    """Standard Fock lowering matrix ``a|n> = sqrt(n)|n-1>``.

    On the truncated space ``[a, a+] = 1`` holds exactly below the top level;
    the top diagonal entry of the commutator is ``-dim`` instead of ``+1``
    (recorded in the diagnostics).
    """
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)
    comm = a @ a.conj().T - a.conj().T @ a
    defect = comm - np.eye(dim)
    return LadderRealization(
        kind="boson",
        matrix=a,
        diagnostics={
            "commutator_defect_interior": max_abs(defect[: dim - 1, : dim - 1]),
            "commutator_defect_top": float(defect[-1, -1].real),
        },
    )


def quon_ladder(dim: int, q: float) -> LadderRealization:
    """Deformed lowering matrix ``a|n> = sqrt([n]_q)|n-1>``.

    Satisfies ``a a+ - q a+ a = 1`` exactly below the top level; ``q = 1``
    reproduces :func:`boson_ladder`.
    """
    if not (0 < q <= 1):
        raise BadDeformationError(f"deformation q must lie in (0, 1], got {q}")
    a = np.diag(np.sqrt(quon_numbers(dim, q)[1:]), 1).astype(complex)
    defect = a @ a.conj().T - q * (a.conj().T @ a) - np.eye(dim)
    return LadderRealization(
        kind="quon",
        matrix=a,
        params={"q": q},
        diagnostics={
            "qmutator_defect_interior": max_abs(defect[: dim - 1, : dim - 1]),
            "qmutator_defect_top": float(defect[-1, -1].real),
        },
    )


def _derivative_matrix(grid: GridSpec) -> np.ndarray:
    """Central-difference first derivative, one-sided at the two boundary rows."""
    n, dx = grid.points, grid.dx
    m = np.zeros((n, n))
    i = np.arange(1, n - 1)
    m[i, i + 1] = 0.5 / dx
    m[i, i - 1] = -0.5 / dx
    m[0, 0], m[0, 1] = -1.0 / dx, 1.0 / dx
    m[-1, -2], m[-1, -1] = -1.0 / dx, 1.0 / dx
    return m


def _gaussian_probes(grid: GridSpec) -> np.ndarray:
    """Smooth confined test vectors for grid diagnostics (rows of the array)."""
    x = grid.x
    center = 0.5 * (grid.xmin + grid.xmax)
    sigma = (grid.xmax - grid.xmin) / 8.0
    u = (x - center) / sigma
    bump = np.exp(-0.5 * u * u)
    return np.vstack([bump, u * bump, (u * u - 1.0) * bump])


def grid_ladder(
    w, grid: GridSpec, hbar: float = 1.0, mass: float = 1.0
) -> LadderRealization:
    """First-order differential ladder ``a = c d/dx + W(x)``, ``c = hbar/sqrt(2m)``.

    ``w`` is the superpotential callable, sampled on the grid; its derivative
    (central differences) must be strictly positive everywhere.  The adjoint
    is the matrix adjoint, so ``[a, a+]`` approximates ``2c W'(x)`` with a
    second-order error.  The diagnostic measures that error on smooth
    confined probe vectors over interior points.
    """
    if not (hbar > 0 and mass > 0):
        raise NonPositiveDerivativeError("hbar and mass must be positive")
    x = grid.x
    w_values = np.asarray([w(xi) for xi in x], dtype=float)
    w_prime = np.gradient(w_values, grid.dx)
    if w_prime.min() <= 0:
        raise NonPositiveDerivativeError(
            f"superpotential derivative reaches {w_prime.min():.3e} <= 0 on the grid"
        )
    c = hbar / np.sqrt(2.0 * mass)
    a = (c * _derivative_matrix(grid) + np.diag(w_values)).astype(complex)

    comm = a @ a.conj().T - a.conj().T @ a
    target = 2.0 * c * np.diag(w_prime).astype(complex)
    probes = _gaussian_probes(grid)
    # rows within 2 of the boundary carry one-sided-stencil corrections of
    # size O(1/dx^2); beyond that the derivative-matrix self-commutator
    # cancels exactly and only the O(dx^2) Taylor error remains
    interior = slice(3, grid.points - 3)
    resid = 0.0
    for phi in probes:
        err = (comm - target) @ phi
        resid = max(resid, np.abs(err[interior]).max() / np.abs(phi).max())
    return LadderRealization(
        kind="grid",
        matrix=a,
        params={"hbar": hbar, "mass": mass, "c": c, "grid": grid},
        diagnostics={
            "commutator_probe_residual": float(resid),
            "w_values": w_values,
            "w_prime": w_prime,
        },
    )


def susy_hamiltonian(seqs) -> BlockOperator:
    """Block-diagonal Hamiltonian with the given spectra on the sectors."""
    return BlockOperator.from_blocks([np.diag(s.values).astype(complex) for s in seqs])


def shifted_hamiltonian(seqs) -> BlockOperator:
    """The Hamiltonian minus its per-sector ground levels (each block starts at 0)."""
    return BlockOperator.from_blocks(
        [np.diag(s.values - s.values[0]).astype(complex) for s in seqs]
    )


def evolution_operator(t_op: BlockOperator, t: float) -> BlockOperator:
    """Unitary ``exp(-i T t)`` of a Hermitian block operator.

    Computed by eigendecomposition (per diagonal block when the operator is
    block diagonal), which is stable for every ``t``.
    """
    if not t_op.is_hermitian():
        raise NotHermitianError(
            f"operator deviates from Hermitian by {t_op.hermitian_defect():.3e}"
        )
    def expm_block(b):
        evals, vecs = np.linalg.eigh(b)
        return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T

    if t_op.is_block_diagonal():
        blocks = [expm_block(t_op.block(j, j)) for j in range(t_op.space.sectors)]
        return BlockOperator.from_blocks(blocks)
    return BlockOperator(t_op.space, expm_block(t_op.matrix))


def delta_evolution_operator(seqs, delta: float, t: float) -> BlockOperator:
    """The ad-hoc two-sector evolution of the delta family.

    First sector evolves as ``exp(-i (h1 + delta) t)``, second as
    ``exp(+i (h2 + delta) t)``; this is NOT ``exp(-i H t)`` and only this
    operator maps the delta family onto itself with shifted gamma.
    """
    if len(seqs) != 2:
        raise LengthMismatchError(f"this evolution is two-sector, got {len(seqs)}")
    phases = [
        np.exp(-1j * (seqs[0].values + delta) * t),
        np.exp(+1j * (seqs[1].values + delta) * t),
    ]
    return BlockOperator.from_blocks([np.diag(p) for p in phases])


def window_levels(space: SectorSpace, exclude_top: int) -> int:
    """Number of levels per sector inside the valid window."""
    keep = space.dim - exclude_top
    if keep < 1:
        raise DimensionMismatchError(
            f"window excludes all {space.dim} levels (exclude_top={exclude_top})"
        )
    return keep


def window_mask(space: SectorSpace, exclude_top: int) -> np.ndarray:
    """Boolean mask (flat indexing) selecting the valid window of every sector.

    Operator identities that involve ``k`` raising/lowering steps hold on the
    truncated space only below the top ``k + buffer`` levels; restricting
    residuals to this window isolates truncation artifacts.
    """
    keep = window_levels(space, exclude_top)
    mask = np.zeros(space.total_dim, dtype=bool)
    for j in range(space.sectors):
        mask[j * space.dim : j * space.dim + keep] = True
    return mask


def write_complex_matrix(path, matrix) -> None:
    """Dense complex matrix export: a "rows cols" header line, then one line
    per row of whitespace-separated "re,im" entries."""
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m.shape[0]} {m.shape[1]}\n")
        for row in m:
            fh.write(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) + "\n")


def read_complex_matrix(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        rows, cols = (int(tok) for tok in fh.readline().split())
        m = np.empty((rows, cols), dtype=complex)
        for i in range(rows):
            entries = fh.readline().split()
            if len(entries) != cols:
                raise ValueError(f"row {i}: expected {cols} entries, got {len(entries)}")
            for j, tok in enumerate(entries):
                re, im = tok.split(",")
                m[i, j] = complex(float(re), float(im))
    return m
