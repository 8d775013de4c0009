"""Eigenvalue sequences of the input Hamiltonians.

A :class:`SpectralSequence` holds the lowest ``dim`` eigenvalues of one
Hamiltonian (strictly increasing, nonnegative ground level).  Shifting
subtracts the ground level so that running factorial products
``e[1]*e[2]*...*e[n]`` are well defined; those products are the series
denominators used everywhere else in the library.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NegativeGroundError,
    NonMonotoneError,
    SpectraNotDisjointError,
)

__all__ = [
    "SpectralSequence",
    "ShiftedSequence",
    "FactorialCache",
    "DisjointnessReport",
    "RadiusEstimate",
    "make_sequence",
    "linear_sequence",
    "quon_sequence",
    "quon_numbers",
    "sequence_from_config",
    "shift",
    "factorials",
    "eds_check",
    "radius_estimate",
]

#: default gap below which two eigenvalues count as colliding
EDS_TOLERANCE = 1e-9


def _readonly(a):
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpectralSequence:
    """Strictly increasing eigenvalue sequence with nonnegative ground level.

    ``scale`` records the frequency used by the closed-form constructors
    (``linear_sequence`` / ``quon_sequence``); the entries of ``values`` are
    the actual eigenvalues, scale included.
    """

    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def ground(self) -> float:
        return float(self.values[0])


@dataclass(frozen=True)
class ShiftedSequence:
    """A spectral sequence with its ground level subtracted off."""

    base: SpectralSequence
    values: np.ndarray
    shift: float

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_sequence(self) -> SpectralSequence:
        """The shifted values reinterpreted as a sequence in their own right."""
        return SpectralSequence(self.values.copy(), scale=self.base.scale)


@dataclass(frozen=True)
class FactorialCache:
    """Running products ``p[n] = e[1]*e[2]*...*e[n]`` with ``p[0] = 1``.

    Kept in both linear and log domain.  The linear entries may overflow to
    ``inf``; above that point :meth:`log_product` is the authoritative value
    and :meth:`product` refuses to answer.
    """

    products: np.ndarray
    log_products: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "products", _readonly(self.products))
        object.__setattr__(self, "log_products", _readonly(self.log_products))

    def product(self, n: int) -> float:
        value = self.products[n]
        if not np.isfinite(value):
            raise OverflowError(
                f"factorial product at n={n} exceeds float range; "
                "use log_product instead"
            )
        return float(value)

    def log_product(self, n: int) -> float:
        return float(self.log_products[n])


@dataclass(frozen=True)
class DisjointnessReport:
    """Result of the pairwise spectral-collision scan."""

    disjoint: bool
    min_gap: float
    pair: tuple[int, int]
    tol: float


@dataclass(frozen=True)
class RadiusEstimate:
    """Advisory guess at ``lim e[n]`` from a finite prefix.

    ``flag`` is one of ``divergent``, ``bounded-suspect`` or
    ``insufficient-data``; ``limit`` is only set for ``bounded-suspect``.
    This is a heuristic report, never a hard error.
    """

    last_value: float
    flag: str
    limit: float | None = field(default=None)


def make_sequence(values, scale: float = 1.0) -> SpectralSequence:
    """Validate a raw eigenvalue list into a :class:`SpectralSequence`.

    Raises
    ------
    NonMonotoneError
        if the values are not strictly increasing (or not finite).
    NegativeGroundError
        if the first value is negative.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or len(arr) < 2:
        raise NonMonotoneError("need a 1-d sequence of at least two eigenvalues")
    if not np.all(np.isfinite(arr)):
        raise NonMonotoneError("eigenvalues must be finite")
    if not np.all(np.diff(arr) > 0):
        raise NonMonotoneError("eigenvalues must be strictly increasing")
    if arr[0] < 0:
        raise NegativeGroundError(f"ground level {arr[0]} is negative")
    if not (scale > 0):
        raise NonMonotoneError(f"scale must be positive, got {scale}")
    return SpectralSequence(arr, scale=float(scale))


def linear_sequence(dim: int, omega: float = 1.0, offset: float = 0.0) -> SpectralSequence:
    """Equally spaced spectrum ``e[n] = omega*n + offset``."""
    return make_sequence(omega * np.arange(dim, dtype=float) + offset, scale=omega)


def quon_numbers(dim: int, q: float) -> np.ndarray:
    """Deformed integers ``[n]_q`` via the recurrence ``[n+1] = 1 + q*[n]``.

    The recurrence is exact at q = 1 where the closed form (1-q^n)/(1-q)
    degenerates.
    """
    out = np.empty(dim, dtype=float)
    out[0] = 0.0
    for n in range(1, dim):
        out[n] = 1.0 + q * out[n - 1]
    return out


def quon_sequence(dim: int, q: float, omega: float = 1.0, offset: float = 0.0) -> SpectralSequence:
    """Deformed spectrum ``e[n] = omega*[n]_q + offset`` for q in (0, 1]."""
    if not (0 < q <= 1):
        raise NonMonotoneError(f"quon spectrum needs q in (0, 1], got {q}")
    return make_sequence(omega * quon_numbers(dim, q) + offset, scale=omega)


def sequence_from_config(spec: dict, dim: int | None = None) -> SpectralSequence:
    """Build a sequence from a config mapping.

    Recognized forms::

        {"form": "linear", "omega": w, "offset": c}
        {"form": "quon", "q": q, "omega": w, "offset": c}
        {"form": "values", "values": [...], "scale": s}

    ``dim`` is required for the closed forms (either here or as a
    ``dim`` key in the mapping).
    """
    from .errors import ConfigError

    if not isinstance(spec, dict) or "form" not in spec:
        raise ConfigError(f"spectrum spec must be a mapping with a 'form' key, got {spec!r}")
    form = spec["form"]
    n = spec.get("dim", dim)
    if form == "values":
        return make_sequence(spec["values"], scale=float(spec.get("scale", 1.0)))
    if n is None:
        raise ConfigError(f"closed-form spectrum {form!r} needs a truncation size")
    omega = float(spec.get("omega", 1.0))
    offset = float(spec.get("offset", 0.0))
    if form == "linear":
        return linear_sequence(int(n), omega, offset)
    if form == "quon":
        return quon_sequence(int(n), float(spec["q"]), omega, offset)
    raise ConfigError(f"unknown spectrum form {form!r}")


def shift(seq: SpectralSequence) -> ShiftedSequence:
    """Subtract the ground level; the result starts at exactly zero."""
    shifted = seq.values - seq.values[0]
    shifted[0] = 0.0
    return ShiftedSequence(base=seq, values=shifted, shift=seq.ground)


def factorials(shifted: ShiftedSequence) -> FactorialCache:
    """Running products of a shifted sequence, linear and log domain.

    ``products[0] = 1`` (empty product).  Entries that overflow the linear
    float range are left as ``inf``; the log-domain column never overflows
    at any truncation size of interest.
    """
    tail = shifted.values[1:]
    with np.errstate(over="ignore", divide="ignore"):
        products = np.concatenate(([1.0], np.cumprod(tail)))
        log_products = np.concatenate(([0.0], np.cumsum(np.log(tail))))
    return FactorialCache(products=products, log_products=log_products)


def eds_check(
    s1: SpectralSequence, s2: SpectralSequence, tol: float = EDS_TOLERANCE
) -> DisjointnessReport:
    """Scan all eigenvalue pairs of two spectra for collisions.

    The spectra count as (essentially) disjoint when every cross gap
    ``|e1[n] - e2[m]|`` exceeds ``tol``.  The report carries the minimizing
    pair either way.  Symmetric in its two arguments.
    """
    gaps = np.abs(s1.values[:, None] - s2.values[None, :])
    n, m = np.unravel_index(np.argmin(gaps), gaps.shape)
    min_gap = float(gaps[n, m])
    return DisjointnessReport(
        disjoint=min_gap > tol, min_gap=min_gap, pair=(int(n), int(m)), tol=tol
    )


def require_disjoint(s1, s2, tol: float = EDS_TOLERANCE) -> DisjointnessReport:
    """Like :func:`eds_check` but raising on collision."""
    report = eds_check(s1, s2, tol)
    if not report.disjoint:
        raise SpectraNotDisjointError(
            f"spectra collide at pair {report.pair} with gap {report.min_gap:.3e} <= {tol:.1e}"
        )
    return report


# a last-quartile increment is "bounded away from zero" relative to the
# largest increment of the whole prefix
_DIVERGENCE_RATIO = 1e-3


def radius_estimate(seq: SpectralSequence) -> RadiusEstimate:
    """Heuristic divergence flag for the convergence radius ``lim e[n]``.

    The limit is unknowable from a finite prefix; if the increments over the
    last quartile stay bounded away from zero the sequence is flagged
    ``divergent``, otherwise ``bounded-suspect`` together with a geometric
    extrapolation of the limit.
    """
    values = seq.values
    last = float(values[-1])
    if len(values) < 5:
        return RadiusEstimate(last_value=last, flag="insufficient-data")
    d = np.diff(values)
    quartile = d[-max(1, len(d) // 4):]
    if quartile.min() > _DIVERGENCE_RATIO * d.max():
        return RadiusEstimate(last_value=last, flag="divergent")
    ratio = d[-1] / d[-2]
    if not (0 < ratio < 1):
        # erratic tail: treat as divergent rather than guess a limit
        return RadiusEstimate(last_value=last, flag="divergent")
    limit = last + d[-1] * ratio / (1.0 - ratio)
    return RadiusEstimate(last_value=last, flag="bounded-suspect", limit=float(limit))
