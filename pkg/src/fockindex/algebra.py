"""Grid-sampled model of the commutative unital C*-algebra of continuous
functions on [0, inf) that converge at infinity.

An element is stored as complex samples on the uniform grid
{k/m : 0 <= k <= S*m} together with an explicit ``tail`` value, the limit
at infinity. The grid step 1/m divides 1 exactly, so shifts by integers
(and by any nonnegative multiple of the step) map grid points onto grid
points; samples pushed past the right edge are read from the tail. That
substitution is exact whenever the function already equals its tail on the
truncated part, and otherwise introduces an error of order
``|samples[-1] - tail|``, which is surfaced through the resolution flag
and :class:`UnresolvedTailWarning`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TAIL_TOLERANCE",
    "POSITIVITY_TOLERANCE",
    "GridMismatchError",
    "UnresolvedTailWarning",
    "GridSpec",
    "AlgebraElement",
    "constant",
    "pointwise",
    "star",
    "shift",
    "sup_norm",
    "is_positive",
    "limit_at_infinity",
    "reciprocal",
]

TAIL_TOLERANCE = 1e-9
POSITIVITY_TOLERANCE = 1e-10

_SCALARS = (int, float, complex, np.integer, np.floating, np.complexfloating)


class GridMismatchError(ValueError):
    """Operands live on different grids, or a shift is not grid-aligned."""


class UnresolvedTailWarning(UserWarning):
    """An element's last sample is far from its declared tail value."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, S] with step 1/m, plus one slot for the tail.

    ``step_denominator`` is m (step h = 1/m) and ``domain_end`` is S; the
    samples sit at k/m for k = 0..S*m. Both must be positive integers so
    that the unit shift moves samples by exactly m slots.
    """

    step_denominator: int
    domain_end: int

    def __post_init__(self) -> None:
        if not isinstance(self.step_denominator, (int, np.integer)) or self.step_denominator < 1:
            raise ValueError(f"step_denominator must be a positive integer, got {self.step_denominator!r}")
        if not isinstance(self.domain_end, (int, np.integer)) or self.domain_end < 1:
            raise ValueError(f"domain_end must be a positive integer, got {self.domain_end!r}")

    @property
    def step(self) -> float:
        return 1.0 / self.step_denominator

    @property
    def size(self) -> int:
        """Number of samples, S*m + 1."""
        return self.domain_end * self.step_denominator + 1

    @property
    def dim(self) -> int:
        """Coordinate dimension: all samples plus the tail slot."""
        return self.size + 1

    def points(self) -> np.ndarray:
        """The sample abscissae k/m as a float array."""
        return np.arange(self.size) / self.step_denominator

    def offset_of(self, t) -> int:
        """Sample offset of the grid-aligned time ``t`` >= 0."""
        k = float(t) * self.step_denominator
        k_int = int(round(k))
        if abs(k - k_int) > 1e-12:
            raise GridMismatchError(f"shift {t!r} is not a multiple of the grid step 1/{self.step_denominator}")
        if k_int < 0:
            raise GridMismatchError(f"shift must be nonnegative, got {t!r}")
        return k_int


def _warn_unresolved(*elements: "AlgebraElement") -> None:
    for e in elements:
        if not e.is_resolved:
            warnings.warn(
                f"operating on an unresolved element: |samples[-1] - tail| = "
                f"{abs(e.samples[-1] - e.tail):.3e} exceeds {TAIL_TOLERANCE:.1e}; "
                "results that read past the grid edge inherit this error",
                UnresolvedTailWarning,
                stacklevel=3,
            )


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A grid-sampled function with an explicit limit at infinity.

    Immutable; all operations return new elements. Binary operations
    require operands on the same :class:`GridSpec`.
    """

    grid: GridSpec
    samples: np.ndarray
    tail: complex

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} samples, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        tail = complex(self.tail)
        if not (np.isfinite(tail.real) and np.isfinite(tail.imag)):
            raise ValueError("tail must be finite")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "tail", tail)

    def __repr__(self) -> str:
        return (
            f"AlgebraElement(m={self.grid.step_denominator}, S={self.grid.domain_end}, "
            f"samples[0]={self.samples[0]:.6g}, samples[-1]={self.samples[-1]:.6g}, tail={self.tail:.6g})"
        )

    # -- resolution soundness ------------------------------------------------

    @property
    def is_resolved(self) -> bool:
        """Whether the last sample agrees with the tail within TAIL_TOLERANCE."""
        return bool(abs(self.samples[-1] - self.tail) <= TAIL_TOLERANCE)

    # -- coordinates ----------------------------------------------------------

    @property
    def coordinates(self) -> np.ndarray:
        """The coordinate vector (samples..., tail), length grid.dim."""
        return np.concatenate([self.samples, [self.tail]])

    @classmethod
    def from_coordinates(cls, grid: GridSpec, coords: np.ndarray) -> "AlgebraElement":
        coords = np.asarray(coords, dtype=complex)
        if coords.shape != (grid.dim,):
            raise ValueError(f"expected {grid.dim} coordinates, got shape {coords.shape}")
        return cls(grid, coords[:-1], coords[-1])

    def value_at(self, t) -> complex:
        """Sample value at the grid-aligned point ``t``."""
        k = self.grid.offset_of(t)
        if k >= self.grid.size:
            raise GridMismatchError(f"point {t!r} is beyond the grid end {self.grid.domain_end}")
        return complex(self.samples[k])

    # -- arithmetic -----------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, AlgebraElement):
            if other.grid != self.grid:
                raise GridMismatchError(f"grid mismatch: {self.grid} vs {other.grid}")
            return other
        if isinstance(other, _SCALARS):
            return constant(self.grid, complex(other))
        return None

    def __add__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        _warn_unresolved(self, rhs)
        return AlgebraElement(self.grid, self.samples + rhs.samples, self.tail + rhs.tail)

    __radd__ = __add__

    def __sub__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        _warn_unresolved(self, rhs)
        return AlgebraElement(self.grid, self.samples - rhs.samples, self.tail - rhs.tail)

    def __rsub__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return rhs.__sub__(self)

    def __mul__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        _warn_unresolved(self, rhs)
        return AlgebraElement(self.grid, self.samples * rhs.samples, self.tail * rhs.tail)

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(self.grid, -self.samples, -self.tail)

    def __truediv__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return self.__mul__(rhs.reciprocal())

    def __rtruediv__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return rhs.__mul__(self.reciprocal())

    def star(self) -> "AlgebraElement":
        """Pointwise complex conjugate (the involution of the algebra)."""
        return AlgebraElement(self.grid, np.conj(self.samples), np.conj(self.tail))

    def shift(self, t) -> "AlgebraElement":
        """Left shift: the result samples b at s + t; t >= 0 on the grid.

        Samples pushed past the grid end are read from the tail; the tail
        itself is unchanged.
        """
        offset = self.grid.offset_of(t)
        if offset == 0:
            return self
        _warn_unresolved(self)
        n = self.grid.size
        shifted = np.empty(n, dtype=complex)
        if offset < n:
            shifted[: n - offset] = self.samples[offset:]
            shifted[n - offset :] = self.tail
        else:
            shifted[:] = self.tail
        return AlgebraElement(self.grid, shifted, self.tail)

    def sup_norm(self) -> float:
        """The C*-norm: max of |value| over all samples and the tail."""
        return float(max(np.max(np.abs(self.samples)), abs(self.tail)))

    def is_positive(self, tol: float = POSITIVITY_TOLERANCE) -> bool:
        """True iff every value has |imag| <= tol and real part >= -tol."""
        coords = self.coordinates
        return bool(np.all(np.abs(coords.imag) <= tol) and np.all(coords.real >= -tol))

    def limit_at_infinity(self) -> complex:
        return self.tail

    def reciprocal(self, min_modulus: float = 1e-14) -> "AlgebraElement":
        """Pointwise inverse; fails if any value is within min_modulus of 0."""
        coords = self.coordinates
        small = np.min(np.abs(coords))
        if small < min_modulus:
            raise ValueError(f"element is not invertible: min |value| = {small:.3e}")
        return AlgebraElement(self.grid, 1.0 / self.samples, 1.0 / self.tail)


def constant(grid: GridSpec, value) -> AlgebraElement:
    """The constant function ``value``; constant(grid, 1) is the unit."""
    value = complex(value)
    return AlgebraElement(grid, np.full(grid.size, value, dtype=complex), value)


def pointwise(op: str, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Entrywise add/mul/sub of two elements on the same grid."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "sub":
        return a - b
    raise ValueError(f"unknown pointwise operation {op!r}; expected add, mul or sub")


def star(b: AlgebraElement) -> AlgebraElement:
    return b.star()


def shift(b: AlgebraElement, t) -> AlgebraElement:
    return b.shift(t)


def sup_norm(b: AlgebraElement) -> float:
    return b.sup_norm()


def is_positive(b: AlgebraElement, tol: float = POSITIVITY_TOLERANCE) -> bool:
    return b.is_positive(tol)


def limit_at_infinity(b: AlgebraElement) -> complex:
    return b.limit_at_infinity()


def reciprocal(b: AlgebraElement, min_modulus: float = 1e-14) -> AlgebraElement:
    return b.reciprocal(min_modulus)
