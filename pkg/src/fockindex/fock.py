"""Continuous units of the time-ordered product system over F = B with
left action by the unit shift, their two-point kernels, and the associated
operator semigroups.

A unit is parameterized by a pair (zeta, beta) of algebra elements. The
kernel of two units acts on the algebra as

    b  |->  conj(zeta(s)) * b(s + 1) * zeta'(s) + (conj(beta(s)) + beta'(s)) * b(s),

which on coordinate vectors (samples..., tail) is a banded matrix: the
shift-by-one term plus a diagonal term. Kernels are materialized as dense
matrices so exponentials, norms and differences are plain linear algebra.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, GridMismatchError, GridSpec, constant

__all__ = [
    "UnsupportedParameterError",
    "FockUnit",
    "NParticleVector",
    "KernelOperator",
    "vacuum_unit",
    "generator_unit",
    "left_action",
    "module_inner",
    "unit_component",
    "multiplication_operator",
    "kernel",
    "matrix_exponential",
    "semigroup",
    "apply",
    "operator_norm",
    "gram_matrix",
    "GramReport",
    "gram_psd_check",
    "kernel_to_csv",
]


class UnsupportedParameterError(ValueError):
    """A parameter regime the component-level calculus does not cover."""


@dataclass(frozen=True, eq=False)
class FockUnit:
    """A continuous unit, parameterized by (zeta, beta) on one grid."""

    zeta: AlgebraElement
    beta: AlgebraElement

    def __post_init__(self) -> None:
        if self.zeta.grid != self.beta.grid:
            raise GridMismatchError("zeta and beta must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.zeta.grid

    def __repr__(self) -> str:
        return f"FockUnit(zeta={self.zeta!r}, beta={self.beta!r})"


def vacuum_unit(grid: GridSpec) -> FockUnit:
    """The central unital unit (0, 0)."""
    return FockUnit(constant(grid, 0.0), constant(grid, 0.0))


def generator_unit(grid: GridSpec) -> FockUnit:
    """The unit (1, 0) that generates the subsystem under study."""
    return FockUnit(constant(grid, 1.0), constant(grid, 0.0))


@dataclass(frozen=True, eq=False)
class NParticleVector:
    """An n-particle component: an algebra element carrying its particle
    count. The left action twists by the n-fold shift; the right action
    and the inner product are plain multiplication."""

    n: int
    value: AlgebraElement

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise ValueError(f"particle count must be a nonnegative integer, got {self.n!r}")


def left_action(b: AlgebraElement, x: NParticleVector) -> NParticleVector:
    """b . x = shift(b, n) * x, the twisted module action."""
    if b.grid != x.value.grid:
        raise GridMismatchError("left_action operands must share one grid")
    return NParticleVector(x.n, b.shift(x.n) * x.value)


def module_inner(x: NParticleVector, y: NParticleVector) -> AlgebraElement:
    """<x, y> = star(x.value) * y.value for equal particle counts."""
    if x.n != y.n:
        raise ValueError(f"particle-count mismatch: {x.n} vs {y.n}")
    if x.value.grid != y.value.grid:
        raise GridMismatchError("module_inner operands must share one grid")
    return x.value.star() * y.value


def unit_component(u: FockUnit, n: int) -> NParticleVector:
    """The n-particle component of a unit with beta = 0:
    value(s) = zeta(s) * zeta(s+1) * ... * zeta(s+n-1); n = 0 gives 1."""
    if np.any(u.beta.samples != 0) or u.beta.tail != 0:
        raise UnsupportedParameterError("components are only available for units with beta = 0")
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"particle count must be a nonnegative integer, got {n!r}")
    value = constant(u.grid, 1.0)
    for k in range(n):
        value = value * u.zeta.shift(k)
    return NParticleVector(int(n), value)


@dataclass(frozen=True, eq=False)
class KernelOperator:
    """A bounded operator on the discretized algebra, stored as a dense
    matrix acting on coordinate vectors (samples..., tail)."""

    grid: GridSpec
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (self.grid.dim, self.grid.dim):
            raise ValueError(f"expected a {self.grid.dim}x{self.grid.dim} matrix, got shape {matrix.shape}")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __repr__(self) -> str:
        return f"KernelOperator(m={self.grid.step_denominator}, S={self.grid.domain_end}, norm={self.operator_norm():.6g})"

    @classmethod
    def identity(cls, grid: GridSpec) -> "KernelOperator":
        return cls(grid, np.eye(grid.dim, dtype=complex))

    @classmethod
    def zero(cls, grid: GridSpec) -> "KernelOperator":
        return cls(grid, np.zeros((grid.dim, grid.dim), dtype=complex))

    def _check(self, other: "KernelOperator") -> None:
        if self.grid != other.grid:
            raise GridMismatchError("operators act on different grids")

    def __add__(self, other: "KernelOperator") -> "KernelOperator":
        self._check(other)
        return KernelOperator(self.grid, self.matrix + other.matrix)

    def __sub__(self, other: "KernelOperator") -> "KernelOperator":
        self._check(other)
        return KernelOperator(self.grid, self.matrix - other.matrix)

    def __neg__(self) -> "KernelOperator":
        return KernelOperator(self.grid, -self.matrix)

    def __mul__(self, scalar) -> "KernelOperator":
        return KernelOperator(self.grid, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "KernelOperator") -> "KernelOperator":
        self._check(other)
        return KernelOperator(self.grid, self.matrix @ other.matrix)

    def apply(self, b: AlgebraElement) -> AlgebraElement:
        if b.grid != self.grid:
            raise GridMismatchError("operand lives on a different grid")
        return AlgebraElement.from_coordinates(self.grid, self.matrix @ b.coordinates)

    def operator_norm(self) -> float:
        """Induced sup-norm on coordinates: max absolute row sum."""
        return _inf_norm(self.matrix)


def _inf_norm(matrix: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def multiplication_operator(a: AlgebraElement) -> KernelOperator:
    """The operator b |-> a*b (equal to b |-> b*a; the algebra is commutative)."""
    return KernelOperator(a.grid, np.diag(a.coordinates))


def kernel(u: FockUnit, v: FockUnit) -> KernelOperator:
    """The generator of the two-unit semigroup:
    (L b)(s) = conj(zeta_u(s)) * b(s+1) * zeta_v(s) + (conj(beta_u(s)) + beta_v(s)) * b(s),
    with the tail row acting on tails only."""
    if u.grid != v.grid:
        raise GridMismatchError("units live on different grids")
    grid = u.grid
    n = grid.size
    m = grid.step_denominator
    matrix = np.zeros((grid.dim, grid.dim), dtype=complex)
    weight = np.conj(u.zeta.samples) * v.zeta.samples
    diagonal = np.conj(u.beta.samples) + v.beta.samples
    for k in range(n):
        col = k + m if k + m < n else n
        matrix[k, col] += weight[k]
        matrix[k, k] += diagonal[k]
    matrix[n, n] = np.conj(u.zeta.tail) * v.zeta.tail + np.conj(u.beta.tail) + v.beta.tail
    return KernelOperator(grid, matrix)


def matrix_exponential(matrix: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Scaling-and-squaring exponential with a truncated Taylor series.

    The input is scaled by a power of two until its row-sum norm is at
    most 1/2, the series is summed until the next term falls below
    ``rel_tol`` relative to the running sum, and the result is squared
    back up. Deterministic for fixed input.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    norm = _inf_norm(a)
    squarings = 0
    if norm > 0.5:
        squarings = int(math.ceil(math.log2(norm))) + 1
    scaled = a / (2.0**squarings)
    dim = a.shape[0]
    result = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in range(1, 64):
        term = term @ scaled / k
        result = result + term
        if _inf_norm(term) <= rel_tol * _inf_norm(result):
            break
    else:
        raise RuntimeError("matrix exponential series did not converge in 64 terms")
    for _ in range(squarings):
        result = result @ result
    return result


def semigroup(u: FockUnit, v: FockUnit, t: float, rel_tol: float = 1e-12) -> KernelOperator:
    """exp(t * kernel(u, v)) for t >= 0."""
    t = float(t)
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    generator = kernel(u, v)
    return KernelOperator(u.grid, matrix_exponential(t * generator.matrix, rel_tol=rel_tol))


def apply(operator: KernelOperator, b: AlgebraElement) -> AlgebraElement:
    return operator.apply(b)


def operator_norm(operator: KernelOperator) -> float:
    return operator.operator_norm()


def gram_matrix(units, t: float, b: AlgebraElement) -> list:
    """The matrix with (i, j) entry exp(t*kernel(u_i, u_j)) applied to b;
    b must be positive for the positivity check downstream to be meaningful."""
    if not b.is_positive():
        raise ValueError("gram_matrix needs a positive element b")
    units = list(units)
    return [[semigroup(ui, uj, t).apply(b) for uj in units] for ui in units]


@dataclass(frozen=True)
class GramReport:
    """Pointwise minimum eigenvalues of a unit Gram matrix."""

    passed: bool
    min_eigenvalue: float
    argmin_point: object
    entries: tuple

    def json_entries(self) -> list:
        return [{"grid_point": point, "min_eigenvalue": value} for point, value in self.entries]


def gram_psd_check(gram, tol: float) -> GramReport:
    """Check that the numeric matrix [G_ij(s)] is PSD at every grid point
    and at the tail, up to ``tol``; the input must be Hermitian up to tol."""
    k = len(gram)
    if any(len(row) != k for row in gram):
        raise ValueError("gram matrix must be square")
    if k == 0:
        return GramReport(True, 0.0, None, ())
    grid = gram[0][0].grid
    for i in range(k):
        for j in range(k):
            if (gram[i][j] - gram[j][i].star()).sup_norm() > tol:
                raise ValueError(f"gram matrix is not Hermitian up to {tol} at entry ({i}, {j})")
    stacked = np.empty((grid.dim, k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            stacked[:, i, j] = gram[i][j].coordinates
    hermitized = 0.5 * (stacked + np.conj(np.transpose(stacked, (0, 2, 1))))
    eigenvalues = np.linalg.eigvalsh(hermitized)
    minima = eigenvalues[:, 0]
    labels = [float(s) for s in grid.points()] + ["tail"]
    entries = tuple((labels[p], float(minima[p])) for p in range(grid.dim))
    worst = int(np.argmin(minima))
    return GramReport(bool(minima[worst] >= -tol), float(minima[worst]), labels[worst], entries)


def kernel_to_csv(operator: KernelOperator, path) -> None:
    """Dense matrix dump for debugging; one complex entry per cell."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in operator.matrix:
            writer.writerow([str(z) for z in row])
