"""Bimodule calculus on continuous units relative to a reference unit.

Every operation here is carried out twice. The formula path combines the
operands' kernels (sums, and compositions with multiplication operators)
exactly as the kernel-level definitions prescribe; the parameter path
writes down the (zeta, beta) pair the result must have. The two paths are
kept side by side on the result so their agreement can be checked against
a probe battery, rather than assumed.

Scalar multiplication and subtraction are realized through the module
operations themselves: alpha*x is left multiplication by the constant
alpha, and x - y is add(x, (-1)*y).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgebraElement, GridSpec, constant
from .fock import FockUnit, KernelOperator, kernel, multiplication_operator
from .presets import exp_approach, exp_decay

__all__ = [
    "ReferencedUnit",
    "wrap",
    "default_probe_units",
    "power_beta",
    "boxplus_left",
    "boxplus_right",
    "add",
    "left_mul",
    "right_mul",
    "scalar_mul",
    "subtract",
    "semi_inner",
    "index_norm",
    "equivalent",
    "dual_path_residual",
]

COEFFICIENT_SUM_TOLERANCE = 1e-12


def _units_equal(a: FockUnit, b: FockUnit) -> bool:
    return (
        a.grid == b.grid
        and np.array_equal(a.zeta.samples, b.zeta.samples)
        and a.zeta.tail == b.zeta.tail
        and np.array_equal(a.beta.samples, b.beta.samples)
        and a.beta.tail == b.beta.tail
    )


@dataclass(frozen=True, eq=False)
class ReferencedUnit:
    """A unit together with the reference against which the bimodule
    operations and the semi-inner product are formed.

    ``unit`` is the parameter-path representation. ``cross_kernel`` gives
    the formula-path kernel against an arbitrary probe unit, and
    ``self_kernel`` the formula-path diagonal kernel; for a plain wrapped
    unit both fall back to the kernel of ``unit`` itself.
    """

    unit: FockUnit
    reference: FockUnit
    _cross: Callable[[FockUnit], KernelOperator] | None = field(default=None, repr=False, compare=False)
    _self: Callable[[], KernelOperator] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.unit.grid != self.reference.grid:
            raise ValueError("unit and reference must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.unit.grid

    @property
    def zeta(self) -> AlgebraElement:
        return self.unit.zeta

    @property
    def beta(self) -> AlgebraElement:
        return self.unit.beta

    def cross_kernel(self, probe: FockUnit) -> KernelOperator:
        if self._cross is None:
            return kernel(self.unit, probe)
        return self._cross(probe)

    def self_kernel(self) -> KernelOperator:
        if self._self is None:
            return kernel(self.unit, self.unit)
        return self._self()

    def parameter_kernel(self, probe: FockUnit) -> KernelOperator:
        return kernel(self.unit, probe)


def wrap(unit: FockUnit, reference: FockUnit) -> ReferencedUnit:
    return ReferencedUnit(unit, reference)


def _check_same_reference(x: ReferencedUnit, y: ReferencedUnit) -> None:
    if not _units_equal(x.reference, y.reference):
        raise ValueError("reference mismatch: operands carry different reference units")


def default_probe_units(grid: GridSpec) -> list[FockUnit]:
    """Six probes covering constant, decaying and complex parameters."""
    zero = constant(grid, 0.0)
    one = constant(grid, 1.0)
    return [
        FockUnit(zero, zero),
        FockUnit(one, zero),
        FockUnit(exp_approach(grid, 1.0, 1.0), zero),
        FockUnit(constant(grid, 2.0), one),
        FockUnit(exp_approach(grid, complex(0.5, 0.5), 1.0), constant(grid, 1j)),
        FockUnit(exp_decay(grid, 1.0, 1.0, 0.5), exp_decay(grid, complex(0.2, -0.3), 0.8, 0.0)),
    ]


def power_beta(x: ReferencedUnit, beta: AlgebraElement) -> ReferencedUnit:
    """Shift a unit's beta parameter; kernels gain multiplication terms:
    against a probe, conj(beta)*id; on the diagonal, conj(beta)*id + id*beta."""
    base = x.unit
    candidate = FockUnit(base.zeta, base.beta + beta)
    mul_conj = multiplication_operator(beta.star())
    mul_plain = multiplication_operator(beta)

    def cross(probe: FockUnit) -> KernelOperator:
        return kernel(base, probe) + mul_conj

    def diagonal() -> KernelOperator:
        return kernel(base, base) + mul_conj + mul_plain

    return ReferencedUnit(candidate, x.reference, cross, diagonal)


def _check_coefficients(coefficients: Sequence[AlgebraElement], units: Sequence[FockUnit]) -> None:
    if len(coefficients) != len(units) or not units:
        raise ValueError("need one coefficient per unit and at least one unit")
    grid = units[0].grid
    total = constant(grid, 0.0)
    for c in coefficients:
        total = total + c
    if (total - constant(grid, 1.0)).sup_norm() > COEFFICIENT_SUM_TOLERANCE:
        raise ValueError("coefficients must sum to the unit element")


def boxplus_left(
    coefficients: Sequence[AlgebraElement],
    units: Sequence[FockUnit],
    reference: FockUnit,
) -> ReferencedUnit:
    """Combination with coefficients acting on the left of each unit.

    Formula path: against a probe, sum of conj(c_i) * K(u_i, probe);
    diagonal, sum of conj(c_i)*c_j * K(u_i, u_j), the multiplications
    applied to the output. Parameter path: (sum c_j zeta_j, sum c_j beta_j).
    """
    coefficients = list(coefficients)
    units = list(units)
    _check_coefficients(coefficients, units)
    grid = units[0].grid
    zeta = constant(grid, 0.0)
    beta = constant(grid, 0.0)
    for c, u in zip(coefficients, units):
        zeta = zeta + c * u.zeta
        beta = beta + c * u.beta
    candidate = FockUnit(zeta, beta)

    def cross(probe: FockUnit) -> KernelOperator:
        total = KernelOperator.zero(grid)
        for c, u in zip(coefficients, units):
            total = total + multiplication_operator(c.star()) @ kernel(u, probe)
        return total

    def diagonal() -> KernelOperator:
        total = KernelOperator.zero(grid)
        for ci, ui in zip(coefficients, units):
            for cj, uj in zip(coefficients, units):
                total = total + multiplication_operator(ci.star() * cj) @ kernel(ui, uj)
        return total

    return ReferencedUnit(candidate, reference, cross, diagonal)


def boxplus_right(
    units: Sequence[FockUnit],
    coefficients: Sequence[AlgebraElement],
    reference: FockUnit,
) -> ReferencedUnit:
    """Combination with coefficients acting on the right of each unit.

    The multiplications compose with the kernels on the input side, so the
    parameter path picks up the unit shift: (sum shift(c_j, 1) zeta_j,
    sum c_j beta_j).
    """
    coefficients = list(coefficients)
    units = list(units)
    _check_coefficients(coefficients, units)
    grid = units[0].grid
    zeta = constant(grid, 0.0)
    beta = constant(grid, 0.0)
    for c, u in zip(coefficients, units):
        zeta = zeta + c.shift(1) * u.zeta
        beta = beta + c * u.beta
    candidate = FockUnit(zeta, beta)

    def cross(probe: FockUnit) -> KernelOperator:
        total = KernelOperator.zero(grid)
        for c, u in zip(coefficients, units):
            total = total + kernel(u, probe) @ multiplication_operator(c.star())
        return total

    def diagonal() -> KernelOperator:
        total = KernelOperator.zero(grid)
        for ci, ui in zip(coefficients, units):
            for cj, uj in zip(coefficients, units):
                total = total + kernel(ui, uj) @ multiplication_operator(ci.star() * cj)
        return total

    return ReferencedUnit(candidate, reference, cross, diagonal)


def add(x: ReferencedUnit, y: ReferencedUnit) -> ReferencedUnit:
    """x + y, the combination of x, y and the reference with coefficients
    (1, 1, -1); the reference is the operation's neutral element."""
    _check_same_reference(x, y)
    omega = x.reference
    xu, yu = x.unit, y.unit
    candidate = FockUnit(xu.zeta + yu.zeta - omega.zeta, xu.beta + yu.beta - omega.beta)

    def cross(probe: FockUnit) -> KernelOperator:
        return kernel(xu, probe) + kernel(yu, probe) - kernel(omega, probe)

    def diagonal() -> KernelOperator:
        return (
            kernel(xu, xu)
            + kernel(xu, yu)
            - kernel(xu, omega)
            + kernel(yu, xu)
            + kernel(yu, yu)
            - kernel(yu, omega)
            - kernel(omega, xu)
            - kernel(omega, yu)
            + kernel(omega, omega)
        )

    return ReferencedUnit(candidate, omega, cross, diagonal)


def left_mul(a: AlgebraElement, x: ReferencedUnit) -> ReferencedUnit:
    """a . x, with the multiplications composed on the input side of the
    kernels; the parameter path twists a by the unit shift:
    (shift(a,1) zeta_x + (1 - shift(a,1)) zeta_ref, a beta_x + (1-a) beta_ref)."""
    omega = x.reference
    xu = x.unit
    a_shift = a.shift(1)
    one = constant(a.grid, 1.0)
    candidate = FockUnit(
        a_shift * xu.zeta + (one - a_shift) * omega.zeta,
        a * xu.beta + (one - a) * omega.beta,
    )
    mul_a = multiplication_operator(a.star())
    mul_rest = multiplication_operator((one - a).star())

    def cross(probe: FockUnit) -> KernelOperator:
        return kernel(xu, probe) @ mul_a + kernel(omega, probe) @ mul_rest

    def diagonal() -> KernelOperator:
        return (
            kernel(xu, xu) @ multiplication_operator(a.star() * a)
            + kernel(omega, xu) @ multiplication_operator((one - a).star() * a)
            + kernel(xu, omega) @ multiplication_operator(a.star() * (one - a))
            + kernel(omega, omega) @ multiplication_operator((one - a).star() * (one - a))
        )

    return ReferencedUnit(candidate, omega, cross, diagonal)


def right_mul(x: ReferencedUnit, a: AlgebraElement) -> ReferencedUnit:
    """x . a, with the multiplications applied to the kernel output:
    (zeta_x a + zeta_ref (1-a), beta_x a + beta_ref (1-a))."""
    omega = x.reference
    xu = x.unit
    one = constant(a.grid, 1.0)
    candidate = FockUnit(
        xu.zeta * a + omega.zeta * (one - a),
        xu.beta * a + omega.beta * (one - a),
    )
    mul_a = multiplication_operator(a.star())
    mul_rest = multiplication_operator((one - a).star())

    def cross(probe: FockUnit) -> KernelOperator:
        return mul_a @ kernel(xu, probe) + mul_rest @ kernel(omega, probe)

    def diagonal() -> KernelOperator:
        return (
            multiplication_operator(a.star() * a) @ kernel(xu, xu)
            + multiplication_operator((one - a).star() * a) @ kernel(omega, xu)
            + multiplication_operator(a.star() * (one - a)) @ kernel(xu, omega)
            + multiplication_operator((one - a).star() * (one - a)) @ kernel(omega, omega)
        )

    return ReferencedUnit(candidate, omega, cross, diagonal)


def scalar_mul(alpha: complex, x: ReferencedUnit) -> ReferencedUnit:
    """alpha * x as left multiplication by the constant alpha."""
    return left_mul(constant(x.grid, alpha), x)


def subtract(x: ReferencedUnit, y: ReferencedUnit) -> ReferencedUnit:
    """x - y as add(x, (-1) * y)."""
    return add(x, scalar_mul(-1.0, y))


def semi_inner(x: ReferencedUnit, y: ReferencedUnit, b: AlgebraElement) -> AlgebraElement:
    """The reference-relative semi-inner product
    (K(x,y) - K(x,ref) - K(ref,y) + K(ref,ref)) applied to b."""
    _check_same_reference(x, y)
    omega = x.reference
    combined = (
        kernel(x.unit, y.unit)
        - kernel(x.unit, omega)
        - kernel(omega, y.unit)
        + kernel(omega, omega)
    )
    return combined.apply(b)


def index_norm(x: ReferencedUnit) -> float:
    """sqrt of the sup-norm of <x, x> at b = 1; vanishing exactly on the
    null space the index quotients out."""
    one = constant(x.grid, 1.0)
    return float(np.sqrt(semi_inner(x, x, one).sup_norm()))


def equivalent(x: ReferencedUnit, y: ReferencedUnit, tol: float) -> bool:
    """Whether x and y agree in the index quotient: index_norm(x - y) <= tol.

    The index distance must coincide with the sup distance of the zeta
    parameters; a disagreement beyond rounding indicates an internal
    inconsistency and raises.
    """
    _check_same_reference(x, y)
    distance = index_norm(subtract(x, y))
    parameter_distance = (x.unit.zeta - y.unit.zeta).sup_norm()
    if abs(distance - parameter_distance) > 1e-9 * (1.0 + parameter_distance):
        raise RuntimeError(
            f"index distance {distance:.3e} disagrees with parameter distance {parameter_distance:.3e}"
        )
    return distance <= tol


def dual_path_residual(x: ReferencedUnit, probes: Sequence[FockUnit]) -> float:
    """Largest operator-norm gap between the formula-path kernels and the
    kernels of the parameter-path candidate, over a probe battery and the
    diagonal."""
    worst = (x.self_kernel() - kernel(x.unit, x.unit)).operator_norm()
    for probe in probes:
        gap = (x.cross_kernel(probe) - x.parameter_kernel(probe)).operator_norm()
        worst = max(worst, gap)
    return worst
