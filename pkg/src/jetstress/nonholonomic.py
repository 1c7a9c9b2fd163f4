"""Second-order stresses through their non-holonomic representatives.

A non-holonomic stress has four blocks pairing with the four blocks of an
iterated jet.  Restricting to holonomic arguments collapses it to a
symmetric second-order stress; lifting a second-order stress back is
non-unique, parameterized here by how the first-order content splits
between the two middle blocks.

The divergence lands in the first-order layout acting on first-jet
sections, so the order-1 machinery applies to it again; higher orders
follow by iterating that step with a jet bundle as the fiber.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .bundles import IteratedJetValue, JetSectionField
from .fields import SmoothField, TensorField
from .geometry import FormField, FormValue, interior_product, tuple_omitting
from .stress import VariationalStress1
from .taylor import TruncatedSeries

__all__ = [
    "NonHolonomicStress",
    "VariationalStress2",
    "HyperSurfaceStress",
    "nh_action",
    "nh_action_form",
    "restrict_to_second_order",
    "lift_second_order",
    "nh_traction",
    "nh_divergence",
    "significant_components",
    "contraction_C1",
    "second_contraction",
    "second_contraction_brute_force",
]


@dataclass(frozen=True)
class NonHolonomicStress:
    """Dual of the iterated jet blocks, valued in chart volume densities.

    x0: (d,), x1: (d, n), x2: (d, n), x3: (d, n, n); x3 is unconstrained.
    """

    x0: TensorField
    x1: TensorField
    x2: TensorField
    x3: TensorField

    def __post_init__(self):
        d = self.x0.shape[0]
        n = self.x1.shape[1]
        expected = [(d,), (d, n), (d, n), (d, n, n)]
        actual = [self.x0.shape, self.x1.shape, self.x2.shape, self.x3.shape]
        if actual != expected:
            raise ValueError(f"stress blocks have shapes {actual}, expected {expected}")
        if any(f.dim != self.x0.dim for f in (self.x1, self.x2, self.x3)):
            raise ValueError("stress blocks live on different chart dimensions")

    @property
    def dim(self) -> int:
        return self.x0.dim

    @property
    def fiber_dim(self) -> int:
        return self.x0.shape[0]


@dataclass(frozen=True)
class VariationalStress2:
    """Second-order stress with a symmetric top block."""

    s0: TensorField  # (d,)
    s1: TensorField  # (d, n)
    s2: TensorField  # (d, n, n), symmetric

    def __post_init__(self):
        d = self.s0.shape[0]
        n = self.s1.shape[1]
        if self.s1.shape != (d, n) or self.s2.shape != (d, n, n):
            raise ValueError("second-order stress blocks have inconsistent shapes")

    @property
    def dim(self) -> int:
        return self.s0.dim

    @property
    def fiber_dim(self) -> int:
        return self.s0.shape[0]

    def check_symmetry(self, points: Sequence[Sequence[float]], tol: float = 1e-12) -> None:
        for x in points:
            arr = self.s2.at(x)
            if np.max(np.abs(arr - np.transpose(arr, (0, 2, 1)))) > tol:
                raise ValueError(f"top block is not symmetric at {tuple(x)}")


@dataclass(frozen=True)
class HyperSurfaceStress:
    """Boundary-density stress pairing with first-jet values.

    y0[alpha, j] and y1[alpha, i, j] are coefficients on the basis form that
    omits axis j; the i slot pairs with jet derivative components.
    """

    y0: TensorField  # (d, n)
    y1: TensorField  # (d, n, n)

    @property
    def dim(self) -> int:
        return self.y0.dim

    @property
    def fiber_dim(self) -> int:
        return self.y0.shape[0]


def nh_action(
    stress: NonHolonomicStress, value: IteratedJetValue, point: Sequence[float]
) -> FormValue:
    """Pointwise density of the stress against an iterated jet."""
    n = stress.dim
    if value.dim != n or value.fiber_dim != stress.fiber_dim:
        raise ValueError("iterated jet shape does not match the stress")
    coeff = float(
        np.sum(stress.x0.at(point) * value.b0)
        + np.sum(stress.x1.at(point) * value.b1)
        + np.sum(stress.x2.at(point) * value.b2)
        + np.sum(stress.x3.at(point) * value.b3)
    )
    return FormValue.volume(n, coeff)


def nh_action_form(stress: NonHolonomicStress, section: JetSectionField) -> FormField:
    """The volume form x -> stress(j1 of the section)(x)."""
    n, d = stress.dim, stress.fiber_dim
    if section.dim != n or section.fiber_dim != d:
        raise ValueError("section shape does not match the stress")
    vol_tuple = tuple(range(n))

    def evaluator(point, order):
        x0 = stress.x0.field.series_at(point, order)
        x1 = stress.x1.field.series_at(point, order)
        x2 = stress.x2.field.series_at(point, order)
        x3 = stress.x3.field.series_at(point, order)
        a0 = section.a0.field.series_at(point, order + 1)
        a1 = section.a1.field.series_at(point, order + 1)
        total = TruncatedSeries.zero(n, order)
        for alpha in range(d):
            total = total + x0[alpha] * a0[alpha].truncate(order)
            for i in range(n):
                total = total + x1[alpha * n + i] * a1[alpha * n + i].truncate(order)
                total = total + x2[alpha * n + i] * a0[alpha].partial(i)
                for j in range(n):
                    total = total + x3[(alpha * n + i) * n + j] * a1[alpha * n + i].partial(j)
        return [total]

    return FormField(n, n, [vol_tuple], SmoothField(n, 1, evaluator))


def restrict_to_second_order(stress: NonHolonomicStress) -> VariationalStress2:
    """Collapse to the symmetric stress acting on holonomic arguments."""
    n, d = stress.dim, stress.fiber_dim
    s1_field = stress.x1.field + stress.x2.field
    x3 = stress.x3.field

    def sym_evaluator(point, order):
        series = x3.series_at(point, order)
        out = []
        for alpha in range(d):
            for i in range(n):
                for j in range(n):
                    a = series[(alpha * n + i) * n + j]
                    b = series[(alpha * n + j) * n + i]
                    out.append((a + b) * 0.5)
        return out

    s2 = TensorField(SmoothField(n, d * n * n, sym_evaluator), (d, n, n))
    return VariationalStress2(stress.x0, TensorField(s1_field, (d, n)), s2)


def lift_second_order(stress: VariationalStress2, split: float = 1.0) -> NonHolonomicStress:
    """Represent a second-order stress non-holonomically.

    ``split`` in [0, 1] routes that fraction of the first-order block to the
    slot that feeds the boundary term; the complement stays on the direct
    first-jet slot.  Restricting back recovers the input for every split.
    """
    if not 0.0 <= split <= 1.0:
        raise ValueError("split must lie in [0, 1]")
    d, n = stress.fiber_dim, stress.dim
    x1 = TensorField(stress.s1.field.scale(1.0 - split), (d, n))
    x2 = TensorField(stress.s1.field.scale(split), (d, n))
    return NonHolonomicStress(stress.s0, x1, x2, stress.s2)


def nh_traction(stress: NonHolonomicStress) -> HyperSurfaceStress:
    """Boundary-density stress: contract the two derivative blocks into the volume."""
    n, d = stress.dim, stress.fiber_dim
    x2 = stress.x2.field
    x3 = stress.x3.field

    def y0_evaluator(point, order):
        series = x2.series_at(point, order)
        return [series[alpha * n + j] * ((-1.0) ** j) for alpha in range(d) for j in range(n)]

    def y1_evaluator(point, order):
        series = x3.series_at(point, order)
        out = []
        for alpha in range(d):
            for i in range(n):
                for j in range(n):
                    out.append(series[(alpha * n + i) * n + j] * ((-1.0) ** j))
        return out

    return HyperSurfaceStress(
        TensorField(SmoothField(n, d * n, y0_evaluator), (d, n)),
        TensorField(SmoothField(n, d * n * n, y1_evaluator), (d, n, n)),
    )


def hyper_surface_action(surface: HyperSurfaceStress, section: JetSectionField) -> FormField:
    """The (n-1)-form field Y(A) on the chart."""
    n, d = surface.dim, surface.fiber_dim
    tuples = [tuple_omitting(n, j) for j in range(n)]

    def evaluator(point, order):
        y0 = surface.y0.field.series_at(point, order)
        y1 = surface.y1.field.series_at(point, order)
        a0 = section.a0.field.series_at(point, order)
        a1 = section.a1.field.series_at(point, order)
        out = []
        for j in range(n):
            total = TruncatedSeries.zero(n, order)
            for alpha in range(d):
                total = total + y0[alpha * n + j] * a0[alpha]
                for i in range(n):
                    total = total + y1[(alpha * n + i) * n + j] * a1[alpha * n + i]
            out.append(total)
        return out

    return FormField(n, n - 1, tuples, SmoothField(n, n, evaluator))


def nh_divergence(stress: NonHolonomicStress) -> VariationalStress1:
    """Divergence as a first-order-stress-shaped pairing on first-jet sections.

    The value slot collects the derivative of the boundary block minus the
    direct value block; the gradient slot does the same one order up.  The
    layout lets the order-1 machinery run again on the result.
    """
    n, d = stress.dim, stress.fiber_dim
    x0 = stress.x0.field
    x1 = stress.x1.field
    x2 = stress.x2.field
    x3 = stress.x3.field

    def value_slot(point, order):
        x2_series = x2.series_at(point, order + 1)
        x0_series = x0.series_at(point, order)
        out = []
        for alpha in range(d):
            total = TruncatedSeries.zero(n, order)
            for j in range(n):
                total = total + x2_series[alpha * n + j].partial(j)
            out.append(total - x0_series[alpha])
        return out

    def gradient_slot(point, order):
        x3_series = x3.series_at(point, order + 1)
        x1_series = x1.series_at(point, order)
        out = []
        for alpha in range(d):
            for i in range(n):
                total = TruncatedSeries.zero(n, order)
                for j in range(n):
                    total = total + x3_series[(alpha * n + i) * n + j].partial(j)
                out.append(total - x1_series[alpha * n + i])
        return out

    return VariationalStress1(
        TensorField(SmoothField(n, d, value_slot), (d,)),
        TensorField(SmoothField(n, d * n, gradient_slot), (d, n)),
    )


def significant_components(stress: NonHolonomicStress, which: str = "3") -> dict:
    """Restrictions to the vertical sub-bundles, keyed by the surviving blocks.

    ``which`` selects the kernel: "3" keeps only the top block, "23" the two
    derivative blocks, "13" the first-jet and top blocks, "123" everything
    except the value block.
    """
    mapping = {
        "3": ("x3",),
        "23": ("x2", "x3"),
        "13": ("x1", "x3"),
        "123": ("x1", "x2", "x3"),
    }
    if which not in mapping:
        raise ValueError(f"unknown vertical restriction {which!r}")
    return {name: getattr(stress, name) for name in mapping[which]}


def contraction_C1(x3: TensorField) -> TensorField:
    """Contract the first derivative slot of the top block into the volume form.

    Output layout (d, n, n): [alpha, j, omitted axis]; the coefficient on the
    form omitting axis i keeps the sign from moving axis i to the front.
    """
    d, n, _ = x3.shape
    base = x3.field

    def evaluator(point, order):
        series = base.series_at(point, order)
        out = []
        for alpha in range(d):
            for j in range(n):
                for i in range(n):
                    out.append(series[(alpha * n + i) * n + j] * ((-1.0) ** i))
        return out

    return TensorField(SmoothField(x3.dim, d * n * n, evaluator), (d, n, n))


def second_contraction(x3: TensorField, point: Sequence[float]) -> List[FormValue]:
    """Contract both slots of the top block into the volume form.

    Returns one (n-2)-form per fiber component; identically zero whenever the
    block is symmetric.
    """
    d, n, _ = x3.shape
    if n < 2:
        raise ValueError("second contraction needs chart dimension >= 2")
    arr = x3.at(point)
    out = []
    for alpha in range(d):
        coeffs = {}
        for i in range(n):
            for j in range(i):
                # Basis form omits axes j < i.
                key = tuple(a for a in range(n) if a not in (i, j))
                val = ((-1.0) ** (i + j)) * (arr[alpha, i, j] - arr[alpha, j, i])
                if val != 0.0:
                    coeffs[key] = coeffs.get(key, 0.0) + val
        out.append(FormValue(n, n - 2, coeffs))
    return out


def second_contraction_brute_force(x3: TensorField, point: Sequence[float]) -> List[FormValue]:
    """Oracle: apply two interior products to the volume form, term by term."""
    d, n, _ = x3.shape
    if n < 2:
        raise ValueError("second contraction needs chart dimension >= 2")
    arr = x3.at(point)
    vol = FormValue.volume(n)
    out = []
    for alpha in range(d):
        total = FormValue(n, n - 2)
        for i in range(n):
            inner = interior_product(i, vol)
            for j in range(n):
                contribution = interior_product(j, inner).scale(arr[alpha, i, j])
                total = total + contribution
        out.append(total)
    return out
