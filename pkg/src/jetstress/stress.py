"""Order-1 stress analysis: action, traction, divergence, and power balance.

A first-order stress pairs the value and gradient of a velocity field into a
volume-form density.  Contracting its gradient slot into the volume form
yields the traction stress, whose restriction to a boundary face is the
surface force; the divergence is defined so that integration by parts closes
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bundles import JetSectionField
from .fields import JetValue, SmoothField, TensorField
from .geometry import (
    Body,
    FacePatch,
    FormField,
    FormValue,
    QuadratureRule,
    boundary_faces,
    integrate,
    integrate_over_face,
    tuple_omitting,
)
from .reports import CheckRecord
from .taylor import TruncatedSeries

__all__ = [
    "VariationalStress1",
    "TractionStress",
    "BodyForce",
    "stress_action",
    "action_form",
    "section_pairing_form",
    "traction_projection",
    "traction_action",
    "surface_force",
    "divergence",
    "body_force",
    "invariant_divergence_residual",
    "verify_balance_order1",
]


@dataclass(frozen=True)
class VariationalStress1:
    """First-order stress components relative to the chart volume form.

    ``s0`` (shape (d,)) pairs with velocity values, ``s1`` (shape (d, n))
    with velocity gradients.
    """

    s0: TensorField
    s1: TensorField

    def __post_init__(self):
        d = self.s0.shape[0]
        if len(self.s0.shape) != 1 or len(self.s1.shape) != 2:
            raise ValueError("expected shapes (d,) and (d, n)")
        if self.s1.shape != (d, self.s0.dim) or self.s1.dim != self.s0.dim:
            raise ValueError("stress component shapes are inconsistent")

    @property
    def dim(self) -> int:
        return self.s0.dim

    @property
    def fiber_dim(self) -> int:
        return self.s0.shape[0]


@dataclass(frozen=True)
class TractionStress:
    """Boundary-density stress: sigma[alpha, j] multiplies the form omitting axis j."""

    sigma: TensorField  # shape (d, n)

    @property
    def dim(self) -> int:
        return self.sigma.dim

    @property
    def fiber_dim(self) -> int:
        return self.sigma.shape[0]


@dataclass(frozen=True)
class BodyForce:
    """Volume-force density paired with velocity values."""

    b: TensorField  # shape (d,)


def stress_action(stress: VariationalStress1, jet: JetValue, point: Sequence[float]) -> FormValue:
    """Pointwise power density of the stress against an order-1 jet."""
    if jet.order < 1:
        raise ValueError("stress action needs an order-1 jet")
    n = stress.dim
    if jet.dim != n or jet.fiber_dim != stress.fiber_dim:
        raise ValueError("jet shape does not match the stress")
    s0 = stress.s0.at(point)
    s1 = stress.s1.at(point)
    coeff = float(np.sum(s0 * jet.array(0)) + np.sum(s1 * jet.array(1)))
    return FormValue.volume(n, coeff)


def action_form(stress: VariationalStress1, velocity: TensorField) -> FormField:
    """The volume form x -> stress(j1 velocity)(x), as an integrable field."""
    n, d = stress.dim, stress.fiber_dim
    if velocity.shape != (d,) or velocity.dim != n:
        raise ValueError("velocity shape does not match the stress")
    s_field = stress
    vol_tuple = tuple(range(n))

    def evaluator(point, order):
        s0 = s_field.s0.field.series_at(point, order)
        s1 = s_field.s1.field.series_at(point, order)
        w = velocity.field.series_at(point, order + 1)
        total = TruncatedSeries.zero(n, order)
        for alpha in range(d):
            total = total + s0[alpha] * w[alpha].truncate(order)
            for i in range(n):
                total = total + s1[alpha * n + i] * w[alpha].partial(i)
        return [total]

    coeffs = SmoothField(n, 1, evaluator)
    return FormField(n, n, [vol_tuple], coeffs)


def section_pairing_form(stress: VariationalStress1, section: JetSectionField) -> FormField:
    """Pair the two stress slots with the raw blocks of a first-jet section.

    This is the pointwise pairing of a dual of the first-jet bundle with a
    section of it; when the section is compatible it coincides with the
    stress action on the velocity's jet.
    """
    n, d = stress.dim, stress.fiber_dim
    if section.dim != n or section.fiber_dim != d:
        raise ValueError("section shape does not match the stress")
    vol_tuple = tuple(range(n))

    def evaluator(point, order):
        s0 = stress.s0.field.series_at(point, order)
        s1 = stress.s1.field.series_at(point, order)
        a0 = section.a0.field.series_at(point, order)
        a1 = section.a1.field.series_at(point, order)
        total = TruncatedSeries.zero(n, order)
        for alpha in range(d):
            total = total + s0[alpha] * a0[alpha]
            for i in range(n):
                total = total + s1[alpha * n + i] * a1[alpha * n + i]
        return [total]

    return FormField(n, n, [vol_tuple], SmoothField(n, 1, evaluator))


def traction_projection(stress: VariationalStress1) -> TractionStress:
    """Contract the gradient slot into the volume form; the value slot is dropped.

    Componentwise, the density omitting axis j picks up the sign that moving
    axis j to the front of the volume form produces.
    """
    n, d = stress.dim, stress.fiber_dim
    base = stress.s1.field

    def evaluator(point, order):
        series = base.series_at(point, order)
        return [series[alpha * n + j] * ((-1.0) ** j) for alpha in range(d) for j in range(n)]

    return TractionStress(TensorField(SmoothField(n, d * n, evaluator), (d, n)))


def traction_action(traction: TractionStress, velocity: TensorField) -> FormField:
    """The (n-1)-form field sigma(w) on the chart."""
    n, d = traction.dim, traction.fiber_dim
    if velocity.shape != (d,) or velocity.dim != n:
        raise ValueError("velocity shape does not match the traction")
    tuples = [tuple_omitting(n, j) for j in range(n)]

    def evaluator(point, order):
        sig = traction.sigma.field.series_at(point, order)
        w = velocity.field.series_at(point, order)
        out = []
        for j in range(n):
            total = TruncatedSeries.zero(n, order)
            for alpha in range(d):
                total = total + sig[alpha * n + j] * w[alpha]
            out.append(total)
        return out

    return FormField(n, n - 1, tuples, SmoothField(n, n, evaluator))


def surface_force(
    traction: TractionStress, face: FacePatch, velocity: TensorField
) -> FormField:
    """Generalized boundary force density: the traction action pulled onto a face."""
    if face.param_box is None:
        raise ValueError("surface force needs a face of dimension >= 1")
    return traction_action(traction, velocity).pullback(face.to_chart)


def divergence(stress: VariationalStress1) -> TensorField:
    """Local divergence: derivative of the gradient slot minus the value slot."""
    n, d = stress.dim, stress.fiber_dim
    s1 = stress.s1.field
    s0 = stress.s0.field

    def evaluator(point, order):
        s1_series = s1.series_at(point, order + 1)
        s0_series = s0.series_at(point, order)
        out = []
        for alpha in range(d):
            total = TruncatedSeries.zero(n, order)
            for j in range(n):
                total = total + s1_series[alpha * n + j].partial(j)
            out.append(total - s0_series[alpha])
        return out

    return TensorField(SmoothField(n, d, evaluator), (d,))


def body_force(stress: VariationalStress1) -> BodyForce:
    """The force density balancing the stress: minus its divergence."""
    div = divergence(stress)
    return BodyForce(TensorField(div.field.scale(-1.0), div.shape))


def pairing_volume_form(coefficients: TensorField, velocity: TensorField) -> FormField:
    """sum_alpha c[alpha] w[alpha] times the chart volume form."""
    n = coefficients.dim
    d = coefficients.shape[0]
    vol_tuple = tuple(range(n))

    def evaluator(point, order):
        c = coefficients.field.series_at(point, order)
        w = velocity.field.series_at(point, order)
        total = TruncatedSeries.zero(n, order)
        for alpha in range(d):
            total = total + c[alpha] * w[alpha]
        return [total]

    return FormField(n, n, [vol_tuple], SmoothField(n, 1, evaluator))


def invariant_divergence_residual(
    stress: VariationalStress1,
    velocity: TensorField,
    points: Sequence[Sequence[float]],
) -> float:
    """Max pointwise gap between d(sigma(w)) - S(j1 w) and the local divergence."""
    sigma = traction_projection(stress)
    d_sigma_w = traction_action(sigma, velocity).exterior_derivative()
    action = action_form(stress, velocity)
    div = divergence(stress)
    n = stress.dim
    vol = tuple(range(n))
    worst = 0.0
    for x in points:
        invariant = d_sigma_w.value_at(x).coefficient(vol) - action.value_at(x).coefficient(vol)
        local = float(np.sum(div.at(x) * velocity.at(x)))
        worst = max(worst, abs(invariant - local))
    return worst


def verify_balance_order1(
    stress: VariationalStress1,
    velocity: TensorField,
    body: Body,
    rule: QuadratureRule,
    tolerance: float = 1e-10,
) -> CheckRecord:
    """Interior power equals body-force power plus boundary traction power."""
    n = stress.dim
    if body.dim != n:
        raise ValueError("body dimension does not match the stress")
    chart_map = body.patch
    action = action_form(stress, velocity)
    if chart_map is not None:
        action = action.pullback(chart_map)
    lhs = integrate(action, body.box, rule)

    bf = body_force(stress)
    interior_form = pairing_volume_form(bf.b, velocity)
    if chart_map is not None:
        interior_form = interior_form.pullback(chart_map)
    interior = integrate(interior_form, body.box, rule)

    sigma = traction_projection(stress)
    sigma_w = traction_action(sigma, velocity)
    boundary = sum(
        integrate_over_face(sigma_w, face, rule) for face in boundary_faces(body)
    )

    residual = abs(lhs - interior - boundary)
    scale = max(1.0, abs(lhs), abs(interior), abs(boundary))
    return CheckRecord(
        "balance1",
        {"lhs": lhs, "interior": interior, "boundary": boundary,
         "residual_abs": residual},
        residual / scale,
        tolerance,
    )
