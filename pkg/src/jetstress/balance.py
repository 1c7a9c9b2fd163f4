"""Second-order virtual-power decomposition down to edges.

The interior power of a second-order stress unwinds in three exact steps:
integration by parts against the boundary stress, face-level integration by
parts producing edge terms and surface divergences, and a second volume
integration by parts through the divergence of the divergence.  Each step is
verified by quadrature; the residual of the assembled identity is the
headline number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .bundles import JetSectionField
from .fields import SmoothField, TensorField
from .geometry import (
    Body,
    FacePatch,
    FormField,
    QuadratureRule,
    boundary_faces,
    face_boundary_pieces,
    integrate,
    integrate_form_value_piece,
    integrate_over_face,
)
from .nonholonomic import (
    NonHolonomicStress,
    hyper_surface_action,
    nh_action_form,
    nh_divergence,
    nh_traction,
)
from .reports import CheckRecord
from .stress import (
    section_pairing_form,
    surface_force,
    traction_action,
    traction_projection,
)
from .surface import (
    TransversalField,
    face_velocity,
    surface_divergence,
    tangent_traction,
)
from .taylor import TruncatedSeries

__all__ = [
    "BalanceReport",
    "first_integration_by_parts",
    "div_div",
    "boundary_div_traction",
    "edge_assembly",
    "verify_balance_order2",
    "closed_boundary_exact_term",
]


@dataclass
class BalanceReport:
    """Term-by-term record of the second-order power identity."""

    interior_action: float
    edge_terms: Dict[str, float]
    face_divergence_terms: Dict[str, float]
    boundary_div_term: float
    div_div_term: float
    residual: float
    relative_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.relative_residual <= self.tolerance

    @property
    def edge_sum(self) -> float:
        return sum(self.edge_terms.values())

    @property
    def face_divergence_sum(self) -> float:
        return sum(self.face_divergence_terms.values())

    def to_record(self, check_id: str = "balance2") -> CheckRecord:
        terms = {
            "lhs": self.interior_action,
            "edge_sum": self.edge_sum,
            "face_div_sum": self.face_divergence_sum,
            "boundary_div": self.boundary_div_term,
            "div_div": self.div_div_term,
            "residual_abs": self.residual,
        }
        return CheckRecord(check_id, terms, self.relative_residual, self.tolerance)


def _volume_integral(form, body: Body, rule: QuadratureRule) -> float:
    if body.patch is not None:
        form = form.pullback(body.patch)
    return integrate(form, body.box, rule)


def first_integration_by_parts(
    stress: NonHolonomicStress,
    section: JetSectionField,
    body: Body,
    rule: QuadratureRule,
    tolerance: float = 1e-10,
) -> CheckRecord:
    """Interior action equals boundary-stress power minus divergence power."""
    lhs = _volume_integral(nh_action_form(stress, section), body, rule)
    surface_stress = nh_traction(stress)
    boundary_form = hyper_surface_action(surface_stress, section)
    boundary = sum(
        integrate_over_face(boundary_form, f, rule) for f in boundary_faces(body)
    )
    interior_form = section_pairing_form(nh_divergence(stress), section)
    interior = _volume_integral(interior_form, body, rule)
    residual = abs(lhs - (boundary - interior))
    scale = max(1.0, abs(lhs), abs(boundary), abs(interior))
    return CheckRecord(
        "first-integration-by-parts",
        {"lhs": lhs, "boundary": boundary, "interior": interior, "residual_abs": residual},
        residual / scale,
        tolerance,
    )


def div_div(stress: NonHolonomicStress) -> TensorField:
    """Twice-iterated divergence: a body-force-like pairing with velocity values."""
    n, d = stress.dim, stress.fiber_dim
    x0 = stress.x0.field
    x1 = stress.x1.field
    x2 = stress.x2.field
    x3 = stress.x3.field

    def evaluator(point, order):
        x3_series = x3.series_at(point, order + 2)
        x1_series = x1.series_at(point, order + 1)
        x2_series = x2.series_at(point, order + 1)
        x0_series = x0.series_at(point, order)
        out = []
        for alpha in range(d):
            total = TruncatedSeries.zero(n, order)
            for i in range(n):
                for j in range(n):
                    total = total + x3_series[(alpha * n + i) * n + j].partial(j).partial(i)
                total = total - x1_series[alpha * n + i].partial(i)
                total = total - x2_series[alpha * n + i].partial(i)
            out.append(total + x0_series[alpha])
        return out

    return TensorField(SmoothField(n, d, evaluator), (d,))


def boundary_div_traction(
    stress: NonHolonomicStress, face: FacePatch, velocity: TensorField
) -> FormField:
    """Boundary density of the divergence's traction, restricted to a face."""
    sigma = traction_projection(nh_divergence(stress))
    return surface_force(sigma, face, velocity)


def _face_transversal(
    face: FacePatch, transversals: Optional[Dict[str, TransversalField]]
) -> TransversalField:
    if transversals is not None and face.label in transversals:
        return transversals[face.label]
    if transversals is not None and "default" in transversals:
        raise ValueError("per-face transversal defaults must be resolved by the caller")
    if face.boxface is None:
        raise ValueError(f"face {face.label} needs an explicit transversal field")
    return TransversalField.coordinate(face)


def _edge_key(face: FacePatch, piece_boxface, face_axes: List[int]) -> Tuple[str, str]:
    other_axis = face_axes[piece_boxface.axis]
    other_side = piece_boxface.side
    from .geometry import face_label

    return tuple(sorted([face.label, face_label(other_axis, other_side)]))


def edge_assembly(
    surface_stress,
    velocity: TensorField,
    body: Body,
    transversals: Optional[Dict[str, TransversalField]] = None,
    rule: QuadratureRule = QuadratureRule(6),
) -> Tuple[Dict[str, float], Dict[str, float]]:
    """Face-boundary integrals of the tangent traction, grouped by edge.

    Each face contributes through its own induced boundary orientation; the
    per-edge sums are exactly the interactions two adjacent faces share.
    Also returns each face's surface-divergence integral.
    """
    n = body.dim
    edge_terms: Dict[str, float] = {}
    face_terms: Dict[str, float] = {}
    for face in boundary_faces(body):
        transversal = _face_transversal(face, transversals)
        tau = tangent_traction(surface_stress, face, transversal)
        u_face = face_velocity(velocity, face)
        tau_u = traction_action(tau, u_face)
        face_axes = [a for a in range(n) if a != face.boxface.axis]
        for piece_boxface, piece in face_boundary_pieces(face):
            value = face.sign * integrate_form_value_piece(tau_u, piece, rule)
            key = "|".join(_edge_key(face, piece_boxface, face_axes))
            edge_terms[key] = edge_terms.get(key, 0.0) + value
        div_form = surface_divergence(surface_stress, face, transversal, velocity)
        face_terms[face.label] = face.sign * integrate(div_form, face.param_box, rule)
    return edge_terms, face_terms


def verify_balance_order2(
    stress: NonHolonomicStress,
    velocity: TensorField,
    body: Body,
    transversals: Optional[Dict[str, TransversalField]] = None,
    rule: QuadratureRule = QuadratureRule(6),
    tolerance: float = 1e-9,
) -> BalanceReport:
    """Full second-order identity: interior power against its four groups.

    interior = edges - face divergences - boundary divergence traction
    + twice-iterated divergence.
    """
    section = JetSectionField.from_velocity(velocity)
    lhs = _volume_integral(nh_action_form(stress, section), body, rule)

    surface_stress = nh_traction(stress)
    edge_terms, face_terms = edge_assembly(
        surface_stress, velocity, body, transversals, rule
    )

    sigma_div = traction_projection(nh_divergence(stress))
    sigma_div_u = traction_action(sigma_div, velocity)
    boundary_div = sum(
        integrate_over_face(sigma_div_u, f, rule) for f in boundary_faces(body)
    )

    dd = div_div(stress)
    dd_form = _pairing_volume(dd, velocity)
    dd_term = _volume_integral(dd_form, body, rule)

    rhs = sum(edge_terms.values()) - sum(face_terms.values()) - boundary_div + dd_term
    residual = abs(lhs - rhs)
    scale = max(
        1.0,
        abs(lhs),
        abs(sum(edge_terms.values())),
        abs(sum(face_terms.values())),
        abs(boundary_div),
        abs(dd_term),
    )
    return BalanceReport(
        interior_action=lhs,
        edge_terms=edge_terms,
        face_divergence_terms=face_terms,
        boundary_div_term=boundary_div,
        div_div_term=dd_term,
        residual=residual,
        relative_residual=residual / scale,
        tolerance=tolerance,
    )


def _pairing_volume(coefficients: TensorField, velocity: TensorField) -> FormField:
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


def closed_boundary_exact_term(
    surface_stress,
    velocity: TensorField,
    face: FacePatch,
    transversal: TransversalField,
    rule: QuadratureRule = QuadratureRule(64),
) -> Tuple[float, float]:
    """The exact term over a closed boundary patch: both routes to (near) zero.

    Returns the quadrature of d(tau(u)) over the patch and the endpoint
    defect of tau(u) (exact cancellation for a closed curve).
    """
    if face.param_dim != 1:
        raise ValueError("closed-boundary patches are supported for curves only")
    tau = tangent_traction(surface_stress, face, transversal)
    u_face = face_velocity(velocity, face)
    tau_u = traction_action(tau, u_face)
    d_tau = tau_u.exterior_derivative()
    quadrature_value = integrate(d_tau, face.param_box, rule, face.sign)
    lo = (face.param_box.lower[0],)
    hi = (face.param_box.upper[0],)
    endpoint_defect = tau_u.value_at(hi).coefficient(()) - tau_u.value_at(lo).coefficient(())
    return quadrature_value, endpoint_defect
