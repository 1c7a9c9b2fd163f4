"""Face-level stress analysis: restriction, tangency, and surface divergence.

Restricting a boundary-density stress to a face still pairs with ambient
derivative components, so it is not yet a stress over the face.  A
transversal vector field supplies the missing split: its annihilator
one-form separates tangential from transversal content, making the tangent
traction and the surface divergence well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .fields import SmoothField, TensorField
from .geometry import FacePatch, FormField, QuadratureRule
from .nonholonomic import HyperSurfaceStress
from .stress import TractionStress, VariationalStress1, divergence, traction_projection
from .taylor import TruncatedSeries, power_series, reciprocal_series

__all__ = [
    "TransversalField",
    "RestrictedSurfaceStress",
    "restrict_Y",
    "vertical_projection",
    "is_tangent",
    "transversal_decomposition",
    "tangent_traction",
    "surface_divergence",
    "tangent_edge_force",
    "face_velocity",
    "face_jet_pairing",
]


def _solve_linear_series(
    matrix: List[List[TruncatedSeries]], rhs: List[List[TruncatedSeries]]
) -> List[List[TruncatedSeries]]:
    """Gauss-Jordan elimination over truncated series, multiple right-hand sides.

    Pivots on the constant terms; a vanishing pivot means the transversality
    system is singular at the evaluation point.
    """
    size = len(matrix)
    m = [row[:] for row in matrix]
    r = [row[:] for row in rhs]
    for col in range(size):
        piv = max(range(col, size), key=lambda k: abs(m[k][col].value))
        if abs(m[piv][col].value) < 1e-13:
            raise ValueError("transversality system is singular at a sample point")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            r[col], r[piv] = r[piv], r[col]
        inv = reciprocal_series(m[col][col])
        m[col] = [e * inv for e in m[col]]
        r[col] = [e * inv for e in r[col]]
        for k in range(size):
            if k == col or not m[k][col].coeffs:
                continue
            factor = m[k][col]
            m[k] = [e - factor * p for e, p in zip(m[k], m[col])]
            r[k] = [e - factor * p for e, p in zip(r[k], r[col])]
    return r


def _tangent_basis_series(
    face: FacePatch, point: Sequence[float], order: int
) -> List[List[TruncatedSeries]]:
    """Columns of the face Jacobian: tangent vectors as ambient components."""
    if face.to_chart is None:
        raise ValueError("0-dimensional faces have no tangent basis")
    q = face.param_dim
    mapping = face.to_chart.series_at(point, order + 1)
    return [[mapping[i].partial(a) for i in range(face.chart.dim)] for a in range(q)]


class TransversalField:
    """A nowhere-tangent vector field along a face with its annihilator form.

    ``n_field`` holds ambient vector components over the face parameters;
    ``annihilator_series`` solves phi(tangent) = 0, phi(n) = 1 pointwise in
    series arithmetic, so the annihilator is differentiable along the face.
    """

    def __init__(self, face: FacePatch, n_field: TensorField):
        if face.param_box is None:
            raise ValueError("transversal fields need faces of dimension >= 1")
        n = face.chart.dim
        if n_field.shape != (n,) or n_field.dim != face.param_dim:
            raise ValueError("transversal components must be (n,) over the face parameters")
        self.face = face
        self.n_field = n_field

    @classmethod
    def coordinate(cls, face: FacePatch) -> "TransversalField":
        """Outward coordinate transversal of a box face."""
        if face.boxface is None:
            raise ValueError("coordinate transversal needs a box face")
        n = face.chart.dim
        vec = [0.0] * n
        vec[face.boxface.axis] = 1.0 if face.boxface.side else -1.0
        return cls(face, TensorField(SmoothField.constant(face.param_dim, vec), (n,)))

    @classmethod
    def from_ambient_field(cls, face: FacePatch, field: TensorField) -> "TransversalField":
        """Compose an ambient vector field onto the face parameters."""
        return cls(face, field.compose(face.to_chart))

    @classmethod
    def metric_normal(cls, face: FacePatch, metric: TensorField) -> "TransversalField":
        """Outward unit normal of the face for a Riemannian metric on the chart."""
        n = face.chart.dim
        q = face.param_dim
        metric_on_face = metric.compose(face.to_chart)
        facem = face

        def evaluator(point, order):
            tangents = _tangent_basis_series(facem, point, order)
            # Annihilator covector via cofactors of the tangent matrix.
            ann = []
            for i in range(n):
                rows = [[tangents[a][r] for a in range(q)] for r in range(n) if r != i]
                if q == 0:
                    raise ValueError("metric normal undefined for point faces")
                det = _det_series(rows)
                ann.append(det * ((-1.0) ** i))
            g = metric_on_face.field.series_at(point, order)
            # Raise the index: solve g v = ann.
            gmat = [[g[i * n + j] for j in range(n)] for i in range(n)]
            v = _solve_linear_series(gmat, [[a] for a in ann])
            raw = [row[0] for row in v]
            norm_sq = None
            for i in range(n):
                term = ann[i] * raw[i]
                norm_sq = term if norm_sq is None else norm_sq + term
            scale = reciprocal_series(power_series(norm_sq, 0.5))
            return [r * scale for r in raw]

        unsigned = TensorField(SmoothField(q, n, evaluator), (n,))
        sign = cls._outward_sign(face, unsigned)
        return cls(face, TensorField(unsigned.field.scale(sign), (n,)))

    @staticmethod
    def _outward_sign(face: FacePatch, candidate: TensorField) -> float:
        if face.boxface is None:
            return 1.0
        center = face.param_box.center()
        vec = candidate.at(center)
        outward = 1.0 if face.boxface.side else -1.0
        component = vec[face.boxface.axis] * outward
        if abs(component) < 1e-13:
            raise ValueError("cannot orient the metric normal on this face")
        return 1.0 if component > 0 else -1.0

    def annihilator_series(self, point: Sequence[float], order: int) -> List[TruncatedSeries]:
        """Components of the one-form with phi(tangents) = 0, phi(n) = 1."""
        n = self.face.chart.dim
        tangents = _tangent_basis_series(self.face, point, order)
        nvec = self.n_field.field.series_at(point, order)
        rows = tangents + [nvec]
        rhs = [[TruncatedSeries.zero(self.face.param_dim, order)] for _ in range(n)]
        rhs[-1][0] = TruncatedSeries.constant(self.face.param_dim, order, 1.0)
        # Unknown phi enters through M[k][i] phi_i with M rows = tangents, n.
        matrix = [[rows[k][i] for i in range(n)] for k in range(n)]
        sol = _solve_linear_series(matrix, rhs)
        return [row[0] for row in sol]

    def annihilator_field(self) -> TensorField:
        n = self.face.chart.dim
        q = self.face.param_dim
        outer = self

        def evaluator(point, order):
            return outer.annihilator_series(point, order)

        return TensorField(SmoothField(q, n, evaluator), (n,))

    def validate(self, points: Sequence[Sequence[float]], tol: float = 1e-12) -> float:
        """Largest defect of phi(n) = 1 and phi(tangent) = 0 over sample points."""
        worst = 0.0
        n = self.face.chart.dim
        for y in points:
            phi = [s.value for s in self.annihilator_series(y, 0)]
            nvec = self.n_field.at(y)
            worst = max(worst, abs(float(np.dot(phi, nvec)) - 1.0))
            tangents = _tangent_basis_series(self.face, y, 0)
            for t in tangents:
                tv = [s.value for s in t]
                worst = max(worst, abs(float(np.dot(phi, tv))))
        if worst > tol:
            raise ValueError(f"transversal field defect {worst:.2e} exceeds {tol:.1e}")
        return worst


def _det_series(rows: List[List[TruncatedSeries]]) -> TruncatedSeries:
    size = len(rows)
    if size == 0:
        raise ValueError("empty determinant")
    if size == 1:
        return rows[0][0]
    if size == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = None
    for col in range(size):
        minor = [r[:col] + r[col + 1 :] for r in rows[1:]]
        term = rows[0][col] * _det_series(minor)
        if col % 2:
            term = -term
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class RestrictedSurfaceStress:
    """A boundary stress pulled onto face parameters, still pairing ambient jets.

    ``z0`` (d,) pairs with values, ``z1`` (d, n) with ambient derivative
    components; both are densities on the face volume element.
    """

    face: FacePatch
    z0: TensorField
    z1: TensorField

    @property
    def fiber_dim(self) -> int:
        return self.z0.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.z1.shape[1]


def restrict_Y(surface_stress: HyperSurfaceStress, face: FacePatch) -> RestrictedSurfaceStress:
    """Pull each boundary-density basis form back onto the face parameters."""
    if face.param_box is None:
        raise ValueError("cannot restrict to a 0-dimensional face")
    n, d = surface_stress.dim, surface_stress.fiber_dim
    q = face.param_dim
    y0 = surface_stress.y0.field
    y1 = surface_stress.y1.field
    mapping = face.to_chart

    def minors(point, order):
        mseries = mapping.series_at(point, order + 1)
        jac = [[mseries[i].partial(a) for a in range(q)] for i in range(n)]
        out = []
        for j in range(n):
            rows = [jac[i] for i in range(n) if i != j]
            out.append(_det_series(rows))
        return out, mseries

    def z0_evaluator(point, order):
        dets, mseries = minors(point, order)
        center = tuple(s.value for s in mseries)
        offsets = [(s - s.value).truncate(order) for s in mseries]
        base = [s.compose(offsets) for s in y0.series_at(center, order)]
        out = []
        for alpha in range(d):
            total = TruncatedSeries.zero(q, order)
            for j in range(n):
                total = total + base[alpha * n + j] * dets[j]
            out.append(total)
        return out

    def z1_evaluator(point, order):
        dets, mseries = minors(point, order)
        center = tuple(s.value for s in mseries)
        offsets = [(s - s.value).truncate(order) for s in mseries]
        base = [s.compose(offsets) for s in y1.series_at(center, order)]
        out = []
        for alpha in range(d):
            for i in range(n):
                total = TruncatedSeries.zero(q, order)
                for j in range(n):
                    total = total + base[(alpha * n + i) * n + j] * dets[j]
                out.append(total)
        return out

    return RestrictedSurfaceStress(
        face,
        TensorField(SmoothField(q, d, z0_evaluator), (d,)),
        TensorField(SmoothField(q, d * n, z1_evaluator), (d, n)),
    )


def vertical_projection(
    restricted: RestrictedSurfaceStress, complement_axis: Optional[int] = None
) -> TensorField:
    """The derivative-slot component acting on jets that vanish tangentially.

    The complement coordinate fixes the normalization of the annihilator
    direction; box faces default to their omitted axis, where the projection
    reduces to the corresponding column of the derivative slot.
    """
    face = restricted.face
    n = restricted.ambient_dim
    d = restricted.fiber_dim
    q = face.param_dim
    if complement_axis is None:
        if face.boxface is None:
            raise ValueError("general faces need an explicit complement coordinate")
        complement_axis = face.boxface.axis
    basis = [0.0] * n
    basis[complement_axis] = 1.0
    complement = TransversalField(
        face, TensorField(SmoothField.constant(q, basis), (n,))
    )
    z1 = restricted.z1.field

    def evaluator(point, order):
        phi = complement.annihilator_series(point, order)
        series = z1.series_at(point, order)
        out = []
        for alpha in range(d):
            total = TruncatedSeries.zero(q, order)
            for i in range(n):
                total = total + series[alpha * n + i] * phi[i]
            out.append(total)
        return out

    return TensorField(SmoothField(q, d, evaluator), (d,))


def is_tangent(
    restricted: RestrictedSurfaceStress,
    tol: float = 1e-9,
    rule: QuadratureRule = QuadratureRule(3),
    complement_axis: Optional[int] = None,
) -> bool:
    """Whether the vertical projection vanishes across the face."""
    vp = vertical_projection(restricted, complement_axis)
    nodes, _ = rule.nodes_weights(restricted.face.param_box)
    return all(float(np.max(np.abs(vp.at(tuple(y))))) <= tol for y in nodes)


def transversal_decomposition(
    restricted: RestrictedSurfaceStress, transversal: TransversalField
) -> Tuple[TensorField, TensorField]:
    """Split the derivative slot into face-tangent and transversal parts.

    Returns the tangent components in the face frame, shape (d, n-1), and the
    transversal coefficient, shape (d,): the pairing with the annihilator.
    The original ambient components are recovered as tangent-part times the
    tangent basis plus coefficient times the transversal vector.
    """
    face = restricted.face
    if face is not transversal.face and face.label != transversal.face.label:
        raise ValueError("transversal field belongs to a different face")
    n = restricted.ambient_dim
    d = restricted.fiber_dim
    q = face.param_dim
    z1 = restricted.z1.field
    nf = transversal.n_field.field

    def solve_components(point, order):
        tangents = _tangent_basis_series(face, point, order)
        nvec = nf.series_at(point, order)
        # Columns: tangent vectors then the transversal.
        matrix = [
            [tangents[a][i] for a in range(q)] + [nvec[i]] for i in range(n)
        ]
        series = z1.series_at(point, order)
        rhs = [[series[alpha * n + i] for alpha in range(d)] for i in range(n)]
        return _solve_linear_series(matrix, rhs)

    def tangent_evaluator(point, order):
        sol = solve_components(point, order)
        return [sol[a][alpha] for alpha in range(d) for a in range(q)]

    def normal_evaluator(point, order):
        sol = solve_components(point, order)
        return [sol[q][alpha] for alpha in range(d)]

    tangent = TensorField(SmoothField(q, d * q, tangent_evaluator), (d, q))
    normal = TensorField(SmoothField(q, d, normal_evaluator), (d,))
    return tangent, normal


def tangent_traction(
    surface_stress: HyperSurfaceStress, face: FacePatch, transversal: TransversalField
) -> TractionStress:
    """Edge-density traction on the face: contract the tangent part in-face.

    The result is a traction stress over the face parameters whose action on
    a velocity is an (n-2)-form; restricting it to the face boundary gives
    the edge force.
    """
    n = surface_stress.dim
    if n < 2:
        raise ValueError("tangent traction needs chart dimension >= 2")
    restricted = restrict_Y(surface_stress, face)
    tangent, _ = transversal_decomposition(restricted, transversal)
    d, q = tangent.shape
    base = tangent.field

    def evaluator(point, order):
        series = base.series_at(point, order)
        return [
            series[alpha * q + a] * ((-1.0) ** a) for alpha in range(d) for a in range(q)
        ]

    return TractionStress(TensorField(SmoothField(q, d * q, evaluator), (d, q)))


def face_velocity(velocity: TensorField, face: FacePatch) -> TensorField:
    """Compose a chart velocity field onto the face parameters."""
    return velocity.compose(face.to_chart)


def face_jet_pairing(
    restricted: RestrictedSurfaceStress, velocity: TensorField
) -> FormField:
    """The face-volume form Z(j1 u): values and ambient derivatives of u enter."""
    face = restricted.face
    n = restricted.ambient_dim
    d = restricted.fiber_dim
    q = face.param_dim
    mapping = face.to_chart
    z0 = restricted.z0.field
    z1 = restricted.z1.field
    vol_tuple = tuple(range(q))

    def evaluator(point, order):
        mseries = mapping.series_at(point, order)
        center = tuple(s.value for s in mseries)
        offsets = [s - s.value for s in mseries]
        u_series = velocity.field.series_at(center, order + 1)
        u_on_face = [s.truncate(order).compose([o for o in offsets]) for s in u_series]
        du_on_face = [
            [s.partial(i).compose(offsets) for i in range(n)] for s in u_series
        ]
        z0_series = z0.series_at(point, order)
        z1_series = z1.series_at(point, order)
        total = TruncatedSeries.zero(q, order)
        for alpha in range(d):
            total = total + z0_series[alpha] * u_on_face[alpha]
            for i in range(n):
                total = total + z1_series[alpha * n + i] * du_on_face[alpha][i]
        return [total]

    return FormField(q, q, [vol_tuple], SmoothField(q, 1, evaluator))


def surface_divergence(
    surface_stress: HyperSurfaceStress,
    face: FacePatch,
    transversal: TransversalField,
    velocity: TensorField,
) -> FormField:
    """Face divergence paired with the full velocity jet.

    Local form: divergence of the tangent part against the velocity, minus
    the value slot, minus the transversal coefficient times the transversal
    derivative of the velocity.  Defined so that integration by parts on the
    face closes against the tangent traction.
    """
    n = surface_stress.dim
    d = surface_stress.fiber_dim
    q = face.param_dim
    restricted = restrict_Y(surface_stress, face)
    tangent, normal_coeff = transversal_decomposition(restricted, transversal)
    z0 = restricted.z0.field
    tangent_field = tangent.field
    normal_field = normal_coeff.field
    nvec_field = transversal.n_field.field
    mapping = face.to_chart
    vol_tuple = tuple(range(q))

    def evaluator(point, order):
        mseries = mapping.series_at(point, order)
        center = tuple(s.value for s in mseries)
        offsets = [s - s.value for s in mseries]
        u_series = velocity.field.series_at(center, order + 1)
        u_on_face = [s.truncate(order).compose(offsets) for s in u_series]
        du_on_face = [
            [s.partial(i).compose(offsets) for i in range(n)] for s in u_series
        ]
        tangent_series = tangent_field.series_at(point, order + 1)
        z0_series = z0.series_at(point, order)
        normal_series = normal_field.series_at(point, order)
        nvec = nvec_field.series_at(point, order)
        total = TruncatedSeries.zero(q, order)
        for alpha in range(d):
            div_tangent = TruncatedSeries.zero(q, order)
            for a in range(q):
                div_tangent = div_tangent + tangent_series[alpha * q + a].partial(a)
            total = total + div_tangent * u_on_face[alpha]
            total = total - z0_series[alpha] * u_on_face[alpha]
            transversal_derivative = TruncatedSeries.zero(q, order)
            for j in range(n):
                transversal_derivative = transversal_derivative + du_on_face[alpha][j] * nvec[j]
            total = total - normal_series[alpha] * transversal_derivative
        return [total]

    return FormField(q, q, [vol_tuple], SmoothField(q, 1, evaluator))


def tangent_edge_force(
    restricted: RestrictedSurfaceStress,
    tol: float = 1e-9,
    complement_axis: Optional[int] = None,
) -> Tuple[TractionStress, TensorField, VariationalStress1]:
    """Reduce a tangent face stress to an order-1 stress over the face.

    Returns its traction (the edge-force density on the face boundary), its
    divergence, and the reduced stress itself so the order-1 balance can be
    rerun on the face.
    """
    face = restricted.face
    if not is_tangent(restricted, tol=tol, complement_axis=complement_axis):
        raise ValueError("face stress is not tangent; edge force undefined")
    n = restricted.ambient_dim
    q = face.param_dim
    axis = complement_axis
    if axis is None:
        axis = face.boxface.axis
    basis = [0.0] * n
    basis[axis] = 1.0
    reference = TransversalField(
        face, TensorField(SmoothField.constant(q, basis), (n,))
    )
    tangent, _ = transversal_decomposition(restricted, reference)
    reduced = VariationalStress1(restricted.z0, tangent)
    return traction_projection(reduced), divergence(reduced), reduced
