"""Charts, oriented box bodies, alternating forms, pullbacks, and quadrature.

Bodies are reference boxes carried into a chart by an optional smooth patch
map, so integration always happens on boxes with tensor-product
Gauss-Legendre rules.  Boundary faces carry the orientation induced by the
body (outward for the standard volume form), and edges record the induced
orientation separately for each incident face.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fields import SmoothField
from .taylor import TruncatedSeries

__all__ = [
    "Chart",
    "TransitionMap",
    "QuadratureRule",
    "Box",
    "FormValue",
    "FormField",
    "Body",
    "FacePatch",
    "Edge",
    "interior_product",
    "pullback_form_value",
    "restrict_form",
    "integrate",
    "boundary_faces",
    "edges",
    "increasing_tuples",
    "tuple_omitting",
]

IndexTuple = Tuple[int, ...]


def increasing_tuples(dim: int, degree: int) -> List[IndexTuple]:
    return list(itertools.combinations(range(dim), degree))


def tuple_omitting(dim: int, axis: int) -> IndexTuple:
    return tuple(i for i in range(dim) if i != axis)


# -- basic containers ---------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned product of closed intervals."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("box bounds must have equal length")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"box needs lower < upper per axis, got [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def drop_axis(self, axis: int) -> Optional["Box"]:
        if self.dim == 1:
            return None
        lower = self.lower[:axis] + self.lower[axis + 1 :]
        upper = self.upper[:axis] + self.upper[axis + 1 :]
        return Box(lower, upper)

    def center(self) -> Tuple[float, ...]:
        return tuple((lo + hi) / 2.0 for lo, hi in zip(self.lower, self.upper))

    @classmethod
    def unit(cls, dim: int) -> "Box":
        return cls((0.0,) * dim, (1.0,) * dim)

    @classmethod
    def from_bounds(cls, bounds: Sequence[Sequence[float]]) -> "Box":
        return cls(tuple(float(b[0]) for b in bounds), tuple(float(b[1]) for b in bounds))


@dataclass(frozen=True)
class Chart:
    """A named coordinate patch with box extent."""

    dim: int
    box: Box
    name: str = "chart"

    def __post_init__(self):
        if self.box.dim != self.dim:
            raise ValueError("chart box dimension mismatch")


@dataclass(frozen=True)
class TransitionMap:
    """A chart change given by both directions, with jets of each available."""

    forward: SmoothField  # unprimed -> primed
    inverse: SmoothField  # primed -> unprimed

    def __post_init__(self):
        n = self.forward.dim
        if self.forward.ncomp != n or self.inverse.dim != n or self.inverse.ncomp != n:
            raise ValueError("transition maps must be square and of equal dimension")

    @property
    def dim(self) -> int:
        return self.forward.dim

    def forward_jacobian(self, point: Sequence[float]) -> np.ndarray:
        """d(primed)/d(unprimed) at an unprimed point."""
        n = self.dim
        series = self.forward.series_at(point, 1)
        return np.array(
            [[s.coefficient(_unit_exps(n, a)) for a in range(n)] for s in series]
        )

    def jacobian_det(self, point: Sequence[float]) -> float:
        return float(np.linalg.det(self.forward_jacobian(point)))

    def inverse_jets(self, primed_point: Sequence[float]):
        """Values, first, and second derivatives of the inverse at a primed point.

        Returns (x, dx, ddx) with dx[i, ip] = d x^i / d x'^ip and
        ddx[i, ip, jp] the symmetric second derivatives.
        """
        n = self.dim
        series = self.inverse.series_at(primed_point, 2)
        x = np.array([s.value for s in series])
        dx = np.zeros((n, n))
        ddx = np.zeros((n, n, n))
        for i, s in enumerate(series):
            for exps, coef in s.coeffs.items():
                total = sum(exps)
                if total == 1:
                    ip = exps.index(1)
                    dx[i, ip] = coef
                elif total == 2:
                    if 2 in exps:
                        ip = exps.index(2)
                        ddx[i, ip, ip] = 2.0 * coef
                    else:
                        ip = exps.index(1)
                        jp = exps.index(1, ip + 1)
                        ddx[i, ip, jp] = coef
                        ddx[i, jp, ip] = coef
        return x, dx, ddx

    def check_roundtrip(
        self, points: Sequence[Sequence[float]], tol: float = 1e-10
    ) -> float:
        """Largest defect of inverse(forward(x)) = x over the sample points."""
        worst = 0.0
        for x in points:
            xp = self.forward.values_at(x)
            back = self.inverse.values_at(tuple(xp))
            worst = max(worst, float(np.max(np.abs(back - np.asarray(x)))))
            if abs(self.jacobian_det(x)) < 1e-12:
                raise ValueError(f"transition jacobian is singular at {tuple(x)}")
        if worst > tol:
            raise ValueError(f"transition roundtrip defect {worst:.2e} exceeds {tol:.1e}")
        return worst


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss-Legendre rule, one order for every axis."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("quadrature order must be >= 1")

    def nodes_weights(self, box: Box) -> Tuple[np.ndarray, np.ndarray]:
        return _box_nodes(self.order, box.lower, box.upper)


@lru_cache(maxsize=None)
def _gauss_1d(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


@lru_cache(maxsize=None)
def _box_nodes(
    order: int, lower: Tuple[float, ...], upper: Tuple[float, ...]
) -> Tuple[np.ndarray, np.ndarray]:
    base_x, base_w = _gauss_1d(order)
    axes_x, axes_w = [], []
    for lo, hi in zip(lower, upper):
        half = (hi - lo) / 2.0
        axes_x.append(lo + half * (base_x + 1.0))
        axes_w.append(base_w * half)
    grids = np.meshgrid(*axes_x, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*axes_w, indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights


# -- alternating forms --------------------------------------------------------


class FormValue:
    """An alternating p-covector: coefficients on strictly increasing index tuples."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs: Optional[Dict[IndexTuple, float]] = None):
        if not 0 <= degree <= dim:
            raise ValueError(f"degree {degree} outside 0..{dim}")
        self.dim = dim
        self.degree = degree
        self.coeffs: Dict[IndexTuple, float] = {}
        if coeffs:
            for key, val in coeffs.items():
                key = tuple(key)
                if len(key) != degree or any(a >= b for a, b in zip(key, key[1:])):
                    raise ValueError(f"{key} is not a strictly increasing {degree}-tuple")
                if any(not 0 <= i < dim for i in key):
                    raise ValueError(f"index tuple {key} out of range for dim {dim}")
                if val != 0.0:
                    self.coeffs[key] = float(val)

    def coefficient(self, key: Sequence[int]) -> float:
        return self.coeffs.get(tuple(key), 0.0)

    def __add__(self, other: "FormValue") -> "FormValue":
        if self.dim != other.dim or self.degree != other.degree:
            raise ValueError("form mismatch in add")
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out.get(key, 0.0) + val
        return FormValue(self.dim, self.degree, out)

    def scale(self, factor: float) -> "FormValue":
        return FormValue(self.dim, self.degree, {k: v * factor for k, v in self.coeffs.items()})

    def __sub__(self, other: "FormValue") -> "FormValue":
        return self + other.scale(-1.0)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def max_abs_diff(self, other: "FormValue") -> float:
        return (self - other).max_abs()

    @classmethod
    def volume(cls, dim: int, coefficient: float = 1.0) -> "FormValue":
        return cls(dim, dim, {tuple(range(dim)): coefficient})

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"FormValue(dim={self.dim}, degree={self.degree}, {self.coeffs})"


def interior_product(axis: int, form: FormValue) -> FormValue:
    """Contract the basis vector along ``axis`` into the leading slot of ``form``.

    Each basis term keeps the factors after the matched index, with the sign
    alternating with the position of the matched index.
    """
    if form.degree < 1:
        raise ValueError("interior product needs a form of degree >= 1")
    out: Dict[IndexTuple, float] = {}
    for key, val in form.coeffs.items():
        if axis not in key:
            continue
        pos = key.index(axis)
        new_key = key[:pos] + key[pos + 1 :]
        out[new_key] = out.get(new_key, 0.0) + ((-1.0) ** pos) * val
    return FormValue(form.dim, form.degree - 1, out)


def _series_det(matrix: List[List[TruncatedSeries]]) -> TruncatedSeries:
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    if size == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = None
    for col in range(size):
        minor = [row[:col] + row[col + 1 :] for row in matrix[1:]]
        term = matrix[0][col] * _series_det(minor)
        if col % 2:
            term = -term
        total = term if total is None else total + term
    return total


def pullback_form_value(form: FormValue, jacobian: np.ndarray) -> FormValue:
    """Pull a p-covector back through a linear map with the given Jacobian.

    ``jacobian[i][a]`` is the derivative of target coordinate ``i`` with
    respect to source coordinate ``a``; the result lives on the source.
    """
    target_dim, source_dim = jacobian.shape
    if target_dim != form.dim:
        raise ValueError("jacobian rows must match the form dimension")
    degree = form.degree
    out: Dict[IndexTuple, float] = {}
    for key_src in increasing_tuples(source_dim, degree):
        total = 0.0
        for key_tgt, val in form.coeffs.items():
            sub = jacobian[np.ix_(key_tgt, key_src)]
            total += val * (np.linalg.det(sub) if degree else 1.0)
        if total != 0.0:
            out[key_src] = total
    return FormValue(source_dim, degree, out)


class FormField:
    """A point-to-FormValue field with series-backed coefficients."""

    def __init__(self, dim: int, degree: int, tuples: Sequence[IndexTuple], coeffs: SmoothField):
        if coeffs.dim != dim or coeffs.ncomp != len(tuples):
            raise ValueError("coefficient field does not match the tuple list")
        self.dim = dim
        self.degree = degree
        self.tuples = [tuple(t) for t in tuples]
        self.coeffs = coeffs

    @classmethod
    def from_components(
        cls, dim: int, degree: int, components: Dict[IndexTuple, SmoothField]
    ) -> "FormField":
        tuples = sorted(components)
        return cls(dim, degree, tuples, SmoothField.stack([components[t] for t in tuples]))

    def value_at(self, point: Sequence[float]) -> FormValue:
        values = self.coeffs.values_at(point)
        return FormValue(self.dim, self.degree, dict(zip(self.tuples, values)))

    def exterior_derivative(self) -> "FormField":
        """d of the form, computed from order-1 series of the coefficients."""
        if self.degree >= self.dim:
            raise ValueError("exterior derivative exceeds the chart dimension")
        out_tuples = increasing_tuples(self.dim, self.degree + 1)
        base = self.coeffs
        tuples = self.tuples
        index_of = {t: i for i, t in enumerate(out_tuples)}
        dim = self.dim

        def evaluator(point, order):
            series = base.series_at(point, order + 1)
            out = [TruncatedSeries.zero(dim, order) for _ in out_tuples]
            for comp, key in enumerate(tuples):
                for axis in range(dim):
                    if axis in key:
                        continue
                    pos = sum(1 for k in key if k < axis)
                    merged = tuple(sorted(key + (axis,)))
                    sign = (-1.0) ** pos
                    out[index_of[merged]] = out[index_of[merged]] + series[comp].partial(axis) * sign
            return out

        return FormField(dim, self.degree + 1, out_tuples,
                         SmoothField(dim, len(out_tuples), evaluator))

    def pullback(self, mapping: SmoothField) -> "FormField":
        """Pull the form back along a smooth map from a lower/equal-dim domain."""
        if mapping.ncomp != self.dim:
            raise ValueError("map target dimension must match the form dimension")
        src_dim = mapping.dim
        degree = self.degree
        if degree > src_dim:
            raise ValueError("pullback degree exceeds the source dimension")
        out_tuples = increasing_tuples(src_dim, degree)
        base = self.coeffs
        tgt_tuples = self.tuples

        def evaluator(point, order):
            mseries = mapping.series_at(point, order + 1)
            center = tuple(s.value for s in mseries)
            offsets = [(s - s.value).truncate(order) for s in mseries]
            jac = [[mseries[i].partial(a) for a in range(src_dim)] for i in range(self.dim)]
            coeff_series = [s.compose(offsets) for s in base.series_at(center, order)]
            out = []
            for key_src in out_tuples:
                total = TruncatedSeries.zero(src_dim, order)
                for comp, key_tgt in enumerate(tgt_tuples):
                    if degree == 0:
                        total = total + coeff_series[comp]
                        continue
                    sub = [[jac[i][a] for a in key_src] for i in key_tgt]
                    total = total + coeff_series[comp] * _series_det(sub)
                out.append(total)
            return out

        return FormField(src_dim, degree, out_tuples,
                         SmoothField(src_dim, len(out_tuples), evaluator))

    def __add__(self, other: "FormField") -> "FormField":
        if self.dim != other.dim or self.degree != other.degree or self.tuples != other.tuples:
            raise ValueError("form field mismatch in add")
        return FormField(self.dim, self.degree, self.tuples, self.coeffs + other.coeffs)

    def scale(self, factor: float) -> "FormField":
        return FormField(self.dim, self.degree, self.tuples, self.coeffs.scale(factor))


# -- bodies, faces, edges -----------------------------------------------------


def _insertion_field(box: Box, axis: int, side: int) -> SmoothField:
    """Map an (m-1)-box into an m-box by fixing one axis at its bound."""
    dim = box.dim
    value = box.upper[axis] if side else box.lower[axis]

    def evaluator(point, order):
        inner_dim = dim - 1
        series = []
        src = 0
        for i in range(dim):
            if i == axis:
                series.append(TruncatedSeries.constant(inner_dim, order, value))
            else:
                series.append(TruncatedSeries.variable(inner_dim, order, src, point[src]))
                src += 1
        return series

    return SmoothField(dim - 1, dim, evaluator)


@dataclass(frozen=True)
class BoxFace:
    """One facet of a box, with the orientation Stokes induces on it."""

    box: Box
    axis: int
    side: int  # 0 lower, 1 upper

    @property
    def sign(self) -> float:
        base = (-1.0) ** self.axis
        return base if self.side else -base

    @property
    def param_box(self) -> Optional[Box]:
        return self.box.drop_axis(self.axis)

    @property
    def fixed_value(self) -> float:
        return self.box.upper[self.axis] if self.side else self.box.lower[self.axis]

    def point(self) -> Tuple[float, ...]:
        """Only valid for 1-dim parents: the endpoint this face pins."""
        if self.box.dim != 1:
            raise ValueError("point() is only defined for faces of 1-dim boxes")
        return (self.fixed_value,)

    def insertion(self) -> SmoothField:
        if self.box.dim == 1:
            raise ValueError("0-dimensional faces have no insertion field")
        return _insertion_field(self.box, self.axis, self.side)

    def embed_point(self, param_point: Sequence[float]) -> Tuple[float, ...]:
        out = list(param_point)
        out.insert(self.axis, self.fixed_value)
        return tuple(out)


def box_faces(box: Box) -> List[BoxFace]:
    return [BoxFace(box, axis, side) for axis in range(box.dim) for side in (0, 1)]


@dataclass(frozen=True)
class Body:
    """An oriented n-box region, optionally pushed into the chart by a patch map."""

    chart: Chart
    box: Box
    patch: Optional[SmoothField] = None
    orientation: float = 1.0

    def __post_init__(self):
        if self.box.dim != self.chart.dim:
            raise ValueError("body box dimension must match the chart")
        if self.patch is not None and (
            self.patch.dim != self.chart.dim or self.patch.ncomp != self.chart.dim
        ):
            raise ValueError("patch map must be chart-dim to chart-dim")

    @property
    def dim(self) -> int:
        return self.chart.dim

    def chart_map(self) -> SmoothField:
        return self.patch if self.patch is not None else SmoothField.coordinates(self.dim)

    def check_embedding(self, rule: QuadratureRule) -> float:
        """Smallest |det| of the patch Jacobian over quadrature nodes (1.0 if no patch)."""
        if self.patch is None:
            return 1.0
        nodes, _ = rule.nodes_weights(self.box)
        worst = np.inf
        for node in nodes:
            series = self.patch.series_at(tuple(node), 1)
            jac = np.array(
                [[s.coefficient(_unit_exps(self.dim, a)) for a in range(self.dim)] for s in series]
            )
            worst = min(worst, abs(np.linalg.det(jac)))
        if worst <= 1e-12:
            raise ValueError("body patch map is degenerate at a quadrature node")
        return worst


def _unit_exps(dim: int, axis: int) -> Tuple[int, ...]:
    out = [0] * dim
    out[axis] = 1
    return tuple(out)


@dataclass(frozen=True)
class FacePatch:
    """A boundary face: a parameterized (n-1)-patch with induced orientation."""

    label: str
    chart: Chart
    param_box: Optional[Box]  # None means a 0-dimensional patch
    to_chart: Optional[SmoothField]
    sign: float
    boxface: Optional[BoxFace] = None
    point: Optional[Tuple[float, ...]] = None  # chart point for 0-dim patches
    closed: bool = False

    @property
    def param_dim(self) -> int:
        return self.param_box.dim if self.param_box is not None else 0

    def chart_point(self, param_point: Sequence[float]) -> Tuple[float, ...]:
        if self.param_box is None:
            return self.point
        return tuple(self.to_chart.values_at(param_point))


@dataclass(frozen=True)
class Edge:
    """Shared boundary of two faces; orientation is recorded per incident face.

    ``face_signs[label]`` is the total factor (face orientation times the
    orientation the face induces on this edge) multiplying an integral over
    the canonical edge parameters.
    """

    labels: Tuple[str, str]
    param_box: Optional[Box]
    to_chart: Optional[SmoothField]
    point: Optional[Tuple[float, ...]]
    face_signs: Dict[str, float]


def face_label(axis: int, side: int) -> str:
    return f"x{axis + 1}-{'upper' if side else 'lower'}"


def boundary_faces(body: Body) -> List[FacePatch]:
    """The 2n oriented facets whose signed sum realizes the Stokes boundary."""
    out = []
    chart_map = body.patch
    for bf in box_faces(body.box):
        label = face_label(bf.axis, bf.side)
        if body.box.dim == 1:
            pt = bf.point()
            chart_pt = tuple(chart_map.values_at(pt)) if chart_map is not None else pt
            out.append(
                FacePatch(label, body.chart, None, None, bf.sign * body.orientation,
                          boxface=bf, point=chart_pt)
            )
            continue
        mapping = bf.insertion()
        if chart_map is not None:
            mapping = chart_map.compose(mapping)
        out.append(
            FacePatch(label, body.chart, bf.param_box, mapping,
                      bf.sign * body.orientation, boxface=bf)
        )
    return out


def face_boundary_pieces(face: FacePatch) -> List[Tuple[BoxFace, "FacePatch"]]:
    """Oriented boundary facets of a face, in the face's own parameter box."""
    if face.param_box is None:
        raise ValueError("0-dimensional faces have no boundary")
    pieces = []
    for bf in box_faces(face.param_box):
        if face.param_box.dim == 1:
            piece = FacePatch(
                f"{face.label}/{face_label(bf.axis, bf.side)}", face.chart,
                None, None, bf.sign, boxface=bf, point=bf.point(),
            )
        else:
            piece = FacePatch(
                f"{face.label}/{face_label(bf.axis, bf.side)}", face.chart,
                bf.param_box, bf.insertion(), bf.sign, boxface=bf,
            )
        pieces.append((bf, piece))
    return pieces


def edges(body: Body) -> List[Edge]:
    """All nonempty pairwise face intersections with per-face induced signs."""
    n = body.dim
    if n < 2:
        return []
    out = []
    for axis_i, axis_j in itertools.combinations(range(n), 2):
        for side_i in (0, 1):
            for side_j in (0, 1):
                label_i = face_label(axis_i, side_i)
                label_j = face_label(axis_j, side_j)
                # Orientation each face induces on this edge: locate the edge
                # as a facet of the face's parameter box.
                signs: Dict[str, float] = {}
                for (ax_face, side_face), (ax_other, side_other) in (
                    ((axis_i, side_i), (axis_j, side_j)),
                    ((axis_j, side_j), (axis_i, side_i)),
                ):
                    face_bf = BoxFace(body.box, ax_face, side_face)
                    face_axes = [a for a in range(n) if a != ax_face]
                    p = face_axes.index(ax_other)
                    piece = BoxFace(face_bf.param_box, p, side_other)
                    signs[face_label(ax_face, side_face)] = face_bf.sign * piece.sign
                # Canonical edge parameterization: drop both axes, keep order.
                fixed = {axis_i: side_i, axis_j: side_j}
                if n == 2:
                    ref_pt = tuple(
                        body.box.upper[a] if fixed[a] else body.box.lower[a] for a in range( n)
                    )
                    chart_pt = (
                        tuple(body.patch.values_at(ref_pt)) if body.patch is not None else ref_pt
                    )
                    out.append(
                        Edge((label_i, label_j), None, None, chart_pt, signs)
                    )
                else:
                    keep = [a for a in range(n) if a not in fixed]
                    lower = tuple(body.box.lower[a] for a in keep)
                    upper = tuple(body.box.upper[a] for a in keep)
                    mapping = _double_insertion(body.box, fixed)
                    if body.patch is not None:
                        mapping = body.patch.compose(mapping)
                    out.append(
                        Edge((label_i, label_j), Box(lower, upper), mapping, None, signs)
                    )
    return out


def _double_insertion(box: Box, fixed: Dict[int, int]) -> SmoothField:
    dim = box.dim
    inner_dim = dim - len(fixed)

    def evaluator(point, order):
        series = []
        src = 0
        for axis in range(dim):
            if axis in fixed:
                value = box.upper[axis] if fixed[axis] else box.lower[axis]
                series.append(TruncatedSeries.constant(inner_dim, order, value))
            else:
                series.append(TruncatedSeries.variable(inner_dim, order, src, point[src]))
                src += 1
        return series

    return SmoothField(inner_dim, dim, evaluator)


# -- integration --------------------------------------------------------------


def integrate(form: FormField, box: Box, rule: QuadratureRule, sign: float = 1.0) -> float:
    """Gauss-Legendre integral of a top-degree form over a parameter box."""
    if form.degree != box.dim:
        raise ValueError(
            f"form degree {form.degree} does not match patch dimension {box.dim}"
        )
    if form.dim != box.dim:
        raise ValueError("form must live on the patch parameters")
    full = tuple(range(box.dim))
    nodes, weights = rule.nodes_weights(box)
    total = 0.0
    for node, w in zip(nodes, weights):
        total += w * form.value_at(tuple(node)).coefficient(full)
    return sign * total


def integrate_over_face(form_on_chart: FormField, face: FacePatch, rule: QuadratureRule) -> float:
    """Restrict an (n-1)-form on the chart to a face and integrate it."""
    if face.param_box is None:
        # 0-dimensional face of a 1-dim body: signed evaluation of a 0-form.
        return face.sign * form_on_chart.value_at(face.point).coefficient(())
    restricted = form_on_chart.pullback(face.to_chart)
    return integrate(restricted, face.param_box, rule, face.sign)


def restrict_form(form: FormField, face: FacePatch) -> FormField:
    """Pull a chart form back onto a face's parameters."""
    if face.param_box is None:
        raise ValueError("cannot restrict a form to a 0-dimensional patch")
    return form.pullback(face.to_chart)


def integrate_form_value_piece(form: FormField, piece: FacePatch, rule: QuadratureRule) -> float:
    """Integrate a form living on a parent parameter space over a boundary piece.

    The piece is a facet of the parent box; 0-dimensional pieces reduce to a
    signed point evaluation of a 0-form.
    """
    if piece.param_box is None:
        value = form.value_at(piece.point).coefficient(())
        return piece.sign * value
    restricted = form.pullback(piece.to_chart)
    return integrate(restricted, piece.param_box, rule, piece.sign)
