"""Smooth fields, jet values, and the jet-extraction/finite-difference pair.

A :class:`SmoothField` is a deterministic evaluator mapping (point, order)
to one truncated Taylor series per component.  Fields built from monomial
tables or expression strings differentiate exactly; every derived field
(partials, compositions, algebraic combinations) keeps that exactness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .exprs import parse_expression
from .taylor import MultiIndex, TruncatedSeries

__all__ = [
    "SmoothField",
    "TensorField",
    "JetValue",
    "jet_extension",
    "finite_difference_jet",
]

Point = Tuple[float, ...]
Evaluator = Callable[[Point, int], List[TruncatedSeries]]


def coordinate_series(point: Sequence[float], order: int) -> List[TruncatedSeries]:
    """Identity chart functions expanded about ``point``."""
    dim = len(point)
    return [TruncatedSeries.variable(dim, order, axis, float(point[axis])) for axis in range(dim)]


class SmoothField:
    """A map from an n-dimensional chart domain to R^m with exact jets.

    Attributes:
        dim: number of input coordinates.
        ncomp: number of output components.
    """

    __slots__ = ("dim", "ncomp", "_evaluator")

    def __init__(self, dim: int, ncomp: int, evaluator: Evaluator):
        if dim < 1 or ncomp < 1:
            raise ValueError("dim and ncomp must be positive")
        self.dim = dim
        self.ncomp = ncomp
        self._evaluator = evaluator

    # -- evaluation ----------------------------------------------------------

    def series_at(self, point: Sequence[float], order: int) -> List[TruncatedSeries]:
        point = tuple(float(c) for c in point)
        if len(point) != self.dim:
            raise ValueError(f"point has dim {len(point)}, field expects {self.dim}")
        series = self._evaluator(point, order)
        if len(series) != self.ncomp:
            raise RuntimeError("field evaluator returned wrong component count")
        for s in series:
            if s.dim != self.dim or s.order != order:
                raise RuntimeError("field evaluator returned mismatched series")
        return series

    def values_at(self, point: Sequence[float]) -> np.ndarray:
        return np.array([s.value for s in self.series_at(point, 0)])

    def jet_at(self, point: Sequence[float], order: int) -> "JetValue":
        return jet_extension(self, point, order)

    # -- derived fields --------------------------------------------------------

    def partial(self, axis: int) -> "SmoothField":
        """Componentwise partial derivative along coordinate ``axis``."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range")
        base = self

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            return [s.partial(axis) for s in base.series_at(point, order + 1)]

        return SmoothField(self.dim, self.ncomp, evaluator)

    def compose(self, inner: "SmoothField") -> "SmoothField":
        """The composite field ``self(inner(.))``."""
        if inner.ncomp != self.dim:
            raise ValueError(
                f"composition mismatch: inner has {inner.ncomp} components, "
                f"outer expects {self.dim} inputs"
            )
        outer = self

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            inner_series = inner.series_at(point, order)
            center = tuple(s.value for s in inner_series)
            offsets = [s - s.value for s in inner_series]
            outer_series = outer.series_at(center, order)
            return [s.compose(offsets) for s in outer_series]

        return SmoothField(inner.dim, self.ncomp, evaluator)

    def component(self, index: int) -> "SmoothField":
        base = self

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            return [base.series_at(point, order)[index]]

        return SmoothField(self.dim, 1, evaluator)

    def __add__(self, other: "SmoothField") -> "SmoothField":
        if self.dim != other.dim or self.ncomp != other.ncomp:
            raise ValueError("field shapes do not match")
        a, b = self, other

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            return [x + y for x, y in zip(a.series_at(point, order), b.series_at(point, order))]

        return SmoothField(self.dim, self.ncomp, evaluator)

    def __sub__(self, other: "SmoothField") -> "SmoothField":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "SmoothField":
        base = self
        factor = float(factor)

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            return [s * factor for s in base.series_at(point, order)]

        return SmoothField(self.dim, self.ncomp, evaluator)

    # -- constructors -----------------------------------------------------------

    @classmethod
    def from_series_maps(
        cls, dim: int, maps: Sequence[Callable[[List[TruncatedSeries]], TruncatedSeries]]
    ) -> "SmoothField":
        """Build from per-component functions of the coordinate series."""
        maps = list(maps)

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            variables = coordinate_series(point, order)
            return [fn(variables) for fn in maps]

        return cls(dim, len(maps), evaluator)

    @classmethod
    def constant(cls, dim: int, values: Sequence[float]) -> "SmoothField":
        values = [float(v) for v in values]

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            return [TruncatedSeries.constant(dim, order, v) for v in values]

        return cls(dim, len(values), evaluator)

    @classmethod
    def coordinates(cls, dim: int) -> "SmoothField":
        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            return coordinate_series(point, order)

        return cls(dim, dim, evaluator)

    @classmethod
    def from_polynomials(
        cls, dim: int, components: Sequence[Sequence[Tuple[Sequence[int], float]]]
    ) -> "SmoothField":
        """Each component is a monomial table [(exponents, coefficient), ...]."""
        tables = [
            [(MultiIndex(exps), float(coef)) for exps, coef in comp] for comp in components
        ]

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            variables = coordinate_series(point, order)
            powers: List[dict] = [{0: TruncatedSeries.constant(dim, order, 1.0), 1: v}
                                  for v in variables]

            def power(axis: int, e: int) -> TruncatedSeries:
                cache = powers[axis]
                if e not in cache:
                    cache[e] = power(axis, e - 1) * cache[1]
                return cache[e]

            out = []
            for table in tables:
                total = TruncatedSeries.zero(dim, order)
                for exps, coef in table:
                    term = TruncatedSeries.constant(dim, order, coef)
                    for axis, e in enumerate(exps):
                        if e:
                            term = term * power(axis, e)
                    total = total + term
                out.append(total)
            return out

        return cls(dim, len(tables), evaluator)

    @classmethod
    def from_expressions(cls, dim: int, expressions: Sequence[str]) -> "SmoothField":
        return cls.from_series_maps(dim, [parse_expression(text, dim) for text in expressions])

    @staticmethod
    def stack(fields: Sequence["SmoothField"]) -> "SmoothField":
        fields = list(fields)
        dim = fields[0].dim
        if any(f.dim != dim for f in fields):
            raise ValueError("stacked fields must share the input dimension")
        ncomp = sum(f.ncomp for f in fields)

        def evaluator(point: Point, order: int) -> List[TruncatedSeries]:
            out: List[TruncatedSeries] = []
            for f in fields:
                out.extend(f.series_at(point, order))
            return out

        return SmoothField(dim, ncomp, evaluator)


@dataclass(frozen=True)
class TensorField:
    """A SmoothField with a tensor shape layered on its flat component list.

    Components are stored row-major: ``component index = ravel(shape index)``.
    """

    field: SmoothField
    shape: Tuple[int, ...]

    def __post_init__(self):
        expected = int(np.prod(self.shape)) if self.shape else 1
        if expected != self.field.ncomp:
            raise ValueError(f"shape {self.shape} needs {expected} components, "
                             f"field has {self.field.ncomp}")

    @property
    def dim(self) -> int:
        return self.field.dim

    def at(self, point: Sequence[float]) -> np.ndarray:
        return self.field.values_at(point).reshape(self.shape)

    def series_at(self, point: Sequence[float], order: int) -> np.ndarray:
        flat = self.field.series_at(point, order)
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(self.shape)

    def partial(self, axis: int) -> "TensorField":
        return TensorField(self.field.partial(axis), self.shape)

    def compose(self, inner: SmoothField) -> "TensorField":
        return TensorField(self.field.compose(inner), self.shape)

    def component(self, index: Tuple[int, ...]) -> SmoothField:
        flat = int(np.ravel_multi_index(index, self.shape)) if self.shape else 0
        return self.field.component(flat)

    @classmethod
    def zero(cls, dim: int, shape: Tuple[int, ...]) -> "TensorField":
        n = int(np.prod(shape)) if shape else 1
        return cls(SmoothField.constant(dim, [0.0] * n), shape)


@dataclass(frozen=True)
class JetValue:
    """Pointwise derivative arrays of a field up to a given order.

    ``arrays[p]`` has shape ``(d,) + (n,)*p`` and is symmetric in the
    trailing axes by construction.
    """

    dim: int
    fiber_dim: int
    order: int
    arrays: Tuple[np.ndarray, ...]

    def array(self, p: int) -> np.ndarray:
        if not 0 <= p <= self.order:
            raise ValueError(f"order {p} outside jet range 0..{self.order}")
        return self.arrays[p]

    def truncated(self, order: int) -> "JetValue":
        if not 0 <= order <= self.order:
            raise ValueError(f"cannot project order-{self.order} jet to order {order}")
        return JetValue(self.dim, self.fiber_dim, order, self.arrays[: order + 1])

    @classmethod
    def zero(cls, dim: int, fiber_dim: int, order: int) -> "JetValue":
        arrays = tuple(
            np.zeros((fiber_dim,) + (dim,) * p) for p in range(order + 1)
        )
        return cls(dim, fiber_dim, order, arrays)

    @classmethod
    def from_series(cls, series: Sequence[TruncatedSeries], order: int) -> "JetValue":
        dim = series[0].dim
        d = len(series)
        arrays = [np.zeros((d,) + (dim,) * p) for p in range(order + 1)]
        for alpha, s in enumerate(series):
            for exps, coef in s.coeffs.items():
                p = sum(exps)
                if p > order:
                    continue
                value = coef * MultiIndex(exps).factorial()
                if p == 0:
                    arrays[0][alpha] = value
                    continue
                axes = MultiIndex(exps).axes()
                for perm in set(itertools.permutations(axes)):
                    arrays[p][(alpha,) + perm] = value
        return cls(dim, d, order, tuple(arrays))


def jet_extension(field: SmoothField, point: Sequence[float], order: int) -> JetValue:
    """Exact derivative arrays of ``field`` at ``point`` up to ``order``."""
    if order < 0:
        raise ValueError("jet order must be >= 0")
    series = field.series_at(point, order)
    return JetValue.from_series(series, order)


def finite_difference_jet(
    field: SmoothField, point: Sequence[float], order: int, step: float = 1e-4
) -> JetValue:
    """Central-difference estimate of the jet, an oracle for ``jet_extension``.

    Supports orders 0..2; exact for quadratics up to roundoff.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    if not 0 <= order <= 2:
        raise ValueError("finite differences implemented for orders 0..2 only")
    point = tuple(float(c) for c in point)
    n = field.dim

    def val(p: Sequence[float]) -> np.ndarray:
        return field.values_at(p)

    def shift(base: Point, axis: int, amount: float) -> Point:
        out = list(base)
        out[axis] += amount
        return tuple(out)

    arrays = [val(point)]
    d = arrays[0].shape[0]
    if order >= 1:
        a1 = np.zeros((d, n))
        for i in range(n):
            a1[:, i] = (val(shift(point, i, step)) - val(shift(point, i, -step))) / (2 * step)
        arrays.append(a1)
    if order >= 2:
        a2 = np.zeros((d, n, n))
        center = arrays[0]
        for i in range(n):
            a2[:, i, i] = (
                val(shift(point, i, step)) - 2 * center + val(shift(point, i, -step))
            ) / step**2
            for j in range(i + 1, n):
                pp = val(shift(shift(point, i, step), j, step))
                pm = val(shift(shift(point, i, step), j, -step))
                mp = val(shift(shift(point, i, -step), j, step))
                mm = val(shift(shift(point, i, -step), j, -step))
                mixed = (pp - pm - mp + mm) / (4 * step**2)
                a2[:, i, j] = mixed
                a2[:, j, i] = mixed
        arrays.append(a2)
    return JetValue(n, d, order, tuple(arrays))
