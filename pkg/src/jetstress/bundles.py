"""Jet-bundle structure: projections, vertical parts, iterated jets, holonomy.

An iterated jet carries four blocks (B0, B1, B2, B3): the value and
derivative slots of a first-jet section, then the derivatives of both.  No
symmetry is imposed on B3; symmetry is exactly what holonomy restores.

Only the first iteration is stored concretely.  Deeper orders are reached by
re-applying the same construction with the fiber itself a jet bundle, not by
dedicated containers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .fields import JetValue, SmoothField, TensorField

__all__ = [
    "BundleSpec",
    "IteratedJetValue",
    "JetSectionField",
    "HolonomyClass",
    "project_jet",
    "include_holonomic",
    "symmetrize_iterated",
    "vertical_part",
    "holonomy_class",
]


@dataclass(frozen=True)
class BundleSpec:
    """Base and fiber dimensions, with an optional fiber frame change."""

    base_dim: int
    fiber_dim: int
    frame_change: Optional[TensorField] = None  # shape (d, d)

    def __post_init__(self):
        if self.base_dim < 1 or self.fiber_dim < 1:
            raise ValueError("bundle dimensions must be positive")
        if self.frame_change is not None:
            if self.frame_change.shape != (self.fiber_dim, self.fiber_dim):
                raise ValueError("frame change must be a (d, d) field")

    def check_invertible(self, points: Sequence[Sequence[float]], tol: float = 1e-12) -> None:
        if self.frame_change is None:
            return
        for x in points:
            if abs(np.linalg.det(self.frame_change.at(x))) <= tol:
                raise ValueError(f"frame change is singular at {tuple(x)}")


@dataclass(frozen=True)
class IteratedJetValue:
    """Pointwise data of a first jet of a first-jet section.

    b0: (d,) values; b1: (d, n) first-jet slots; b2: (d, n) derivatives of b0;
    b3: (d, n, n) derivatives of b1, not necessarily symmetric.
    """

    b0: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray

    def __post_init__(self):
        d = self.b0.shape[0]
        n = self.b1.shape[1]
        if self.b1.shape != (d, n) or self.b2.shape != (d, n) or self.b3.shape != (d, n, n):
            raise ValueError("iterated jet blocks have inconsistent shapes")

    @property
    def fiber_dim(self) -> int:
        return self.b0.shape[0]

    @property
    def dim(self) -> int:
        return self.b1.shape[1]

    @classmethod
    def zero(cls, dim: int, fiber_dim: int) -> "IteratedJetValue":
        return cls(
            np.zeros(fiber_dim),
            np.zeros((fiber_dim, dim)),
            np.zeros((fiber_dim, dim)),
            np.zeros((fiber_dim, dim, dim)),
        )


class JetSectionField:
    """A section of the first-jet bundle given by its two component fields.

    ``a0`` has shape (d,), ``a1`` shape (d, n).  The section is compatible
    (holonomic) exactly when a1 equals the derivative of a0.
    """

    def __init__(self, a0: TensorField, a1: TensorField):
        if len(a0.shape) != 1 or len(a1.shape) != 2:
            raise ValueError("expected shapes (d,) and (d, n)")
        if a1.shape != (a0.shape[0], a0.dim) or a0.dim != a1.dim:
            raise ValueError("jet section blocks have inconsistent shapes")
        self.a0 = a0
        self.a1 = a1

    @property
    def dim(self) -> int:
        return self.a0.dim

    @property
    def fiber_dim(self) -> int:
        return self.a0.shape[0]

    @classmethod
    def from_velocity(cls, u: TensorField) -> "JetSectionField":
        """The compatible section induced by a velocity field (a1 = grad a0)."""
        if len(u.shape) != 1:
            raise ValueError("velocity field must have shape (d,)")
        d, n = u.shape[0], u.dim
        partials = [u.partial(i).field for i in range(n)]
        # Row-major (d, n): component alpha*n + i is d(u^alpha)/dx^i.
        comps = []
        for alpha in range(d):
            for i in range(n):
                comps.append(partials[i].component(alpha))
        return cls(u, TensorField(SmoothField.stack(comps), (d, n)))

    def iterated_jet_at(self, point: Sequence[float]) -> IteratedJetValue:
        """First jet of this section: differentiates both blocks at the point."""
        n, d = self.dim, self.fiber_dim
        jet0 = self.a0.field.series_at(point, 1)
        jet1 = self.a1.field.series_at(point, 1)
        b0 = np.array([s.value for s in jet0])
        b2 = np.zeros((d, n))
        for alpha, s in enumerate(jet0):
            for i in range(n):
                exps = [0] * n
                exps[i] = 1
                b2[alpha, i] = s.coefficient(tuple(exps))
        b1 = np.zeros((d, n))
        b3 = np.zeros((d, n, n))
        for alpha in range(d):
            for j in range(n):
                s = jet1[alpha * n + j]
                b1[alpha, j] = s.value
                for i in range(n):
                    exps = [0] * n
                    exps[i] = 1
                    b3[alpha, j, i] = s.coefficient(tuple(exps))
        return IteratedJetValue(b0, b1, b2, b3)

    def values_at(self, point: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        return self.a0.at(point), self.a1.at(point)


def project_jet(jet: JetValue, order: int) -> JetValue:
    """Truncate a jet to a lower order (the natural jet-bundle projection)."""
    return jet.truncated(order)


def include_holonomic(jet: JetValue) -> IteratedJetValue:
    """Embed an order-2 jet as an iterated jet: duplicate the first-order slot."""
    if jet.order != 2:
        raise ValueError("holonomic inclusion expects an order-2 jet")
    return IteratedJetValue(
        jet.array(0).copy(), jet.array(1).copy(), jet.array(1).copy(), jet.array(2).copy()
    )


def symmetrize_iterated(b3: np.ndarray) -> np.ndarray:
    """Symmetrize the trailing two axes: the projection back onto order-2 data."""
    if b3.ndim != 3 or b3.shape[1] != b3.shape[2]:
        raise ValueError("expected a (d, n, n) block")
    return 0.5 * (b3 + np.transpose(b3, (0, 2, 1)))


def vertical_part(jet: JetValue, base_order: int) -> Tuple[Tuple[np.ndarray, ...], bool]:
    """Upper-order arrays of a jet, plus whether the lower orders all vanish."""
    if not 0 <= base_order < jet.order:
        raise ValueError("base order must satisfy 0 <= r < jet order")
    lower_zero = all(np.all(jet.array(p) == 0.0) for p in range(base_order + 1))
    upper = tuple(jet.array(p) for p in range(base_order + 1, jet.order + 1))
    return upper, lower_zero


class HolonomyClass(str, Enum):
    HOLONOMIC = "holonomic"
    SEMI_HOLONOMIC = "semi-holonomic"
    BASE_COMPATIBLE = "base-compatible"
    NONE = "none"


def holonomy_class(
    section: JetSectionField,
    sample_points: Sequence[Sequence[float]],
    tol: float = 1e-9,
) -> HolonomyClass:
    """Classify a first-jet section by sampled compatibility residuals.

    Base compatibility tests a1 against the derivative of a0; the stronger
    classes additionally require the derivative slots of the induced iterated
    jet to match (automatic here) and its b3 block to be symmetric.
    """
    base_residual = 0.0
    semi_residual = 0.0
    sym_residual = 0.0
    for x in sample_points:
        it = section.iterated_jet_at(x)
        base_residual = max(base_residual, float(np.max(np.abs(it.b2 - it.b1))))
        # b2 = d(a0) and b3 = d(a1) by construction; the semi-holonomic
        # condition beyond base compatibility is b1 = b2 again, so the same
        # residual feeds both rungs.
        semi_residual = base_residual
        sym_residual = max(
            sym_residual, float(np.max(np.abs(it.b3 - np.transpose(it.b3, (0, 2, 1)))))
        )
    if base_residual > tol:
        return HolonomyClass.NONE
    if semi_residual > tol:
        return HolonomyClass.BASE_COMPATIBLE  # pragma: no cover - unreachable for j1 sections
    if sym_residual > tol:
        return HolonomyClass.SEMI_HOLONOMIC
    return HolonomyClass.HOLONOMIC


def lattice_points(box_lower: Sequence[float], box_upper: Sequence[float], per_axis: int = 3):
    """Regular interior sampling lattice used by classification and checks."""
    axes = [
        np.linspace(lo, hi, per_axis + 2)[1:-1]
        for lo, hi in zip(box_lower, box_upper)
    ]
    return [tuple(p) for p in itertools.product(*axes)]
