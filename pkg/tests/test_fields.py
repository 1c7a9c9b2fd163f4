"""Smooth fields: exact jets, the finite-difference oracle, and field algebra."""

import math
import random

import numpy as np
import pytest

from jetstress.fields import (
    SmoothField,
    TensorField,
    finite_difference_jet,
    jet_extension,
)


def test_monomial_jet_one_dim():
    # w = x^2 at x=1: value 1, first derivative 2, second derivative 2.
    w = SmoothField.from_polynomials(1, [[((2,), 1.0)]])
    jet = jet_extension(w, (1.0,), 2)
    assert jet.array(0)[0] == pytest.approx(1.0)
    assert jet.array(1)[0, 0] == pytest.approx(2.0)
    assert jet.array(2)[0, 0, 0] == pytest.approx(2.0)


def test_constant_field_jet():
    w = SmoothField.constant(2, [3.5])
    jet = jet_extension(w, (0.3, -0.2), 2)
    assert jet.array(0)[0] == pytest.approx(3.5)
    assert np.all(jet.array(1) == 0.0)
    assert np.all(jet.array(2) == 0.0)


def test_sine_jet_against_finite_differences():
    # Frozen analytic values (0, 1, 0, -1) for sin at 0, plus the FD oracle.
    w = SmoothField.from_expressions(1, ["sin(x1)"])
    jet = jet_extension(w, (0.0,), 3)
    assert jet.array(0)[0] == pytest.approx(0.0, abs=1e-15)
    assert jet.array(1)[0, 0] == pytest.approx(1.0, abs=1e-15)
    assert jet.array(2)[0, 0, 0] == pytest.approx(0.0, abs=1e-15)
    assert jet.array(3)[0, 0, 0, 0] == pytest.approx(-1.0, abs=1e-14)
    fd = finite_difference_jet(w, (0.0,), 2, 1e-4)
    assert abs(fd.array(1)[0, 0] - jet.array(1)[0, 0]) < 1e-7
    assert abs(fd.array(2)[0, 0, 0] - jet.array(2)[0, 0, 0]) < 1e-6


def test_finite_difference_quadratic_exact_and_exp():
    w = SmoothField.from_polynomials(1, [[((2,), 1.0)]])
    fd = finite_difference_jet(w, (1.0,), 2, 1e-4)
    assert abs(fd.array(1)[0, 0] - 2.0) < 1e-7
    wexp = SmoothField.from_expressions(1, ["exp(x1)"])
    fd = finite_difference_jet(wexp, (0.0,), 2, 1e-4)
    assert abs(fd.array(2)[0, 0, 0] - 1.0) < 1e-6
    zero = SmoothField.constant(3, [0.0, 0.0])
    fdz = finite_difference_jet(zero, (0.1, 0.2, 0.3), 2)
    assert all(np.all(a == 0.0) for a in fdz.arrays)


def test_polynomial_jets_exact_to_machine():
    rng = random.Random(11)
    for _ in range(10):
        n, k = 2, 3
        table = []
        for exps in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (1, 2)]:
            table.append((exps, rng.uniform(-2, 2)))
        w = SmoothField.from_polynomials(n, [table])
        x = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        jet = jet_extension(w, x, k)

        # Spot-check the mixed second derivative against symbolic differentiation.
        d_dxdy = sum(
            c * e[0] * e[1] * x[0] ** (e[0] - 1) * x[1] ** (e[1] - 1)
            for e, c in table
            if e[0] >= 1 and e[1] >= 1
        )
        rel = abs(jet.array(2)[0, 0, 1] - d_dxdy) / max(1.0, abs(d_dxdy))
        assert rel < 1e-13


def test_jet_symmetry_exact():
    w = SmoothField.from_expressions(2, ["sin(x1)*exp(x2) + x1^3*x2^2"])
    jet = jet_extension(w, (0.4, -0.7), 3)
    a2, a3 = jet.array(2), jet.array(3)
    assert np.array_equal(a2[0], a2[0].T)
    for perm in [(0, 2, 1), (1, 0, 2), (2, 1, 0)]:
        assert np.array_equal(a3[0], np.transpose(a3[0], perm))


def test_transcendental_jet_vs_fd_on_grid():
    # Mixed polynomial / analytic fields across |x| <= 2 stay within 1e-6 of FD.
    fields = [
        SmoothField.from_expressions(2, ["sin(x1)*cos(x2)"]),
        SmoothField.from_expressions(2, ["exp(x1 - x2) + x1^2"]),
        SmoothField.from_expressions(2, ["cos(x1*x2)"]),
    ]
    points = [(-2.0, 1.0), (0.5, -1.5), (1.0, 2.0)]
    for w in fields:
        for x in points:
            exact = jet_extension(w, x, 2)
            approx = finite_difference_jet(w, x, 2, 1e-4)
            for p in range(3):
                assert np.max(np.abs(exact.array(p) - approx.array(p))) < 1e-6


def test_field_composition_chain_rule():
    # (f o g) with f(y) = y^2, g(x) = sin(x): derivative 2 sin x cos x.
    f = SmoothField.from_polynomials(1, [[((2,), 1.0)]])
    g = SmoothField.from_expressions(1, ["sin(x1)"])
    h = f.compose(g)
    x0 = 0.6
    jet = jet_extension(h, (x0,), 1)
    assert jet.array(1)[0, 0] == pytest.approx(2 * math.sin(x0) * math.cos(x0), abs=1e-14)


def test_partial_field_and_compose_partial():
    w = SmoothField.from_polynomials(2, [[((2, 1), 1.0)]])  # x1^2 x2
    dw = w.partial(0)
    assert dw.values_at((2.0, 3.0))[0] == pytest.approx(12.0)
    ddw = dw.partial(1)
    assert ddw.values_at((2.0, 3.0))[0] == pytest.approx(4.0)


def test_tensor_field_shape_and_component():
    field = SmoothField.from_polynomials(
        2, [[((1, 0), 1.0)], [((0, 1), 2.0)], [((0, 0), 3.0)], [((1, 1), 1.0)]]
    )
    tf = TensorField(field, (2, 2))
    arr = tf.at((1.0, 2.0))
    assert arr.shape == (2, 2)
    assert arr[0, 0] == pytest.approx(1.0)
    assert arr[0, 1] == pytest.approx(4.0)
    assert arr[1, 0] == pytest.approx(3.0)
    assert arr[1, 1] == pytest.approx(2.0)
    comp = tf.component((1, 1))
    assert comp.values_at((1.0, 2.0))[0] == pytest.approx(2.0)


def test_jet_projection_truncation():
    w = SmoothField.from_expressions(1, ["exp(x1)"])
    jet = jet_extension(w, (0.0,), 3)
    lower = jet.truncated(1)
    assert lower.order == 1
    assert lower.array(1)[0, 0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        jet.truncated(4)
