"""Chart/frame transformation laws and the contraction non-invariance result."""

import itertools
import random

import numpy as np
import pytest

from jetstress.covariance import (
    FrameChange,
    invariance_check,
    predicted_contraction_defect,
    transform_jet2,
    transform_stress1,
    transform_stress2,
    transformed_velocity_field,
)
from jetstress.fields import SmoothField, TensorField, jet_extension
from jetstress.geometry import TransitionMap
from jetstress.nonholonomic import VariationalStress2
from jetstress.stress import VariationalStress1


def tensor_poly(dim, shape, tables):
    return TensorField(SmoothField.from_polynomials(dim, tables), shape)


def tensor_const(dim, shape, values):
    flat = np.asarray(values, dtype=float).reshape(-1)
    return TensorField(SmoothField.constant(dim, list(flat)), shape)


def random_poly_table(rng, n, degree, nterms=3):
    pool = [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    return [(rng.choice(pool), rng.uniform(-1, 1)) for _ in range(nterms)]


def identity_transition(n):
    coords = [f"x{i+1}" for i in range(n)]
    return TransitionMap(
        SmoothField.from_expressions(n, coords), SmoothField.from_expressions(n, coords)
    )


def quadratic_transition():
    forward = SmoothField.from_expressions(2, ["x1 + x2^2", "x2"])
    inverse = SmoothField.from_expressions(2, ["x1 - x2^2", "x2"])
    return TransitionMap(forward, inverse)


def affine_transition():
    forward = SmoothField.from_expressions(2, ["2*x1 + 0.5*x2 + 0.1", "x2 - 0.3*x1"])
    # Inverse of [[2, .5], [-.3, 1]]: det = 2.15.
    det = 2.0 * 1.0 - 0.5 * (-0.3)
    a, b, c, d = 1.0 / det, -0.5 / det, 0.3 / det, 2.0 / det
    inverse = SmoothField.from_expressions(
        2,
        [f"{a}*(x1 - 0.1) + {b}*x2", f"{c}*(x1 - 0.1) + {d}*x2"],
    )
    return TransitionMap(forward, inverse)


def scaling_transition_1d(factor):
    return TransitionMap(
        SmoothField.from_expressions(1, [f"{factor}*x1"]),
        SmoothField.from_expressions(1, [f"{1.0/factor}*x1"]),
    )


SAMPLES_2D = [(0.2, 0.3), (0.5, 0.7), (0.8, 0.4), (0.35, 0.9)]


def test_transition_roundtrip_validation():
    trans = quadratic_transition()
    assert trans.check_roundtrip(SAMPLES_2D) < 1e-12
    bad = TransitionMap(
        SmoothField.from_expressions(2, ["x1 + x2^2", "x2"]),
        SmoothField.from_expressions(2, ["x1", "x2"]),
    )
    with pytest.raises(ValueError):
        bad.check_roundtrip(SAMPLES_2D)


def test_jet_transform_linear_rescaling():
    # x' = 2x with trivial frame: derivatives scale by 1/2 and 1/4.
    change = FrameChange(scaling_transition_1d(2.0), 1)
    u = tensor_poly(1, (1,), [[((2,), 1.0), ((1,), 0.5)]])
    x = (0.6,)
    jet = jet_extension(u.field, x, 2)
    primed = transform_jet2(jet, change, x)
    assert primed.array(0)[0] == pytest.approx(jet.array(0)[0])
    assert primed.array(1)[0, 0] == pytest.approx(0.5 * jet.array(1)[0, 0])
    assert primed.array(2)[0, 0, 0] == pytest.approx(0.25 * jet.array(2)[0, 0, 0])


def test_jet_transform_identity_change():
    change = FrameChange(identity_transition(2), 2)
    rng = random.Random(5)
    u = tensor_poly(2, (2,), [random_poly_table(rng, 2, 3) for _ in range(2)])
    x = (0.4, 0.7)
    jet = jet_extension(u.field, x, 2)
    primed = transform_jet2(jet, change, x)
    for p in range(3):
        assert np.allclose(primed.array(p), jet.array(p), atol=1e-14)


def test_jet_transform_frame_multiplication():
    # Identity chart, frame A = x1 in one dimension: (Au)' = u + x u'.
    frame = tensor_poly(1, (1, 1), [[((1,), 1.0)]])
    change = FrameChange(identity_transition(1), 1, frame)
    u = tensor_poly(1, (1,), [[((2,), 1.0)]])
    x = (0.8,)
    jet = jet_extension(u.field, x, 2)
    primed = transform_jet2(jet, change, x)
    uval, du = jet.array(0)[0], jet.array(1)[0, 0]
    assert primed.array(1)[0, 0] == pytest.approx(uval + x[0] * du)


def test_jet_transform_matches_composed_field_oracle():
    # Two routes: chain rule arrays versus direct jets of the composed field.
    rng = random.Random(11)
    frame = tensor_poly(
        2, (2, 2),
        [[((0, 0), 1.0), ((1, 0), 0.3)], [((0, 1), 0.1)],
         [((0, 0), 0.0)], [((0, 0), 1.0), ((1, 0), -0.2)]],
    )
    for trans in (quadratic_transition(), affine_transition()):
        change = FrameChange(trans, 2, frame)
        u = tensor_poly(2, (2,), [random_poly_table(rng, 2, 3) for _ in range(2)])
        uprime = transformed_velocity_field(u, change)
        for x in SAMPLES_2D:
            xp = tuple(trans.forward.values_at(x))
            via_chain_rule = transform_jet2(jet_extension(u.field, x, 2), change, x)
            direct = jet_extension(uprime.field, xp, 2)
            for p in range(3):
                assert np.max(np.abs(via_chain_rule.array(p) - direct.array(p))) < 1e-11


def test_singularity_rejected():
    collapse = TransitionMap(
        SmoothField.from_expressions(1, ["x1*x1"]),
        SmoothField.from_expressions(1, ["x1"]),
    )
    change = FrameChange(collapse, 1)
    u = tensor_poly(1, (1,), [[((1,), 1.0)]])
    with pytest.raises(ValueError):
        transform_jet2(jet_extension(u.field, (0.0,), 2), change, (0.0,))


def random_stress2_primed(rng, n, d, degree):
    s2_raw = [random_poly_table(rng, n, degree) for _ in range(d * n * n)]
    raw = tensor_poly(n, (d, n, n), s2_raw)

    def sym_eval(point, order):
        series = raw.field.series_at(point, order)
        out = []
        for alpha in range(d):
            for i in range(n):
                for j in range(n):
                    a = series[(alpha * n + i) * n + j]
                    b = series[(alpha * n + j) * n + i]
                    out.append((a + b) * 0.5)
        return out

    return VariationalStress2(
        tensor_poly(n, (d,), [random_poly_table(rng, n, degree) for _ in range(d)]),
        tensor_poly(n, (d, n), [random_poly_table(rng, n, degree) for _ in range(d * n)]),
        TensorField(SmoothField(n, d * n * n, sym_eval), (d, n, n)),
    )


def test_stress2_identity_change_is_identity():
    rng = random.Random(13)
    change = FrameChange(identity_transition(2), 1)
    primed = random_stress2_primed(rng, 2, 1, 2)
    for x in SAMPLES_2D:
        s0, s1, s2 = transform_stress2(primed, change, x)
        assert np.allclose(s0, primed.s0.at(x), atol=1e-13)
        assert np.allclose(s1, primed.s1.at(x), atol=1e-13)
        assert np.allclose(s2, primed.s2.at(x), atol=1e-13)


def test_stress2_uniform_scaling_cancellation():
    # x' = 2x in the plane with identity frame: the volume factor 4 cancels
    # the two 1/2 inverse-Jacobian factors on the top block.
    forward = SmoothField.from_expressions(2, ["2*x1", "2*x2"])
    inverse = SmoothField.from_expressions(2, ["0.5*x1", "0.5*x2"])
    change = FrameChange(TransitionMap(forward, inverse), 1)
    rng = random.Random(17)
    primed = random_stress2_primed(rng, 2, 1, 2)
    for x in SAMPLES_2D:
        xp = tuple(change.transition.forward.values_at(x))
        _, _, s2 = transform_stress2(primed, change, x)
        assert np.allclose(s2, primed.s2.at(xp), atol=1e-12)


def test_stress1_affine_weight():
    # Affine chart, constant frame: the gradient block transforms tensorially
    # with the volume weight.
    rng = random.Random(19)
    change = FrameChange(affine_transition(), 1)
    primed = VariationalStress1(
        tensor_poly(2, (1,), [random_poly_table(rng, 2, 2)]),
        tensor_poly(2, (1, 2), [random_poly_table(rng, 2, 2) for _ in range(2)]),
    )
    x = (0.3, 0.5)
    xp = tuple(change.transition.forward.values_at(x))
    jac_det = change.transition.jacobian_det(x)
    _, dx, _ = change.transition.inverse_jets(xp)
    _, s1 = transform_stress1(primed, change, x)
    expected = jac_det * np.einsum("BI,iI->Bi", primed.s1.at(xp), dx)
    assert np.allclose(s1, expected, atol=1e-13)


def test_action_invariance_order1_and_order2():
    rng = random.Random(23)
    frame = tensor_poly(
        2, (2, 2),
        [[((0, 0), 1.0), ((1, 0), 0.2)], [((0, 1), 0.1)],
         [((0, 0), 0.0), ((1, 1), 0.05)], [((0, 0), 1.0), ((0, 1), -0.15)]],
    )
    velocity = tensor_poly(2, (2,), [random_poly_table(rng, 2, 3) for _ in range(2)])
    for trans in (affine_transition(), quadratic_transition()):
        change = FrameChange(trans, 2, frame)
        primed1 = VariationalStress1(
            tensor_poly(2, (2,), [random_poly_table(rng, 2, 2) for _ in range(2)]),
            tensor_poly(2, (2, 2), [random_poly_table(rng, 2, 2) for _ in range(4)]),
        )
        result1 = invariance_check(
            "action1", change, SAMPLES_2D, primed_stress1=primed1, velocity=velocity
        )
        assert result1["discrepancy"] < 1e-11
        primed2 = random_stress2_primed(rng, 2, 2, 2)
        result2 = invariance_check(
            "action2", change, SAMPLES_2D, primed_stress2=primed2, velocity=velocity
        )
        assert result2["discrepancy"] < 1e-11
        traction = invariance_check(
            "traction1", change, SAMPLES_2D, primed_stress1=primed1, velocity=velocity
        )
        assert traction["discrepancy"] < 1e-11


def test_naive_contraction_affine_invariant():
    rng = random.Random(29)
    primed = random_stress2_primed(rng, 2, 1, 2)
    # Identity frame, then a constant non-trivial frame: the extra term needs
    # either frame derivatives or chart curvature, so both stay invariant.
    for frame in (None, tensor_const(2, (1, 1), [1.7])):
        change = FrameChange(affine_transition(), 1, frame)
        result = invariance_check(
            "naive-contraction", change, SAMPLES_2D, primed_stress2=primed
        )
        assert result["discrepancy"] < 1e-11
        assert result["vector_block_defect"] < 1e-11


def test_naive_contraction_quadratic_defect_matches_prediction():
    # The quadratic chart bends the first-order block: the defect is visible
    # and coincides with the predicted extra term; the vector block and the
    # full action stay invariant under the same change.
    rng = random.Random(31)
    change = FrameChange(quadratic_transition(), 1)
    primed = random_stress2_primed(rng, 2, 1, 2)
    result = invariance_check(
        "naive-contraction", change, SAMPLES_2D, primed_stress2=primed
    )
    assert result["discrepancy"] > 1e-3
    assert result["predicted_match_defect"] < 1e-10
    assert result["vector_block_defect"] < 1e-11
    vertical = invariance_check(
        "vertical-contraction", change, SAMPLES_2D, primed_stress2=primed
    )
    assert vertical["discrepancy"] < 1e-11


def test_predicted_defect_hand_value():
    # Identity frame, quadratic chart: only the second-derivative term of the
    # inverse survives: defect[i] = J * s2'[I J] x^i_{,I J}; here
    # x1_{,2'2'} = -2 and J = 1, so defect[0] = -2 * s2'[1, 1].
    change = FrameChange(quadratic_transition(), 1)
    s2_vals = np.array([[[0.7, 0.2], [0.2, 1.3]]])
    primed = VariationalStress2(
        tensor_const(2, (1,), [0.0]),
        tensor_const(2, (1, 2), np.zeros((1, 2))),
        tensor_const(2, (1, 2, 2), s2_vals),
    )
    x = (0.4, 0.6)
    defect = predicted_contraction_defect(primed, change, x)
    assert defect[0, 0] == pytest.approx(-2.0 * 1.3)
    assert defect[0, 1] == pytest.approx(0.0)
