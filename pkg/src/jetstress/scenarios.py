"""Scenario files: schema, validation, check execution, and generation.

A scenario is a JSON document with a versioned schema id describing the
geometry, the stress and velocity data, which checks to run, and their
tolerances.  Field components are numbers, expression strings, or monomial
tables; see the README for the grammar.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .balance import closed_boundary_exact_term, verify_balance_order2
from .bundles import BundleSpec, JetSectionField
from .covariance import FrameChange, invariance_check
from .exprs import parse_expression
from .fields import SmoothField, TensorField, finite_difference_jet, jet_extension
from .geometry import (
    Body,
    Box,
    Chart,
    FacePatch,
    QuadratureRule,
    TransitionMap,
    boundary_faces,
    integrate,
)
from .nonholonomic import (
    NonHolonomicStress,
    VariationalStress2,
    lift_second_order,
    nh_action_form,
    second_contraction,
    second_contraction_brute_force,
)
from .reports import CheckRecord, RunReport
from .stress import (
    VariationalStress1,
    invariant_divergence_residual,
    surface_force,
    traction_projection,
    verify_balance_order1,
)
from .surface import TransversalField
from .taylor import TruncatedSeries

__all__ = [
    "SCHEMA_ID",
    "DEFAULT_TOLERANCES",
    "CHECK_IDS",
    "ScenarioError",
    "Scenario",
    "load_scenario",
    "run_checks",
    "generate_scenario",
]

SCHEMA_ID = "jetstress-scenario/1"

DEFAULT_TOLERANCES: Dict[str, float] = {
    "balance1": 1e-10,
    "balance2": 1e-9,
    "cauchy": 1e-11,
    "div-consistency": 1e-11,
    "second-contraction": 1e-14,
    "covariance": 1e-10,
    "stokes-closed": 1e-10,
    "lambda-invariance": 1e-13,
    "jet-oracle": 1e-6,
}

CHECK_IDS = tuple(sorted(DEFAULT_TOLERANCES))


class ScenarioError(ValueError):
    """Configuration problem; the message names the offending key."""


# -- field parsing ------------------------------------------------------------


def _component_map(spec: Any, dim: int, key: str) -> Callable:
    if isinstance(spec, (int, float)):
        value = float(spec)
        return lambda variables: TruncatedSeries.constant(
            variables[0].dim, variables[0].order, value
        )
    if isinstance(spec, str):
        try:
            return parse_expression(spec, dim)
        except ValueError as exc:
            raise ScenarioError(f"{key}: {exc}") from exc
    if isinstance(spec, dict) and "expr" in spec:
        return _component_map(spec["expr"], dim, key)
    if isinstance(spec, dict) and "monomials" in spec:
        table = []
        for entry in spec["monomials"]:
            try:
                exps, coef = entry
                exps = tuple(int(e) for e in exps)
            except (TypeError, ValueError) as exc:
                raise ScenarioError(f"{key}: bad monomial entry {entry!r}") from exc
            if len(exps) != dim or any(e < 0 for e in exps):
                raise ScenarioError(f"{key}: monomial exponents {exps} invalid for n={dim}")
            table.append((exps, float(coef)))

        def monomial_fn(variables, table=table):
            dim_ = variables[0].dim
            order = variables[0].order
            total = TruncatedSeries.zero(dim_, order)
            for exps, coef in table:
                term = TruncatedSeries.constant(dim_, order, coef)
                for axis, e in enumerate(exps):
                    if e:
                        term = term * variables[axis] ** e
                total = total + term
            return total

        return monomial_fn
    raise ScenarioError(f"{key}: component must be a number, string, or monomial table")


def _flatten(specs: Any, shape: Tuple[int, ...], key: str) -> List[Any]:
    if not shape:
        return [specs]
    if not isinstance(specs, list) or len(specs) != shape[0]:
        raise ScenarioError(f"{key}: expected a list of length {shape[0]}")
    out: List[Any] = []
    for idx, item in enumerate(specs):
        out.extend(_flatten(item, shape[1:], f"{key}[{idx}]"))
    return out


def parse_tensor(specs: Any, dim: int, shape: Tuple[int, ...], key: str) -> TensorField:
    flat = _flatten(specs, shape, key)
    maps = [_component_map(s, dim, f"{key}#{i}") for i, s in enumerate(flat)]
    return TensorField(SmoothField.from_series_maps(dim, maps), shape)


# -- scenario object ----------------------------------------------------------


@dataclass
class Scenario:
    """Validated scenario: parsed fields plus the raw document digest."""

    raw: Dict[str, Any]
    digest: str
    bundle: BundleSpec
    body: Body
    quad_order: int
    checks: List[str]
    tolerances: Dict[str, float]
    stress1: Optional[VariationalStress1] = None
    stress2: Optional[VariationalStress2] = None
    stress2_split: float = 1.0
    raw_stress: Optional[NonHolonomicStress] = None
    velocity: Optional[TensorField] = None
    section: Optional[JetSectionField] = None
    transversals: Optional[Dict[str, TransversalField]] = None
    frame_change: Optional[FrameChange] = None
    covariance_samples: List[Tuple[float, ...]] = field(default_factory=list)
    covariance_quantities: Optional[List[str]] = None
    expect_noninvariant: bool = False
    closed_face: Optional[FacePatch] = None
    closed_transversal: Optional[TransversalField] = None

    def nonholonomic_stress(self) -> NonHolonomicStress:
        if self.raw_stress is not None:
            return self.raw_stress
        if self.stress2 is not None:
            return lift_second_order(self.stress2, self.stress2_split)
        raise ScenarioError("stress: a 'raw' or 'order2' block is required for this check")


def _require(doc: Dict[str, Any], key: str) -> Any:
    if key not in doc:
        raise ScenarioError(f"{key}: missing required key")
    return doc[key]


def load_scenario(document: Dict[str, Any] | str) -> Scenario:
    """Parse and validate a scenario document (dict or JSON text)."""
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"document: invalid JSON ({exc})") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ScenarioError("document: expected a JSON object")
    digest = hashlib.sha256(
        json.dumps(doc, sort_keys=True).encode("utf-8")
    ).hexdigest()[:16]

    if doc.get("schema") != SCHEMA_ID:
        raise ScenarioError(f"schema: expected {SCHEMA_ID!r}, got {doc.get('schema')!r}")

    bundle = _require(doc, "bundle")
    n = bundle.get("n")
    d = bundle.get("d")
    if not isinstance(n, int) or n < 1:
        raise ScenarioError("bundle.n: must be a positive integer")
    if not isinstance(d, int) or d < 1:
        raise ScenarioError("bundle.d: must be a positive integer")

    geometry = _require(doc, "geometry")
    chart_bounds = _require(geometry, "chart_box")
    body_bounds = _require(geometry, "body_box")
    if len(chart_bounds) != n:
        raise ScenarioError(f"geometry.chart_box: expected {n} axis bounds")
    if len(body_bounds) != n:
        raise ScenarioError(f"geometry.body_box: expected {n} axis bounds")
    try:
        chart = Chart(n, Box.from_bounds(chart_bounds))
        body_box = Box.from_bounds(body_bounds)
    except ValueError as exc:
        raise ScenarioError(f"geometry: {exc}") from exc
    patch = None
    if geometry.get("patch") is not None:
        patch_specs = geometry["patch"]
        if not isinstance(patch_specs, list) or len(patch_specs) != n:
            raise ScenarioError("geometry.patch: expected one expression per axis")
        patch = parse_tensor(patch_specs, n, (n,), "geometry.patch").field
    body = Body(chart, body_box, patch)
    quad_order = geometry.get("quad_order", 6)
    if not isinstance(quad_order, int) or quad_order < 1:
        raise ScenarioError("geometry.quad_order: must be a positive integer")
    if patch is not None:
        try:
            body.check_embedding(QuadratureRule(quad_order))
        except ValueError as exc:
            raise ScenarioError(f"geometry.patch: {exc}") from exc

    checks = _require(doc, "checks")
    if not isinstance(checks, list) or not checks:
        raise ScenarioError("checks: expected a non-empty list")
    for cid in checks:
        if cid not in CHECK_IDS:
            raise ScenarioError(f"checks: unknown check id {cid!r}")

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, value in doc.get("tolerances", {}).items():
        if key not in CHECK_IDS:
            raise ScenarioError(f"tolerances.{key}: unknown check id")
        tolerances[key] = float(value)

    scenario = Scenario(
        raw=doc, digest=digest, bundle=BundleSpec(n, d), body=body,
        quad_order=quad_order, checks=list(checks), tolerances=tolerances,
    )

    stress_block = doc.get("stress", {})
    if "order1" in stress_block:
        blk = stress_block["order1"]
        scenario.stress1 = VariationalStress1(
            parse_tensor(_require(blk, "s0"), n, (d,), "stress.order1.s0"),
            parse_tensor(_require(blk, "s1"), n, (d, n), "stress.order1.s1"),
        )
    if "order2" in stress_block:
        blk = stress_block["order2"]
        s2 = parse_tensor(_require(blk, "s2"), n, (d, n, n), "stress.order2.s2")
        scenario.stress2 = VariationalStress2(
            parse_tensor(_require(blk, "s0"), n, (d,), "stress.order2.s0"),
            parse_tensor(_require(blk, "s1"), n, (d, n), "stress.order2.s1"),
            s2,
        )
        split = blk.get("split", 1.0)
        if not 0.0 <= float(split) <= 1.0:
            raise ScenarioError("stress.order2.split: must lie in [0, 1]")
        scenario.stress2_split = float(split)
        try:
            scenario.stress2.check_symmetry(
                [tuple(body_box.center())], tol=1e-10
            )
        except ValueError as exc:
            raise ScenarioError(f"stress.order2.s2: {exc}") from exc
    if "raw" in stress_block:
        blk = stress_block["raw"]
        scenario.raw_stress = NonHolonomicStress(
            parse_tensor(_require(blk, "x0"), n, (d,), "stress.raw.x0"),
            parse_tensor(_require(blk, "x1"), n, (d, n), "stress.raw.x1"),
            parse_tensor(_require(blk, "x2"), n, (d, n), "stress.raw.x2"),
            parse_tensor(_require(blk, "x3"), n, (d, n, n), "stress.raw.x3"),
        )

    velocity_block = doc.get("velocity", {})
    if "u" in velocity_block:
        scenario.velocity = parse_tensor(velocity_block["u"], n, (d,), "velocity.u")
    if "section" in velocity_block:
        blk = velocity_block["section"]
        scenario.section = JetSectionField(
            parse_tensor(_require(blk, "a0"), n, (d,), "velocity.section.a0"),
            parse_tensor(_require(blk, "a1"), n, (d, n), "velocity.section.a1"),
        )

    if "transversals" in doc and doc["transversals"]:
        faces = {f.label: f for f in boundary_faces(body)}
        fields: Dict[str, TransversalField] = {}
        for label, spec in doc["transversals"].items():
            if label not in faces:
                raise ScenarioError(f"transversals.{label}: unknown face label")
            if spec == "coordinate":
                fields[label] = TransversalField.coordinate(faces[label])
            elif isinstance(spec, dict) and "vector" in spec:
                ambient = parse_tensor(
                    spec["vector"], n, (n,), f"transversals.{label}.vector"
                )
                fields[label] = TransversalField.from_ambient_field(faces[label], ambient)
            elif isinstance(spec, dict) and "metric" in spec:
                metric = parse_tensor(
                    spec["metric"], n, (n, n), f"transversals.{label}.metric"
                )
                fields[label] = TransversalField.metric_normal(faces[label], metric)
            else:
                raise ScenarioError(
                    f"transversals.{label}: expected 'coordinate', a vector, or a metric"
                )
        scenario.transversals = fields

    if "covariance" in doc and doc["covariance"]:
        blk = doc["covariance"]
        forward = parse_tensor(_require(blk, "forward"), n, (n,), "covariance.forward")
        inverse = parse_tensor(_require(blk, "inverse"), n, (n,), "covariance.inverse")
        transition = TransitionMap(forward.field, inverse.field)
        frame = None
        if blk.get("frame") is not None:
            frame = parse_tensor(blk["frame"], n, (d, d), "covariance.frame")
        samples = blk.get("samples")
        if not samples:
            raise ScenarioError("covariance.samples: at least one sample point required")
        points = []
        for idx, pt in enumerate(samples):
            if len(pt) != n:
                raise ScenarioError(f"covariance.samples[{idx}]: expected {n} coordinates")
            points.append(tuple(float(c) for c in pt))
        try:
            transition.check_roundtrip(points)
        except ValueError as exc:
            raise ScenarioError(f"covariance: {exc}") from exc
        scenario.frame_change = FrameChange(transition, d, frame)
        scenario.covariance_samples = points
        scenario.expect_noninvariant = bool(blk.get("expect_noninvariant", False))
        quantities = blk.get("quantities")
        if quantities is not None:
            known = {"action1", "action2", "traction1", "naive-contraction"}
            for q in quantities:
                if q not in known:
                    raise ScenarioError(f"covariance.quantities: unknown quantity {q!r}")
            scenario.covariance_quantities = list(quantities)

    if "closed_boundary" in doc and doc["closed_boundary"]:
        blk = doc["closed_boundary"]
        if n != 2:
            raise ScenarioError("closed_boundary: supported for n = 2 only")
        mapping = parse_tensor(_require(blk, "map"), 1, (n,), "closed_boundary.map")
        face = FacePatch("closed", chart, Box((0.0,), (1.0,)), mapping.field, 1.0, closed=True)
        ambient = parse_tensor(
            _require(blk, "transversal"), n, (n,), "closed_boundary.transversal"
        )
        scenario.closed_face = face
        scenario.closed_transversal = TransversalField.from_ambient_field(face, ambient)

    _validate_check_requirements(scenario)
    return scenario


_CHECK_NEEDS = {
    "balance1": ("stress1", "velocity"),
    "balance2": ("nonholonomic", "velocity"),
    "cauchy": ("stress1", "velocity"),
    "div-consistency": ("stress1", "velocity"),
    "second-contraction": ("nonholonomic",),
    "covariance": ("frame_change",),
    "stokes-closed": ("nonholonomic", "velocity", "closed_face"),
    "lambda-invariance": ("stress2", "velocity"),
    "jet-oracle": ("velocity",),
}


def _validate_check_requirements(scenario: Scenario) -> None:
    for cid in scenario.checks:
        for need in _CHECK_NEEDS[cid]:
            if need == "nonholonomic":
                if scenario.raw_stress is None and scenario.stress2 is None:
                    raise ScenarioError(
                        f"checks.{cid}: needs a stress 'raw' or 'order2' block"
                    )
            elif need == "frame_change":
                if scenario.frame_change is None:
                    raise ScenarioError(f"checks.{cid}: needs a covariance block")
                if scenario.stress1 is None and scenario.stress2 is None:
                    raise ScenarioError(
                        f"checks.{cid}: needs an order1 or order2 stress block"
                    )
            elif getattr(scenario, need) is None:
                block = {
                    "stress1": "stress.order1",
                    "stress2": "stress.order2",
                    "velocity": "velocity.u",
                    "closed_face": "closed_boundary",
                }[need]
                raise ScenarioError(f"checks.{cid}: needs a {block} block")


# -- check execution -----------------------------------------------------------


def _sample_points(scenario: Scenario, count: int, seed: int = 12345) -> List[Tuple[float, ...]]:
    rng = random.Random(seed)
    box = scenario.body.box
    return [
        tuple(rng.uniform(lo, hi) for lo, hi in zip(box.lower, box.upper))
        for _ in range(count)
    ]


def _run_balance1(scenario: Scenario) -> CheckRecord:
    return verify_balance_order1(
        scenario.stress1,
        scenario.velocity,
        scenario.body,
        QuadratureRule(scenario.quad_order),
        scenario.tolerances["balance1"],
    )


def _run_balance2(scenario: Scenario) -> CheckRecord:
    report = verify_balance_order2(
        scenario.nonholonomic_stress(),
        scenario.velocity,
        scenario.body,
        scenario.transversals,
        QuadratureRule(scenario.quad_order),
        scenario.tolerances["balance2"],
    )
    record = report.to_record("balance2")
    for key, value in report.edge_terms.items():
        record.terms[f"edge:{key}"] = value
    for key, value in report.face_divergence_terms.items():
        record.terms[f"facediv:{key}"] = value
    residual = record.residual
    if scenario.stress2 is not None:
        # The interior power must not depend on how the first-order content
        # splits between the two middle blocks of the representative.
        rule = QuadratureRule(scenario.quad_order)
        section = JetSectionField.from_velocity(scenario.velocity)
        values = []
        for split in (0.0, 1.0):
            lifted = lift_second_order(scenario.stress2, split)
            form = nh_action_form(lifted, section)
            if scenario.body.patch is not None:
                form = form.pullback(scenario.body.patch)
            values.append(integrate(form, scenario.body.box, rule))
        gap = abs(values[0] - values[1])
        record.terms["lhs_split_gap"] = gap
        if gap > 1e-13:
            residual = max(residual, record.tolerance * 10.0)
    return CheckRecord("balance2", record.terms, residual, record.tolerance)


def _run_cauchy(scenario: Scenario) -> CheckRecord:
    stress = scenario.stress1
    velocity = scenario.velocity
    sigma = traction_projection(stress)
    rule = QuadratureRule(scenario.quad_order)
    n = scenario.bundle.base_dim
    worst = 0.0
    terms: Dict[str, float] = {}
    for face in boundary_faces(scenario.body):
        if face.boxface is None or scenario.body.patch is not None:
            raise ScenarioError("cauchy: implemented for box bodies")
        density = surface_force(sigma, face, velocity)
        axis = face.boxface.axis
        nodes, _ = rule.nodes_weights(face.param_box)
        face_worst = 0.0
        for y in nodes:
            y = tuple(y)
            via_pullback = density.value_at(y).coefficient(tuple(range(n - 1)))
            chart_pt = face.chart_point(y)
            direct = float(
                np.sum(
                    sigma.sigma.at(chart_pt)[:, axis] * velocity.at(chart_pt)
                )
            )
            face_worst = max(face_worst, abs(via_pullback - direct))
        terms[face.label] = face_worst
        worst = max(worst, face_worst)
    return CheckRecord("cauchy", terms, worst, scenario.tolerances["cauchy"])


def _run_div_consistency(scenario: Scenario) -> CheckRecord:
    points = _sample_points(scenario, 100)
    residual = invariant_divergence_residual(scenario.stress1, scenario.velocity, points)
    return CheckRecord(
        "div-consistency",
        {"points": float(len(points)), "max_residual": residual},
        residual,
        scenario.tolerances["div-consistency"],
    )


def _run_second_contraction(scenario: Scenario) -> CheckRecord:
    stress = scenario.nonholonomic_stress()
    points = _sample_points(scenario, 20)
    oracle_gap = 0.0
    symmetric = True
    zero_gap = 0.0
    for x in points:
        arr = stress.x3.at(x)
        if np.max(np.abs(arr - np.transpose(arr, (0, 2, 1)))) > 1e-12:
            symmetric = False
        fast = second_contraction(stress.x3, x)
        brute = second_contraction_brute_force(stress.x3, x)
        for f, b in zip(fast, brute):
            oracle_gap = max(oracle_gap, f.max_abs_diff(b))
        if symmetric:
            zero_gap = max(zero_gap, max(f.max_abs() for f in fast))
    residual = max(oracle_gap, zero_gap if symmetric else 0.0)
    return CheckRecord(
        "second-contraction",
        {"oracle_gap": oracle_gap, "symmetric": float(symmetric), "zero_gap": zero_gap},
        residual,
        scenario.tolerances["second-contraction"],
    )


def _run_covariance(scenario: Scenario) -> CheckRecord:
    change = scenario.frame_change
    samples = scenario.covariance_samples
    selected = scenario.covariance_quantities
    terms: Dict[str, float] = {}
    residual = 0.0

    def wanted(quantity: str) -> bool:
        return selected is None or quantity in selected

    if scenario.stress1 is not None and scenario.velocity is not None:
        if wanted("action1"):
            r1 = invariance_check(
                "action1", change, samples,
                primed_stress1=scenario.stress1, velocity=scenario.velocity,
            )
            terms["action1"] = r1["discrepancy"]
            residual = max(residual, r1["discrepancy"])
        if wanted("traction1"):
            t1 = invariance_check(
                "traction1", change, samples,
                primed_stress1=scenario.stress1, velocity=scenario.velocity,
            )
            terms["traction1"] = t1["discrepancy"]
            residual = max(residual, t1["discrepancy"])
    if scenario.stress2 is not None:
        if scenario.velocity is not None and wanted("action2"):
            r2 = invariance_check(
                "action2", change, samples,
                primed_stress2=scenario.stress2, velocity=scenario.velocity,
            )
            terms["action2"] = r2["discrepancy"]
            residual = max(residual, r2["discrepancy"])
        if wanted("naive-contraction"):
            naive = invariance_check(
                "naive-contraction", change, samples, primed_stress2=scenario.stress2
            )
            terms["naive_magnitude"] = naive["discrepancy"]
            terms["naive_match_defect"] = naive["predicted_match_defect"]
            terms["vertical_invariance"] = naive["vector_block_defect"]
            residual = max(
                residual, naive["predicted_match_defect"], naive["vector_block_defect"]
            )
            if scenario.expect_noninvariant and naive["discrepancy"] <= 1e-3:
                residual = max(residual, 1.0)  # force a failure: the defect is missing
    if not terms:
        raise ScenarioError(
            "covariance.quantities: no selected quantity is computable from the scenario blocks"
        )
    return CheckRecord("covariance", terms, residual, scenario.tolerances["covariance"])


def _run_stokes_closed(scenario: Scenario) -> CheckRecord:
    from .nonholonomic import nh_traction

    stress = scenario.nonholonomic_stress()
    quad_value, endpoint = closed_boundary_exact_term(
        nh_traction(stress),
        scenario.velocity,
        scenario.closed_face,
        scenario.closed_transversal,
        QuadratureRule(max(scenario.quad_order, 48)),
    )
    residual = max(abs(quad_value), abs(endpoint))
    return CheckRecord(
        "stokes-closed",
        {"quadrature": quad_value, "endpoint_defect": endpoint},
        residual,
        scenario.tolerances["stokes-closed"],
    )


def _run_lambda_invariance(scenario: Scenario) -> CheckRecord:
    rule = QuadratureRule(scenario.quad_order)
    section = JetSectionField.from_velocity(scenario.velocity)
    values = []
    for split in (0.0, 0.5, 1.0):
        lifted = lift_second_order(scenario.stress2, split)
        values.append(
            integrate(nh_action_form(lifted, section), scenario.body.box, rule)
        )
    residual = max(abs(values[0] - values[1]), abs(values[0] - values[2]))
    return CheckRecord(
        "lambda-invariance",
        {"split_0": values[0], "split_05": values[1], "split_1": values[2]},
        residual,
        scenario.tolerances["lambda-invariance"],
    )


def _run_jet_oracle(scenario: Scenario) -> CheckRecord:
    points = _sample_points(scenario, 5)
    worst = 0.0
    for x in points:
        exact = jet_extension(scenario.velocity.field, x, 2)
        approx = finite_difference_jet(scenario.velocity.field, x, 2, 1e-4)
        for p in range(3):
            worst = max(worst, float(np.max(np.abs(exact.array(p) - approx.array(p)))))
    return CheckRecord(
        "jet-oracle", {"max_gap": worst}, worst, scenario.tolerances["jet-oracle"]
    )


_RUNNERS: Dict[str, Callable[[Scenario], CheckRecord]] = {
    "balance1": _run_balance1,
    "balance2": _run_balance2,
    "cauchy": _run_cauchy,
    "div-consistency": _run_div_consistency,
    "second-contraction": _run_second_contraction,
    "covariance": _run_covariance,
    "stokes-closed": _run_stokes_closed,
    "lambda-invariance": _run_lambda_invariance,
    "jet-oracle": _run_jet_oracle,
}


def run_checks(scenario: Scenario, selected: Optional[Sequence[str]] = None) -> RunReport:
    """Execute the scenario's checks (or a subset) and collect records."""
    report = RunReport(scenario.digest)
    check_ids = list(scenario.checks if selected is None else selected)
    for cid in check_ids:
        if cid not in _RUNNERS:
            raise ScenarioError(f"checks: unknown check id {cid!r}")
        if cid not in scenario.checks:
            raise ScenarioError(f"checks: {cid!r} not configured in this scenario")
        report.add(_RUNNERS[cid](scenario))
    return report


# -- generation ----------------------------------------------------------------


def _random_component(rng: random.Random, n: int, degree: int, nterms: int = 3) -> Dict:
    import itertools as _it

    pool = [e for e in _it.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    monomials = []
    for _ in range(nterms):
        exps = rng.choice(pool)
        coef = round(rng.uniform(-1.0, 1.0), 6)
        monomials.append([list(exps), coef])
    return {"monomials": monomials}


def generate_scenario(seed: int, n: int, d: int, degree: int) -> Dict[str, Any]:
    """Deterministic random polynomial scenario on the unit box.

    The same seed yields byte-identical documents once serialized with
    sorted keys.
    """
    if n not in (2, 3):
        raise ScenarioError(f"generate: n must be 2 or 3, got {n}")
    if not 1 <= d <= 3:
        raise ScenarioError(f"generate: d must be between 1 and 3, got {d}")
    if not 0 <= degree <= 4:
        raise ScenarioError(f"generate: degree must be between 0 and 4, got {degree}")
    rng = random.Random(seed)
    comp = lambda: _random_component(rng, n, degree)
    raw_degree = min(degree, 2)
    raw_comp = lambda: _random_component(rng, n, raw_degree)

    s2 = [[[None] * n for _ in range(n)] for _ in range(d)]
    for alpha in range(d):
        for i in range(n):
            for j in range(i, n):
                entry = _random_component(rng, n, raw_degree)
                s2[alpha][i][j] = entry
                s2[alpha][j][i] = entry

    doc: Dict[str, Any] = {
        "schema": SCHEMA_ID,
        "name": f"generated-seed{seed}-n{n}-d{d}-deg{degree}",
        "bundle": {"n": n, "d": d},
        "geometry": {
            "chart_box": [[0.0, 1.0]] * n,
            "body_box": [[0.0, 1.0]] * n,
            "quad_order": max(6, degree + 2),
        },
        "stress": {
            "order1": {
                "s0": [comp() for _ in range(d)],
                "s1": [[comp() for _ in range(n)] for _ in range(d)],
            },
            "order2": {
                "s0": [raw_comp() for _ in range(d)],
                "s1": [[raw_comp() for _ in range(n)] for _ in range(d)],
                "s2": s2,
                "split": 1.0,
            },
            "raw": {
                "x0": [raw_comp() for _ in range(d)],
                "x1": [[raw_comp() for _ in range(n)] for _ in range(d)],
                "x2": [[raw_comp() for _ in range(n)] for _ in range(d)],
                "x3": [
                    [[raw_comp() for _ in range(n)] for _ in range(n)] for _ in range(d)
                ],
            },
        },
        "velocity": {"u": [comp() for _ in range(d)]},
        "checks": [
            "balance1",
            "balance2",
            "cauchy",
            "div-consistency",
            "second-contraction",
            "lambda-invariance",
            "jet-oracle",
        ],
        "tolerances": {},
    }
    if n == 2:
        doc["covariance"] = {
            "forward": ["x1 + x2^2", "x2"],
            "inverse": ["x1 - x2^2", "x2"],
            "frame": None,
            "samples": [
                [round(rng.uniform(0.1, 0.9), 6), round(rng.uniform(0.1, 0.9), 6)]
                for _ in range(4)
            ],
            "expect_noninvariant": True,
        }
        doc["checks"].append("covariance")
    return doc


def scenario_to_json(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
