"""Chart-based jet calculus and hyper-stress identity verification.

Exact truncated-Taylor arithmetic drives every derivative, so the power
balances, traction formulas, and transformation laws checked here are
limited only by quadrature and float roundoff.
"""

from .taylor import MultiIndex, TruncatedSeries
from .fields import JetValue, SmoothField, TensorField, finite_difference_jet, jet_extension
from .geometry import (
    Body,
    Box,
    Chart,
    FacePatch,
    FormField,
    FormValue,
    QuadratureRule,
    TransitionMap,
    boundary_faces,
    edges,
    integrate,
    interior_product,
    restrict_form,
)
from .bundles import (
    BundleSpec,
    HolonomyClass,
    IteratedJetValue,
    JetSectionField,
    holonomy_class,
    include_holonomic,
    project_jet,
    symmetrize_iterated,
    vertical_part,
)
from .stress import (
    BodyForce,
    TractionStress,
    VariationalStress1,
    body_force,
    divergence,
    stress_action,
    surface_force,
    traction_action,
    traction_projection,
    verify_balance_order1,
)
from .nonholonomic import (
    HyperSurfaceStress,
    NonHolonomicStress,
    VariationalStress2,
    contraction_C1,
    lift_second_order,
    nh_action,
    nh_divergence,
    nh_traction,
    restrict_to_second_order,
    second_contraction,
    significant_components,
)
from .surface import (
    RestrictedSurfaceStress,
    TransversalField,
    is_tangent,
    restrict_Y,
    surface_divergence,
    tangent_edge_force,
    tangent_traction,
    transversal_decomposition,
    vertical_projection,
)
from .balance import (
    BalanceReport,
    boundary_div_traction,
    div_div,
    edge_assembly,
    first_integration_by_parts,
    verify_balance_order2,
)
from .covariance import FrameChange, invariance_check, transform_jet2, transform_stress2
from .scenarios import Scenario, ScenarioError, generate_scenario, load_scenario, run_checks

__version__ = "0.1.0"
