"""Invariant ansaetze, reduced ODEs and their machine verification."""

from .ansatz import AnsatzValues, Elliptic, Exponential, Hyperbolic, PowerTime, Source, Stationary
from .recipes import (
    ANSATZ_TEXT,
    FIELD_SOURCE,
    PARAMETERS,
    REPRESENTATIVES,
    Box,
    ConstraintError,
    ReductionRecipe,
    catalog_json,
    pde_for_case,
    recipe,
    theta_for,
)
from .verify import (
    DEFAULT_TEST_FUNCTIONS,
    SPREAD_TOL,
    SURFACE_TOL,
    Invariants,
    ReductionReport,
    TestFunction,
    derived_stationary_ode,
    invariance_defect,
    invariant_surface_residual,
    invariants_of,
    reduction_finding,
    stationary_pde_expression,
    verify_reduction,
)

__all__ = [
    "AnsatzValues", "Elliptic", "Exponential", "Hyperbolic", "PowerTime", "Source", "Stationary",
    "ANSATZ_TEXT", "FIELD_SOURCE", "PARAMETERS", "REPRESENTATIVES", "Box", "ConstraintError",
    "ReductionRecipe", "catalog_json", "pde_for_case", "recipe", "theta_for",
    "DEFAULT_TEST_FUNCTIONS", "SPREAD_TOL", "SURFACE_TOL", "Invariants", "ReductionReport",
    "TestFunction", "derived_stationary_ode", "invariance_defect", "invariant_surface_residual",
    "invariants_of", "reduction_finding", "stationary_pde_expression", "verify_reduction",
]
