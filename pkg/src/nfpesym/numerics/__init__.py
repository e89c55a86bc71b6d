"""ODE integration, grid fields, discrete residuals and PDE evolution."""

from .evolve import (
    CellGrid,
    CflError,
    IllPosedError,
    MassDriftError,
    PositivityError,
    cell_averages,
    evolve_pde,
    flux_divergence,
    stable_dt,
)
from .grid import GridField, build_solution, uniform
from .ode import OdeIntegrationError, OdeProblem, OdeSolution, SpanError, integrate_ode, integrate_two_sided
from .residual import (
    NonPositiveError,
    ResidualReport,
    pde_residual,
    refinement_levels,
    residual_convergence,
    residual_field,
    second_derivative,
)

__all__ = [
    "CellGrid", "CflError", "IllPosedError", "MassDriftError", "PositivityError", "cell_averages",
    "evolve_pde", "flux_divergence", "stable_dt", "GridField", "build_solution", "uniform",
    "OdeIntegrationError", "OdeProblem", "OdeSolution", "SpanError", "integrate_ode",
    "integrate_two_sided", "NonPositiveError", "ResidualReport", "pde_residual", "refinement_levels",
    "residual_convergence", "residual_field", "second_derivative",
]
