from fractions import Fraction as F

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from nfpesym.audit import stationary_drift, stationary_profile
from nfpesym.family import CaseId, classify, make_pde, parameters_for
from nfpesym.numerics import (
    CellGrid,
    CflError,
    GridField,
    IllPosedError,
    NonPositiveError,
    OdeProblem,
    PositivityError,
    SpanError,
    build_solution,
    cell_averages,
    evolve_pde,
    integrate_ode,
    integrate_two_sided,
    pde_residual,
    refinement_levels,
    residual_convergence,
    second_derivative,
)
from nfpesym.reduction import recipe

STATIONARY = recipe(classify(1, 1), "c")
PDE = make_pde(1, 1, 1.0)


@pytest.fixture(scope="module")
def profile():
    p = OdeProblem.from_recipe(STATIONARY, 1.0, 0.0, 1 / np.sqrt(3.0), 0.0, 0.95)
    return integrate_two_sided(p, -0.95, 0.95)


# -- ODE integration -----------------------------------------------------------------------


def test_linear_ode_is_exact():
    sol = integrate_ode(OdeProblem(lambda z, y, dy: 0.0, 0.0, 1.0, 2.0, 3.0))
    z = np.linspace(0, 3, 31)
    assert np.max(np.abs(sol(z) - (1 + 2 * z))) < 1e-12
    assert sol.completed


def test_stationary_profile_matches_closed_form(profile):
    z = np.linspace(-0.9, 0.9, 721)
    assert np.max(np.abs(profile(z) - stationary_profile(z))) < 1e-7


def test_integration_past_the_front_stops_on_an_event():
    p = OdeProblem.from_recipe(STATIONARY, 1.0, 0.0, 1 / np.sqrt(3.0), 0.0, 1.5)
    sol = integrate_ode(p)
    assert sol.reason == "y <= 0 event"
    assert 0.95 < sol.zeta[-1] <= 1.0


def test_vanishing_leading_coefficient_stops_integration():
    p = OdeProblem(lambda z, y, dy: 0.0, 0.0, 1.0, 0.0, 2.0, coeff=lambda z, y, dy: 1.0 - z)
    sol = integrate_ode(p)
    assert sol.reason == "y'' coefficient vanished"
    assert sol.zeta[-1] == pytest.approx(1.0, abs=1e-6)


def test_evaluation_outside_the_span_is_an_error(profile):
    with pytest.raises(SpanError):
        profile(np.array([0.99]))


# -- grids and solutions ---------------------------------------------------------------------


def test_stationary_solution_rows_are_identical(profile):
    f = build_solution(STATIONARY, profile, np.linspace(-0.5, 0.5, 11), np.linspace(0, 1, 5))
    assert np.all(f.u == f.u[0])


def test_exponential_solution_at_time_zero():
    rec = recipe(CaseId("B", "i"), "b", {"alpha": 0.0})
    y = lambda z: 1 + z**2
    f = build_solution(rec, y, np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5]))
    assert f.u[0, 1] == pytest.approx(y(0.5))
    assert f.u[1, 1] == pytest.approx(np.exp(0.5) * y(np.exp(0.5) * 0.5))


def test_source_solution_needs_positive_time():
    rec = recipe(CaseId("A", "i"), "c")
    with pytest.raises(ValueError, match="at least"):
        build_solution(rec, lambda z: 1 + 0 * z, np.linspace(-1, 1, 5), np.linspace(0.0, 1.0, 5))


def test_grid_csv_and_binary_round_trip():
    rng = np.random.default_rng(1)
    f = GridField(np.linspace(0, 1, 6), np.linspace(0, 2, 4), rng.uniform(size=(4, 6)))
    for g in (GridField.from_csv(f.to_csv()), GridField.from_bytes(f.to_bytes())):
        np.testing.assert_array_equal(g.u, f.u)
        np.testing.assert_array_equal(g.x, f.x)


def test_non_uniform_nodes_rejected():
    with pytest.raises(ValueError):
        GridField(np.array([0, 0.1, 0.3]), np.array([0.0]), np.ones((1, 3)))


def test_trapezoid_mass():
    f = GridField(np.linspace(0, 1, 101), np.array([0.0]), np.ones((1, 101)))
    assert f.mass()[0] == pytest.approx(1.0)


# -- residuals ---------------------------------------------------------------------------------


def test_second_derivative_is_exact_on_quadratics():
    x = np.linspace(0, 1, 9)
    np.testing.assert_allclose(second_derivative(3 * x**2 + x, x[1] - x[0]), 6.0, atol=1e-9)


def test_constant_field_residual_is_minus_the_constant():
    x, t = np.linspace(-1, 1, 21), np.linspace(0, 1, 6)
    rep = pde_residual(GridField(x, t, np.full((6, 21), 2.5)), PDE)
    assert rep.sup == pytest.approx(2.5, rel=1e-12)


def test_nonpositive_values_rejected_for_fractional_exponents():
    x, t = np.linspace(-1, 1, 21), np.linspace(0, 1, 6)
    u = np.ones((6, 21))
    u[2, 3] = -0.1
    with pytest.raises(NonPositiveError):
        pde_residual(GridField(x, t, u), make_pde(F(-1, 3), F(-1, 3)))


def _stationary_builder(profile):
    return lambda nx, nt: build_solution(STATIONARY, profile, np.linspace(-0.8, 0.8, nx), np.linspace(0, 1, nt))


def test_residual_refinement_slope_is_two(profile):
    rep = residual_convergence(_stationary_builder(profile), PDE, refinement_levels(101, 11))
    assert rep.slopes_within(2.0), rep.slopes
    assert all(s >= 1.8 for s in rep.slopes)


@pytest.mark.xfail(strict=True, reason="central second differences of the integrated profile leave a sup residual near 2e-4 at 401 nodes")
def test_stationary_residual_below_one_millionth(profile):
    assert pde_residual(_stationary_builder(profile)(401, 11), PDE).sup < 1e-6


# -- evolution ---------------------------------------------------------------------------------


def test_mass_is_conserved_from_a_random_profile():
    g = CellGrid(-1, 1, 101)
    rng = np.random.default_rng(3)
    u0 = 0.5 + rng.uniform(size=101)
    f = evolve_pde(u0, PDE, (0, 0.05), g, n_out=3)
    m = f.mass()
    assert np.max(np.abs(m - m[0])) / m[0] < 1e-6


@pytest.mark.parametrize("family", ["A", "B"])
def test_backward_diffusion_cases_are_rejected(family):
    r, k = parameters_for(family, "i")
    g = CellGrid(-1, 1, 51)
    with pytest.raises(IllPosedError):
        evolve_pde(np.ones(51), make_pde(r, k), (0, 0.1), g)


def test_prescribed_step_above_the_bound_is_rejected():
    g = CellGrid(-1, 1, 101)
    with pytest.raises(CflError):
        evolve_pde(np.ones(101), PDE, (0, 0.01), g, n_out=2, dt=0.005)


def test_nonpositive_initial_profile_is_rejected():
    g = CellGrid(-1, 1, 11)
    with pytest.raises(ValueError):
        evolve_pde(np.zeros(11), PDE, (0, 0.1), g)


def test_positivity_error_records_the_time():
    err = PositivityError(0.25)
    assert err.time == 0.25 and "0.25" in str(err)


def test_time_translation_property():
    g = CellGrid(-1, 1, 81)
    u0 = cell_averages(lambda x: 1 + 0.5 * np.cos(np.pi * x), g)
    dt = 2.5e-5
    whole = evolve_pde(u0, PDE, (0, 0.02), g, n_out=2, dt=dt)
    first = evolve_pde(u0, PDE, (0, 0.01), g, n_out=2, dt=dt)
    second = evolve_pde(first.u[-1], PDE, (0.01, 0.02), g, n_out=2, dt=dt)
    rel = np.max(np.abs(second.u[-1] - whole.u[-1])) / np.max(np.abs(whole.u[-1]))
    assert rel < 1e-8


def test_x2_symmetry_shifts_solutions():
    g = CellGrid(-2, 2, 201)
    eps = 0.1
    bump = lambda x: 1e-3 + np.exp(-(x**2) / 0.3)
    u = evolve_pde(cell_averages(bump, g), PDE, (0, 0.3), g, n_out=4)
    v = evolve_pde(cell_averages(lambda x: bump(x - eps), g), PDE, (0, 0.3), g, n_out=4)
    for j, t in enumerate(u.t):
        shifted = CubicSpline(g.centers, u.u[j])(g.centers - eps * np.exp(-t))
        assert np.linalg.norm(v.u[j] - shifted) / np.linalg.norm(shifted) < 1e-3


def _source(x, t, floor=1e-4):
    s = np.expm1(4 * t) ** 0.25
    z = np.exp(t) * x / s
    return np.exp(t) * np.sqrt(np.clip(1 - z**2, 0, None) / 3) / s + floor


def test_evolution_tracks_the_source_type_invariant_solution():
    g = CellGrid(-1.2, 1.2, 401)
    f = evolve_pde(cell_averages(lambda x: _source(x, 0.2), g), PDE, (0.2, 0.5), g, n_out=4)
    for j, t in enumerate(f.t):
        exact = cell_averages(lambda x: _source(x, t), g)
        assert np.linalg.norm(f.u[j] - exact) / np.linalg.norm(exact) < 1e-2


@pytest.mark.xfail(strict=True, raises=IllPosedError, reason="Lambda'(u) < 0 in Case B(i): the forward problem is backward diffusion")
def test_case_b_evolution_against_its_invariant_solution():
    r, k = parameters_for("B", "i")
    g = CellGrid(-1, 1, 101)
    evolve_pde(cell_averages(lambda x: 1 + 0.1 * x**2, g), make_pde(r, k), (0, 0.05), g)


def test_stationary_profile_drift_inside_the_support():
    inside, _, mass = stationary_drift()
    assert inside < 1e-3
    assert mass < 1e-6


@pytest.mark.xfail(strict=True, reason="the cell at the square-root front relaxes by about 1e-2 in the first steps")
def test_stationary_profile_drift_on_the_whole_grid():
    _, whole, _ = stationary_drift()
    assert whole < 1e-3
