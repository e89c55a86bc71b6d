import random

import pytest

from nfpesym.family import OMEGA, make_pde, rhs_expr
from nfpesym.jets import (
    EvolutionPde,
    VectorField,
    apply_prolongation,
    brute_force_condition,
    determining_equations,
    determining_system,
    forced_zero,
    instantiate,
    invariance_residual,
    prolong,
    total_derivative,
)
from nfpesym.symexpr import Fn, OrderOverflowError, add, equivalent, evaluate, free_names, mul, num, parse, substitute, sym


def same(a, b):
    return bool(equivalent(a, b))


def vf(xi, tau, eta):
    return VectorField(parse(xi), parse(tau), parse(eta))


# -- total derivatives ------------------------------------------------------------


def test_total_x_derivative_product_rule():
    assert total_derivative(parse("x*u"), "x") == parse("u + x*u_x")


def test_total_t_derivative_of_jet():
    assert total_derivative(parse("exp(-t)*u_x"), "t") == parse("-exp(-t)*u_x + exp(-t)*u_xt")


def test_total_derivative_chain_rule_on_jet():
    assert total_derivative(parse("u_x^2"), "x") == parse("2*u_x*u_xx")


def test_total_derivative_order_overflow():
    with pytest.raises(OrderOverflowError):
        total_derivative(parse("u_xxx"), "x")


def test_point_symmetry_components_reject_jets():
    with pytest.raises(ValueError):
        VectorField(parse("u_x"), parse("0"), parse("0"))


def test_evolution_pde_rejects_time_derivatives():
    with pytest.raises(ValueError):
        EvolutionPde(parse("u_xt"))


# -- prolongation -----------------------------------------------------------------------


def test_time_translation_prolongs_to_zero():
    pc = prolong(vf("0", "1", "0"))
    assert all(c.is_zero for c in pc.as_dict().values())


def test_prolongation_of_x2():
    pc = prolong(vf("exp(-t)", "0", "0"))
    assert pc.eta1_x.is_zero
    assert same(pc.eta1_t, parse("exp(-t)*u_x"))


def test_prolongation_of_scaling():
    pc = prolong(vf("x", "0", "-u"))
    assert same(pc.eta1_x, parse("-2*u_x"))


def test_prolongation_is_linear():
    v = vf("x*exp(t)", "t^2", "u*x")
    w = vf("exp(-t)", "x", "u^2")
    a, b = num(3), num(-2)
    combo = prolong(v.scale(a) + w.scale(b))
    pv, pw = prolong(v), prolong(w)
    for name, c in combo.as_dict().items():
        assert same(c, add(mul(a, getattr(pv, name)), mul(b, getattr(pw, name)))), name


# -- invariance residual --------------------------------------------------------------------


def test_autonomous_equation_admits_time_translation():
    pde = EvolutionPde(parse("u*u_xx + x*u_x"))
    assert invariance_residual(vf("0", "1", "0"), pde).is_zero


def test_x2_is_admitted_for_symbolic_parameters():
    r, k = sym("r"), sym("k")
    pde = EvolutionPde(rhs_expr(r, k))
    assert same(invariance_residual(vf("exp(-t)", "0", "0"), pde), num(0))


def test_x_translation_is_not_admitted():
    pde = make_pde(1, 1, 1.0)
    res = invariance_residual(vf("1", "0", "0"), pde.rhs)
    res = substitute(res, {OMEGA: num(1)})
    rng = random.Random(1)
    names = free_names(res)
    for _ in range(20):
        env = {n: rng.uniform(0.5, 2.0) for n in names}
        assert abs(evaluate(res, env)) > 0


def test_prolongation_matches_brute_force_evaluation():
    rng = random.Random(4)
    pde = EvolutionPde(parse("u^2*u_xx + x*u_x + u + exp(-t)*u_x^2"))
    fields = [vf("x*exp(t)", "t*x", "u*x + t"), vf("exp(-t)", "u", "x*u^2"), vf("x^2", "exp(x)", "u")]
    names = ("u", "u_x", "u_t", "u_xx", "u_xt", "u_tt")
    index = {"u": (0, 0), "u_x": (1, 0), "u_t": (0, 1), "u_xx": (2, 0), "u_xt": (1, 1), "u_tt": (0, 2)}
    for v in fields:
        symbolic = apply_prolongation(v, pde.delta)
        for _ in range(10):
            x, t = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
            ujet = {(i, j): rng.uniform(0.5, 2) for i in range(4) for j in range(4 - i)}
            env = {"x": x, "t": t}
            env.update({n: ujet[index[n]] for n in names})
            a = evaluate(symbolic, env)
            b = brute_force_condition(v, pde, {"x": x, "t": t}, ujet)
            assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


# -- determining equations ------------------------------------------------------------------


def test_heat_equation_forces_xi_u_to_vanish():
    system = determining_system(EvolutionPde(parse("u_xx")))
    coeff = system[(1, 1, 0)]
    xi_u, tau_xu = Fn("xi", 0, 0, 1), Fn("tau", 1, 0, 1)
    # with tau_xu = 0 (forced by the u_x*u_xxx coefficient) this is 2*xi_u
    assert substitute(coeff, {tau_xu: num(0)}) == mul(num(2), xi_u)
    assert xi_u in forced_zero(system.values())


def test_heat_equation_classical_generators_solve_the_system():
    eqs = determining_equations(EvolutionPde(parse("u_xx")))
    for v in (vf("1", "0", "0"), vf("0", "1", "0"), vf("x", "2*t", "0"), vf("0", "0", "u"), vf("2*t", "0", "-x*u")):
        assert all(instantiate(e, v).is_zero or same(instantiate(e, v), num(0)) for e in eqs)


def test_family_system_is_solved_by_x2():
    r, k = sym("r"), sym("k")
    eqs = determining_equations(EvolutionPde(rhs_expr(r, k)))
    for e in eqs:
        assert same(instantiate(e, vf("exp(-t)", "0", "0")), num(0))


def test_family_system_forces_tau_u_and_tau_x():
    r, k = sym("r"), sym("k")
    zero = forced_zero(determining_equations(EvolutionPde(rhs_expr(r, k))))
    names = {a.name for a in zero}
    assert {"xi_u", "tau_u", "tau_x"} <= names


def test_non_admitted_field_fails_the_system():
    eqs = determining_equations(make_pde(1, 1).rhs)
    assert any(not same(instantiate(e, vf("1", "0", "0")), num(0)) for e in eqs)
