import time
from fractions import Fraction as F

import numpy as np
import pytest

from nfpesym.family import DELTA, CaseId, generators
from nfpesym.jets import VectorField
from nfpesym.liealg import (
    NotInSpanError,
    adjoint,
    adjoint_table_numeric,
    bracket,
    expand_in_basis,
    numeric_bracket,
    structure_constants,
)
from nfpesym.liealg import reference_tables
from nfpesym.symexpr import equivalent, num, parse

C_DELTAS = (F(1, 2), F(-1, 2), F(1), F(3, 2), F(-1, 4))


def vf(xi, tau, eta):
    return VectorField(parse(xi), parse(tau), parse(eta))


@pytest.fixture(scope="module")
def sc():
    return {
        "A": structure_constants(generators(CaseId("A", "i"))),
        "B": structure_constants(generators(CaseId("B", "i"))),
        "C": structure_constants(generators(CaseId("C", "i", F(1)), DELTA)),
    }


# -- brackets -------------------------------------------------------------------------


def test_bracket_x1_x2_is_minus_x2():
    b = bracket(vf("0", "1", "0"), vf("exp(-t)", "0", "0"))
    assert all(equivalent(p, q) for p, q in zip(b.components, vf("-exp(-t)", "0", "0").components))


def test_bracket_with_itself_vanishes():
    v = vf("x^2*exp(t)", "0", "-3*x*u*exp(t)")
    assert all(c.is_zero for c in bracket(v, v).components)


def test_case_a_x2_x4_bracket(sc):
    assert [str(c) for c in sc["A"].bracket_coeffs(1, 3)] == ["2", "0", "0", "0", "2"]


def test_case_b_x1_x4_gives_x3(sc):
    assert sc["B"].bracket_coeffs(0, 3) == [num(0), num(0), num(1), num(0)]


def test_case_c_symbolic_x3_x4(sc):
    c = sc["C"].entry(2, 3, 2)
    assert equivalent(c, parse("-2*(1+delta)"))


def test_diagonal_is_zero(sc):
    for s in sc.values():
        for i in range(s.n):
            assert all(e.is_zero for e in s.bracket_coeffs(i, i))


def test_non_closed_basis_is_reported():
    with pytest.raises(NotInSpanError):
        structure_constants([vf("0", "1", "0"), vf("x*t", "0", "0")])


def test_expand_in_basis_recovers_coefficients():
    basis = generators(CaseId("B", "i")).basis
    target = basis[0].scale(num(3)) + basis[3].scale(num(-2))
    assert expand_in_basis(target, basis) == [num(3), num(0), num(0), num(-2)]


@pytest.mark.parametrize("family", ["A", "B"])
def test_brackets_reproduce_published_tables(sc, family):
    published = reference_tables.bracket_table(family)
    s = sc[family]
    assert all(s.c[i][j][m] == published[i][j][m] for i in range(s.n) for j in range(s.n) for m in range(s.n))


@pytest.mark.parametrize("delta", C_DELTAS)
def test_case_c_brackets_reproduce_published_table(sc, delta):
    s = sc["C"].bind({"delta": num(delta)})
    published = reference_tables.bracket_table("C", num(delta))
    assert all(s.c[i][j][m] == published[i][j][m] for i in range(4) for j in range(4) for m in range(4))


def test_antisymmetry_and_jacobi(sc):
    for s in (sc["A"], sc["B"]):
        assert s.is_antisymmetric() and not s.jacobi_defects()
    for d in C_DELTAS:
        s = sc["C"].bind({"delta": num(d)})
        assert s.is_antisymmetric() and not s.jacobi_defects()


# -- adjoint ----------------------------------------------------------------------------


def test_case_a_ad_x1_scales_x2(sc):
    M = adjoint(sc["A"], 0, 0.5).M
    np.testing.assert_allclose(M[:, 1], np.exp(0.5) * np.eye(5)[1], atol=1e-14)


def test_case_a_ad_x4_on_x2(sc):
    eps = 0.7
    col = adjoint(sc["A"], 3, eps).column(1)
    np.testing.assert_allclose(col, [2 * eps, 1.0, 0.0, eps**2, 2 * eps], atol=1e-12)


def test_zero_parameter_is_identity(sc):
    for s in sc.values():
        vals = {"delta": 1.0} if s is sc["C"] else None
        for i in range(s.n):
            np.testing.assert_array_equal(adjoint(s, i, 0.0, vals).M, np.eye(s.n))


@pytest.mark.parametrize("family", ["A", "B", "C"])
@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0])
def test_adjoint_tables_match_published(sc, family, eps):
    deltas = [float(d) for d in C_DELTAS] if family == "C" else [None]
    for d in deltas:
        ours = adjoint_table_numeric(sc[family], eps, {"delta": d} if d is not None else None)
        theirs = reference_tables.adjoint_table(family, eps, d)
        assert np.max(np.abs(ours - theirs)) < 1e-10


def test_table_runtime_is_small():
    t0 = time.perf_counter()
    s = structure_constants(generators(CaseId("A", "i")))
    for eps in (0.1, 0.5, 1.0):
        adjoint_table_numeric(s, eps)
    assert time.perf_counter() - t0 < 5.0


def _numeric(sc, family):
    return sc[family].numeric({"delta": 1.0} if family == "C" else None)


@pytest.mark.parametrize("family", ["A", "B", "C"])
def test_adjoint_is_an_automorphism(sc, family):
    cn = _numeric(sc, family)
    n = cn.shape[0]
    rng = np.random.default_rng(0)
    for i in range(n):
        M = adjoint(cn, i, rng.uniform(-1, 1)).M
        for j in range(n):
            for l in range(n):
                lhs = M @ cn[j, l]
                rhs = numeric_bracket(cn, M[:, j], M[:, l])
                assert np.max(np.abs(lhs - rhs)) < 1e-10


@pytest.mark.parametrize("family", ["A", "B", "C"])
def test_group_law_and_inverse(sc, family):
    cn = _numeric(sc, family)
    for i in range(cn.shape[0]):
        a, b = adjoint(cn, i, 0.3).M, adjoint(cn, i, -0.8).M
        np.testing.assert_allclose(a @ b, adjoint(cn, i, -0.5).M, atol=1e-10)
        np.testing.assert_allclose(a @ adjoint(cn, i, -0.3).M, np.eye(cn.shape[0]), atol=1e-10)


@pytest.mark.parametrize("family", ["A", "B", "C"])
def test_derivative_at_zero_is_minus_bracket(sc, family):
    cn = _numeric(sc, family)
    n = cn.shape[0]
    h = 1e-5
    for i in range(n):
        D = (adjoint(cn, i, h).M - adjoint(cn, i, -h).M) / (2 * h)
        for j in range(n):
            assert np.max(np.abs(D[:, j] + cn[i, j])) < 1e-6


def test_case_c_ad_x1_scales_x3_by_e_squared(sc):
    cn = sc["C"].numeric({"delta": 1.0})
    col = adjoint(cn, 0, 0.5).column(2)
    np.testing.assert_allclose(col, [0, 0, np.exp(2.0), 0], atol=1e-12)


def test_json_rendering(sc):
    import json

    doc = json.loads(sc["B"].to_json())
    assert doc["brackets"]["[X1,X4]"] == "X3"
