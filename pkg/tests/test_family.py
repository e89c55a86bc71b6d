import json
import random
from fractions import Fraction as F

import pytest

from nfpesym.family import (
    OMEGA,
    CaseId,
    DegenerateParameterError,
    DomainError,
    catalog_json,
    classify,
    generators,
    make_pde,
    parameters_for,
    resolve_delta,
    verify_catalog,
)
from nfpesym.jets import VectorField
from nfpesym.symexpr import equivalent, parse, substitute, num


def vf(xi, tau, eta):
    return VectorField(parse(xi), parse(tau), parse(eta))


def same_field(a, b):
    return all(bool(equivalent(p, q)) for p, q in zip(a.components, b.components))


# -- make_pde --------------------------------------------------------------------


def test_rhs_for_r_equals_k_equals_one():
    pde = make_pde(1, 1, 1.0)
    F_ = substitute(pde.rhs.F, {OMEGA: num(1)})
    assert equivalent(F_, parse("u + x*u_x + 3*u^2*u_xx + 6*u*u_x^2"))


def test_constant_part_of_lambda_drops_out():
    pde = make_pde(0, 1)
    assert equivalent(pde.rhs.F, parse("u + x*u_x + Omega*(u*u_xx + u_x^2)"))


@pytest.mark.parametrize("k", [F(1, 2), F(-1, 2)])
def test_degenerate_parameters_rejected(k):
    with pytest.raises(DegenerateParameterError, match="first-order linear"):
        make_pde(F(-1, 2), k)


def test_zero_entropy_parameter_rejected():
    with pytest.raises(DomainError, match="out of domain"):
        make_pde(1, 0)


def test_nonpositive_omega_rejected():
    with pytest.raises(DomainError):
        make_pde(1, 1, 0.0)


# -- classify --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "r,k,expected",
    [
        (F(-2, 3), F(-2, 3), CaseId("A", "i")),
        (F(-1), F(-1), CaseId("B", "i")),
        (F(1), F(1), CaseId("C", "i", F(1))),
        (F(3, 10), F(7, 10), CaseId("Generic")),
        (F(-2, 3), F(2, 3), CaseId("A", "ii")),
        (F(-1, 2), F(1, 2), None),
    ],
)
def test_classify_examples(r, k, expected):
    if expected is None:
        with pytest.raises(DegenerateParameterError):
            classify(r, k)
    else:
        assert classify(r, k) == expected


def test_table_delta_for_each_part():
    assert classify(*parameters_for("C", "iii", 1)).delta == F(1, 2)
    assert classify(*parameters_for("C", "iv", F(1, 3))).delta == F(-5, 6)
    assert classify(*parameters_for("C", "ii", 2)).delta == F(-2)


def test_r_equals_k_minus_half_is_never_case_c():
    with pytest.raises(DegenerateParameterError):
        classify(F(-1, 2), F(-1, 2))


def test_sign_flip_between_parts_i_and_ii():
    rng = random.Random(2)
    for _ in range(100):
        k = F(rng.randint(-12, 12), rng.randint(1, 12))
        if k == 0 or k in (F(1, 2), F(-1, 2)):
            continue
        a = classify(-k, k)  # r = -k: part ii
        b = classify(-k, -k)  # part i with the sign of k flipped
        assert a.part == "ii" and b.part == "i"
        assert a.family == b.family
        assert a.delta == b.delta


# -- catalog -----------------------------------------------------------------------------


def test_case_a_catalog_contains_x4():
    cat = generators(CaseId("A", "i"))
    assert len(cat) == 5
    assert same_field(cat.basis[3], vf("x^2*exp(t)", "0", "-3*x*u*exp(t)"))


def test_generic_catalog_is_the_principal_pair():
    cat = generators(CaseId("Generic"))
    assert len(cat) == 2
    assert same_field(cat.basis[0], vf("0", "1", "0"))
    assert same_field(cat.basis[1], vf("exp(-t)", "0", "0"))


def test_case_c_part_iii_catalog():
    case = classify(*parameters_for("C", "iii", 1))
    cat = generators(case)
    assert same_field(cat.basis[3], vf("x", "-1", "2*u"))


def test_principal_pair_leads_every_catalog():
    for case in (CaseId("A", "ii"), CaseId("B", "iv"), CaseId("C", "ii", F(3))):
        cat = generators(case)
        assert same_field(cat.basis[0], vf("0", "1", "0"))
        assert same_field(cat.basis[1], vf("exp(-t)", "0", "0"))


def _small_rationals(limit=6):
    out = set()
    for p in range(-limit, limit + 1):
        for q in range(1, limit + 1):
            out.add(F(p, q))
    return sorted(out)


def test_every_reachable_case_catalog_is_admitted():
    checked = 0
    for k in _small_rationals():
        if k == 0:
            continue
        for part in ("i", "ii", "iii", "iv"):
            r, kk = parameters_for("C", part, k)
            if abs(r.numerator) > 6 or r.denominator > 6:
                continue
            try:
                case = classify(r, kk)
            except DegenerateParameterError:
                continue
            if case.family == "C" and case.delta == 0:
                continue
            assert all(verify_catalog(make_pde(r, kk), generators(case))), (r, kk, case)
            checked += 1
    assert checked > 100


def test_delta_resolution_prefers_the_table_value():
    r, k = parameters_for("C", "iii", 2)
    got = resolve_delta(r, k)
    assert got["table"] is True and got["header"] is False


def test_catalog_json_lists_generators():
    doc = json.loads(catalog_json(CaseId("B", "i")))
    assert len(doc["generators"]) == 4
