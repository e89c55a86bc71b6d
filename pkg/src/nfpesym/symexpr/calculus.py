"""Partial differentiation of canonical expressions."""

from __future__ import annotations

from .expr import (
    ONE,
    ZERO,
    Add,
    Expr,
    Fn,
    Jet,
    Mul,
    Num,
    Pow,
    Sym,
    _EulerE,
    _from_term,
    add,
    as_expr,
    mul,
    num,
    power,
)

# unknown functions depend on exactly these coordinates
_FN_ARGS = ("x", "t", "u")


def _fn_slot(v: Expr):
    if isinstance(v, Sym) and v.name in ("x", "t"):
        return v.name
    if isinstance(v, Jet) and v.order == 0:
        return "u"
    return None


def depends_on(e: Expr, v: Expr) -> bool:
    if e == v:
        return True
    slot = _fn_slot(v)
    for a in e.atoms():
        if a == v or (slot is not None and isinstance(a, Fn)):
            return True
    return False


def _d_atom(a: Expr, v: Expr) -> Expr:
    if a == v:
        return ONE
    if isinstance(a, Fn):
        slot = _fn_slot(v)
        if slot is None:
            return ZERO
        return Fn(
            a.fname,
            a.ix + (slot == "x"),
            a.it + (slot == "t"),
            a.iu + (slot == "u"),
        )
    return ZERO


def _d_power(base: Expr, expo: Expr, v: Expr) -> Expr:
    if isinstance(base, _EulerE):
        dx = differentiate(expo, v)
        return ZERO if dx.is_zero else mul(power(base, expo), dx)
    if depends_on(expo, v):
        raise NotImplementedError(
            "derivative of a power whose exponent depends on the variable "
            "needs a logarithm; write it with exp() instead"
        )
    db = differentiate(base, v)
    if db.is_zero:
        return ZERO
    return mul(expo, power(base, add(expo, num(-1))), db)


def differentiate(e: Expr, v) -> Expr:
    """Partial derivative of ``e`` with respect to a symbol or jet variable.

    Jet variables are independent coordinates here. Unknown-function atoms
    such as ``xi`` depend on x, t and u only.
    """
    e = as_expr(e)
    if isinstance(v, str):
        from .parse import parse_atom

        v = parse_atom(v)
    if not isinstance(v, (Sym, Jet)):
        raise TypeError(f"cannot differentiate with respect to {v!r}")
    if isinstance(e, (Num, _EulerE)):
        return ZERO
    if isinstance(e, (Sym, Jet, Fn)):
        return _d_atom(e, v)
    if not depends_on(e, v):
        return ZERO
    if isinstance(e, Add):
        return add(*[differentiate(t, v) for t in e.terms])
    if isinstance(e, Pow):
        return _d_power(e.base, e.exponent, v)
    if isinstance(e, Mul):
        factors = e.factors
        parts = []
        for i, (b, x) in enumerate(factors):
            d = _d_power(b, x, v) if x != ONE else differentiate(b, v)
            if d.is_zero:
                continue
            rest = _from_term(e.coeff, factors[:i] + factors[i + 1 :])
            parts.append(mul(rest, d))
        return add(*parts)
    raise TypeError(type(e))
