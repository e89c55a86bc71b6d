"""Text rendering in the parser's grammar, so that parse(to_string(e)) == e."""

from __future__ import annotations

from fractions import Fraction

from .expr import Add, Expr, Fn, Jet, Mul, Num, Pow, Sym, _EulerE


def _frac(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _is_atomic(e: Expr) -> bool:
    return isinstance(e, (Sym, Jet, Fn)) or (
        isinstance(e, Num) and e.value >= 0 and e.value.denominator == 1
    )


def _factor(base: Expr, expo: Expr) -> str:
    if isinstance(base, _EulerE):
        return f"exp({to_string(expo)})"
    b = to_string(base)
    if not _is_atomic(base):
        b = f"({b})"
    if expo == 1:
        return b
    x = to_string(expo)
    if not _is_atomic(expo):
        x = f"({x})"
    return f"{b}^{x}"


def _term(e: Expr) -> tuple[bool, str]:
    """Return (negative, text-of-magnitude) for one summand."""
    if isinstance(e, Num):
        return e.value < 0, _frac(abs(e.value))
    if isinstance(e, Mul):
        c, factors = e.coeff, e.factors
    elif isinstance(e, Pow):
        c, factors = Fraction(1), ((e.base, e.exponent),)
    else:
        c, factors = Fraction(1), ((e, Num(1)),)
    body = "*".join(_factor(b, x) for b, x in factors)
    mag = abs(c)
    if mag != 1:
        body = f"{_frac(mag)}*{body}"
    return c < 0, body


def to_string(e: Expr) -> str:
    if isinstance(e, _EulerE):
        return "exp(1)"
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, (Jet, Fn)):
        return e.name
    if isinstance(e, Add):
        out = []
        for i, t in enumerate(e.terms):
            negative, body = _term(t)
            if i == 0:
                out.append(("-" if negative else "") + body)
            else:
                out.append((" - " if negative else " + ") + body)
        return "".join(out)
    negative, body = _term(e)
    return ("-" if negative else "") + body
