"""Numeric evaluation, vectorized compilation and equivalence testing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .expr import Add, Expr, Fn, Jet, Mul, Num, Pow, Sym, _EulerE, as_expr, sub


class EvaluationError(ValueError):
    """Unbound symbol, fractional power of a negative, or division by zero."""


def _normalize_bindings(b: Mapping) -> dict:
    out = {}
    for k, v in b.items():
        if isinstance(k, Expr):
            k = k.name
        out[k] = v
    return out


def _pow(base: float, expo: float, integral: bool) -> float:
    if integral:
        if base == 0.0 and expo < 0:
            raise EvaluationError("division by zero")
        return base ** int(expo)
    if base < 0:
        raise EvaluationError("fractional power of negative")
    if base == 0.0:
        if expo > 0:
            return 0.0
        raise EvaluationError("division by zero")
    return base**expo


def _is_integral(e: Expr) -> bool:
    return isinstance(e, Num) and e.value.denominator == 1


def _eval(e: Expr, env: dict) -> float:
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, (Sym, Jet, Fn)):
        try:
            return float(env[e.name])
        except KeyError:
            raise EvaluationError(f"unbound symbol {e.name}") from None
    if isinstance(e, _EulerE):
        return math.e
    if isinstance(e, Add):
        return math.fsum(_eval(t, env) for t in e.terms)
    if isinstance(e, Pow):
        return _eval_factor(e.base, e.exponent, env)
    if isinstance(e, Mul):
        out = float(e.coeff)
        for b, x in e.factors:
            out *= _eval_factor(b, x, env)
        return out
    raise TypeError(type(e))


def _eval_factor(b: Expr, x: Expr, env: dict) -> float:
    xv = _eval(x, env)
    if isinstance(b, _EulerE):
        return math.exp(xv)
    bv = _eval(b, env)
    # a symbolic exponent bound to an integer value (u^(2*k) at k=1) counts as integral
    return _pow(bv, xv, _is_integral(x) or float(xv).is_integer())


def evaluate(e, bindings: Mapping) -> float:
    """Evaluate to a float; every free atom must be bound."""
    return _eval(as_expr(e), _normalize_bindings(bindings))


def free_names(e: Expr) -> list[str]:
    return sorted(a.name for a in e.atoms())


def compile_numeric(e, names: Sequence[str] | None = None) -> Callable[..., np.ndarray]:
    """Compile to a numpy function of the given argument names (sorted free names by default).

    Fractional powers are taken as exp(q*log(b)) and yield nan for b <= 0.
    """
    e = as_expr(e)
    names = list(names) if names is not None else free_names(e)
    index = {n: i for i, n in enumerate(names)}
    missing = set(free_names(e)) - set(index)
    if missing:
        raise EvaluationError(f"unbound symbol {sorted(missing)[0]}")

    def build(node: Expr):
        if isinstance(node, Num):
            c = float(node.value)
            return lambda args: c
        if isinstance(node, (Sym, Jet, Fn)):
            i = index[node.name]
            return lambda args: args[i]
        if isinstance(node, _EulerE):
            return lambda args: math.e
        if isinstance(node, Add):
            fs = [build(t) for t in node.terms]
            return lambda args: sum(f(args) for f in fs)
        if isinstance(node, Pow):
            return build_factor(node.base, node.exponent)
        if isinstance(node, Mul):
            c = float(node.coeff)
            fs = [build_factor(b, x) for b, x in node.factors]

            def prod(args):
                out = c
                for f in fs:
                    out = out * f(args)
                return out

            return prod
        raise TypeError(type(node))

    def build_factor(b: Expr, x: Expr):
        fx = build(x)
        if isinstance(b, _EulerE):
            return lambda args: np.exp(fx(args))
        fb = build(b)
        if _is_integral(x):
            n = int(x.value)
            if n > 0:
                return lambda args: fb(args) ** n
            return lambda args: 1.0 / np.asarray(fb(args), dtype=float) ** (-n)

        def frac(args):
            base = np.asarray(fb(args), dtype=float)
            with np.errstate(invalid="ignore", divide="ignore"):
                return np.where(base > 0, np.exp(fx(args) * np.log(np.where(base > 0, base, 1.0))), np.nan)

        return frac

    root = build(e)

    def f(*args):
        if len(args) != len(names):
            raise TypeError(f"expected {len(names)} arguments ({', '.join(names)})")
        return root(args)

    f.names = tuple(names)
    return f


@dataclass(frozen=True)
class Equivalence:
    equal: bool
    probabilistic: bool
    max_relative_deviation: float = 0.0

    def __bool__(self) -> bool:
        return self.equal


def _scale_and_value(d: Expr, env: dict) -> tuple[float, float]:
    terms = d.terms if isinstance(d, Add) else (d,)
    vals = [_eval(t, env) for t in terms]
    return math.fsum(vals), math.fsum(abs(v) for v in vals)


def equivalent(a, b, samples: int = 50, rtol: float = 1e-10, seed: int = 20240611) -> Equivalence:
    """Decide a == b: structural zero first, then seeded random sampling.

    Free atoms are drawn from [1/2, 2]. The deviation is measured against the
    sum of absolute values of the expanded difference's terms, so comparing
    with zero is meaningful.
    """
    d = sub(as_expr(a), as_expr(b))
    if d.is_zero:
        return Equivalence(True, False, 0.0)
    names = free_names(d)
    if not names:
        value, scale = _scale_and_value(d, {})
        dev = abs(value) / scale if scale > 0 else abs(value)
        return Equivalence(dev <= rtol, False, dev)
    rng = np.random.default_rng(seed)
    worst = 0.0
    accepted = 0
    attempts = 0
    while accepted < samples and attempts < 20 * samples:
        attempts += 1
        env = dict(zip(names, rng.uniform(0.5, 2.0, size=len(names))))
        try:
            value, scale = _scale_and_value(d, env)
        except (EvaluationError, OverflowError, ZeroDivisionError):
            continue
        accepted += 1
        dev = abs(value) / scale if scale > 0 else abs(value)
        worst = max(worst, dev)
        if dev > rtol:
            return Equivalence(False, True, worst)
    if accepted == 0:
        return Equivalence(False, True, math.inf)
    return Equivalence(True, True, worst)
