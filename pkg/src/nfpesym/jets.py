"""Jet space: total derivatives, second prolongation and determining equations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .symexpr import (
    ONE,
    ZERO,
    Expr,
    Fn,
    Jet,
    OrderOverflowError,
    Sym,
    T,
    U,
    X,
    add,
    as_expr,
    differentiate,
    mul,
    neg,
    num,
    substitute,
)
from .symexpr.expr import Add, Mul, Num, Pow, _EulerE

UX, UT = Jet(1, 0), Jet(0, 1)
UXX, UXT, UTT = Jet(2, 0), Jet(1, 1), Jet(0, 2)
UXXX = Jet(3, 0)


class NotPolynomialError(ValueError):
    """The residual is not polynomial in the jet indeterminates."""


def _jets_in(e: Expr) -> list[Jet]:
    return sorted((a for a in e.atoms() if isinstance(a, Jet)), key=lambda j: j.key)


def _check_point(name: str, e: Expr) -> None:
    for a in e.atoms():
        if isinstance(a, Jet) and a.order > 0:
            raise ValueError(f"{name} contains the jet variable {a.name}; not a point symmetry")


@dataclass(frozen=True)
class VectorField:
    """xi*d/dx + tau*d/dt + eta*d/du with components in (x, t, u)."""

    xi: Expr
    tau: Expr
    eta: Expr

    def __post_init__(self):
        for name in ("xi", "tau", "eta"):
            e = as_expr(getattr(self, name))
            _check_point(name, e)
            object.__setattr__(self, name, e)

    @classmethod
    def parse(cls, xi: str, tau: str, eta: str) -> "VectorField":
        return cls(as_expr(xi), as_expr(tau), as_expr(eta))

    @property
    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.xi, self.tau, self.eta)

    def apply(self, f: Expr) -> Expr:
        """Action of the field as a derivation on a function of (x, t, u)."""
        f = as_expr(f)
        return add(
            mul(self.xi, differentiate(f, X)),
            mul(self.tau, differentiate(f, T)),
            mul(self.eta, differentiate(f, U)),
        )

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(add(self.xi, other.xi), add(self.tau, other.tau), add(self.eta, other.eta))

    def scale(self, c) -> "VectorField":
        c = as_expr(c)
        return VectorField(mul(c, self.xi), mul(c, self.tau), mul(c, self.eta))

    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def __str__(self):
        return f"({self.xi}, {self.tau}, {self.eta})"


def linear_combination(coeffs: Sequence, basis: Sequence[VectorField]) -> VectorField:
    out = VectorField(ZERO, ZERO, ZERO)
    for c, v in zip(coeffs, basis):
        if as_expr(c).is_zero:
            continue
        out = out + v.scale(c)
    return out


UNKNOWN_FIELD = VectorField(Fn("xi"), Fn("tau"), Fn("eta"))


@dataclass(frozen=True)
class EvolutionPde:
    """u_t = F with F depending on x, t, u, u_x, u_xx only."""

    F: Expr

    def __post_init__(self):
        F = as_expr(self.F)
        for a in F.atoms():
            if isinstance(a, Jet) and (a.nt > 0 or a.order > 2):
                raise ValueError(f"right-hand side may not contain {a.name}")
        object.__setattr__(self, "F", F)

    @property
    def delta(self) -> Expr:
        return add(UT, neg(self.F))


def total_derivative(e, wrt, max_order: int = 3) -> Expr:
    """D_x or D_t of an expression on jet space."""
    e = as_expr(e)
    v = X if wrt in ("x", X) else T if wrt in ("t", T) else None
    if v is None:
        raise ValueError("total derivative is taken with respect to x or t")
    out = [differentiate(e, v)]
    jets = set(_jets_in(e))
    if any(isinstance(a, Fn) for a in e.atoms()):
        jets.add(U)
    for j in sorted(jets, key=lambda j: j.key):
        dj = differentiate(e, j)
        if dj.is_zero:
            continue
        nx, nt = (j.nx + 1, j.nt) if v is X else (j.nx, j.nt + 1)
        if nx + nt > max_order:
            raise OrderOverflowError(
                f"D_{v.name} of {j.name} needs jets of order {nx + nt} > {max_order}"
            )
        out.append(mul(Jet(nx, nt), dj))
    return add(*out)


@dataclass(frozen=True)
class ProlongedCoeffs:
    eta1_x: Expr
    eta1_t: Expr
    eta2_xx: Expr
    eta2_xt: Expr
    eta2_tt: Expr

    def as_dict(self) -> dict[str, Expr]:
        return {
            "eta1_x": self.eta1_x,
            "eta1_t": self.eta1_t,
            "eta2_xx": self.eta2_xx,
            "eta2_xt": self.eta2_xt,
            "eta2_tt": self.eta2_tt,
        }


def prolong(vf: VectorField) -> ProlongedCoeffs:
    """Second prolongation coefficients by the recursive formula."""
    D = total_derivative
    xi, tau, eta = vf.components
    Dx_xi, Dt_xi = D(xi, "x"), D(xi, "t")
    Dx_tau, Dt_tau = D(tau, "x"), D(tau, "t")

    def first(Deta, Dxi, Dtau):
        return add(Deta, neg(mul(UX, Dxi)), neg(mul(UT, Dtau)))

    ex = first(D(eta, "x"), Dx_xi, Dx_tau)
    et = first(D(eta, "t"), Dt_xi, Dt_tau)
    exx = add(D(ex, "x"), neg(mul(UXX, Dx_xi)), neg(mul(UXT, Dx_tau)))
    ext = add(D(ex, "t"), neg(mul(UXX, Dt_xi)), neg(mul(UXT, Dt_tau)))
    ett = add(D(et, "t"), neg(mul(UXT, Dt_xi)), neg(mul(UTT, Dt_tau)))
    return ProlongedCoeffs(ex, et, exx, ext, ett)


def apply_prolongation(vf: VectorField, delta: Expr, coeffs: ProlongedCoeffs | None = None) -> Expr:
    """X^(2) applied to a function on second-order jet space."""
    delta = as_expr(delta)
    pc = coeffs or prolong(vf)
    pairs = [
        (vf.xi, X),
        (vf.tau, T),
        (vf.eta, U),
        (pc.eta1_x, UX),
        (pc.eta1_t, UT),
        (pc.eta2_xx, UXX),
        (pc.eta2_xt, UXT),
        (pc.eta2_tt, UTT),
    ]
    terms = []
    for c, v in pairs:
        d = differentiate(delta, v)
        if not d.is_zero and not c.is_zero:
            terms.append(mul(c, d))
    return add(*terms)


def solution_manifold(pde: EvolutionPde) -> dict:
    """Bindings that eliminate t-derivatives: u_t, u_xt (and u_tt on demand)."""
    F = pde.F
    DxF = total_derivative(F, "x")
    return {UT: F, UXT: DxF}


def restrict_to_solutions(e: Expr, pde: EvolutionPde) -> Expr:
    """Impose u_t = F and its differential consequences.

    u_tt is replaced first, by D_t F with u_t and u_xt already eliminated;
    then u_xt and u_t are replaced simultaneously.
    """
    e = as_expr(e)
    rules = solution_manifold(pde)
    if UTT in e.atoms():
        DtF = substitute(total_derivative(pde.F, "t"), rules)
        e = substitute(e, {UTT: DtF})
    return substitute(e, rules)


def invariance_condition(vf: VectorField, pde: EvolutionPde) -> Expr:
    """X^(2) Delta before restriction to solutions."""
    return apply_prolongation(vf, pde.delta)


def invariance_residual(vf: VectorField, pde: EvolutionPde) -> Expr:
    """X^(2) Delta on solutions; identically zero iff vf is admitted."""
    return restrict_to_solutions(invariance_condition(vf, pde), pde)


# -- determining equations ---------------------------------------------------

SPLIT_VARS = (UX, UXX, UXXX)


def split_by_monomials(e: Expr, variables: Sequence[Expr] = SPLIT_VARS) -> dict[tuple, Expr]:
    """Collect e as a polynomial in the given jet variables.

    Returns {exponent tuple: coefficient}. Raises NotPolynomialError if a
    variable sits under a non-integer power or inside a composite base.
    """
    e = as_expr(e)
    index = {v: i for i, v in enumerate(variables)}
    groups: dict[tuple, list[Expr]] = {}
    terms = e.terms if isinstance(e, Add) else (e,)
    for term in terms:
        powers = [0] * len(variables)
        if isinstance(term, Mul):
            coeff, factors = num(term.coeff), term.factors
        elif isinstance(term, Pow):
            coeff, factors = ONE, ((term.base, term.exponent),)
        elif isinstance(term, Num):
            coeff, factors = term, ()
        else:
            coeff, factors = ONE, ((term, ONE),)
        rest = [coeff]
        for b, x in factors:
            if b in index:
                if not (isinstance(x, Num) and x.value.denominator == 1 and x.value > 0):
                    raise NotPolynomialError(f"{b.name} raised to {x}")
                powers[index[b]] += int(x.value)
                continue
            if any(v in index for v in b.atoms()) or any(v in index for v in x.atoms()):
                raise NotPolynomialError(f"jet variable inside {b}^{x}")
            rest.append(Pow(b, x) if x != ONE else b)
        groups.setdefault(tuple(powers), []).append(mul(*rest))
    out = {}
    for k in sorted(groups):
        c = add(*groups[k])
        if not c.is_zero:
            out[k] = c
    return out


def monomial_name(powers: tuple, variables: Sequence[Expr] = SPLIT_VARS) -> str:
    parts = []
    for v, p in zip(variables, powers):
        if p == 1:
            parts.append(v.name)
        elif p > 1:
            parts.append(f"{v.name}^{p}")
    return "*".join(parts) or "1"


def determining_system(pde: EvolutionPde, ansatz: VectorField = UNKNOWN_FIELD) -> dict[tuple, Expr]:
    """Coefficients of the jet monomials in the invariance residual."""
    return split_by_monomials(invariance_residual(ansatz, pde))


def determining_equations(pde: EvolutionPde, ansatz: VectorField = UNKNOWN_FIELD) -> list[Expr]:
    return list(determining_system(pde, ansatz).values())


def instantiate(e: Expr, vf: VectorField, ansatz: VectorField = UNKNOWN_FIELD) -> Expr:
    """Replace unknown-function atoms by the derivatives of a concrete field."""
    names = {}
    for unknown, concrete in zip(ansatz.components, vf.components):
        if isinstance(unknown, Fn):
            names[unknown.fname] = concrete
    bindings = {}
    for a in e.atoms():
        if isinstance(a, Fn) and a.fname in names:
            d = names[a.fname]
            for v, n in ((X, a.ix), (T, a.it), (U, a.iu)):
                for _ in range(n):
                    d = differentiate(d, v)
            bindings[a] = d
    return substitute(e, bindings)


def forced_zero(equations: Iterable[Expr]) -> frozenset:
    """Unknown-function atoms that the system forces to vanish identically.

    An equation of the form c*A with A a single unknown atom and c free of
    unknowns forces A = 0, hence all derivatives of A. The closure is iterated.
    """
    eqs = [as_expr(e) for e in equations]
    zero: set = set()

    def derived(a: Fn) -> list[Fn]:
        out = [a]
        for dx, dt, du in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            try:
                out.append(Fn(a.fname, a.ix + dx, a.it + dt, a.iu + du))
            except OrderOverflowError:
                pass
        return out

    changed = True
    while changed:
        changed = False
        bindings = {a: ZERO for a in zero}
        for e in eqs:
            r = substitute(e, bindings) if bindings else e
            fns = [a for a in r.atoms() if isinstance(a, Fn)]
            if len(fns) != 1 or r.is_zero:
                continue
            a = fns[0]
            c = substitute(r, {a: ONE})
            if (
                a not in zero
                and not c.is_zero
                and substitute(r, {a: ZERO}).is_zero
                and add(r, neg(mul(c, a))).is_zero
            ):
                for d in derived(a):
                    if d not in zero:
                        zero.add(d)
                changed = True
    return frozenset(zero)


# -- independent numeric check ---------------------------------------------------


class Taylor2:
    """Truncated Taylor polynomial in two variables, total degree <= n."""

    __slots__ = ("c", "n")

    def __init__(self, c: np.ndarray, n: int):
        self.c = c
        self.n = n

    @classmethod
    def const(cls, v: float, n: int) -> "Taylor2":
        c = np.zeros((n + 1, n + 1))
        c[0, 0] = v
        return cls(c, n)

    @classmethod
    def variable(cls, v: float, slot: int, n: int) -> "Taylor2":
        t = cls.const(v, n)
        if n >= 1:
            if slot == 0:
                t.c[1, 0] = 1.0
            else:
                t.c[0, 1] = 1.0
        return t

    def _mask(self, c):
        n = self.n
        i, j = np.indices(c.shape)
        c[i + j > n] = 0.0
        return c

    def __add__(self, o: "Taylor2") -> "Taylor2":
        return Taylor2(self.c + o.c, self.n)

    def scale(self, s: float) -> "Taylor2":
        return Taylor2(self.c * s, self.n)

    def __mul__(self, o: "Taylor2") -> "Taylor2":
        n = self.n
        out = np.zeros((n + 1, n + 1))
        for i in range(n + 1):
            for j in range(n + 1 - i):
                a = self.c[i, j]
                if a != 0.0:
                    out[i:, j:] += a * o.c[: n + 1 - i, : n + 1 - j]
        return Taylor2(self._mask(out), self.n)

    def _series(self, f0: float, derivs: list[float]) -> "Taylor2":
        # f(a0 + h) = sum f^(m)(a0) h^m / m!, with h nilpotent of order n+1
        h = Taylor2(self.c.copy(), self.n)
        h.c[0, 0] = 0.0
        out = Taylor2.const(f0, self.n)
        hp = Taylor2.const(1.0, self.n)
        for m in range(1, self.n + 1):
            hp = hp * h
            out = out + hp.scale(derivs[m - 1] / math.factorial(m))
        return out

    def exp(self) -> "Taylor2":
        e0 = math.exp(self.c[0, 0])
        return self._series(e0, [e0] * self.n)

    def pow(self, p: float, integral: bool) -> "Taylor2":
        a0 = self.c[0, 0]
        if integral and p >= 0:
            out = Taylor2.const(1.0, self.n)
            for _ in range(int(p)):
                out = out * self
            return out
        if a0 <= 0 and not integral:
            raise ValueError("fractional power of nonpositive value")
        derivs = []
        coef = 1.0
        for m in range(1, self.n + 1):
            coef *= p - (m - 1)
            derivs.append(coef * a0 ** (p - m))
        return self._series(a0**p, derivs)


def taylor_eval(e: Expr, env: Mapping[str, Taylor2], n: int) -> Taylor2:
    """Evaluate the tree on truncated Taylor arguments (chain rule by recursion)."""
    if isinstance(e, Num):
        return Taylor2.const(float(e.value), n)
    if isinstance(e, (Sym, Jet, Fn)):
        return env[e.name]
    if isinstance(e, Add):
        out = Taylor2.const(0.0, n)
        for t in e.terms:
            out = out + taylor_eval(t, env, n)
        return out
    if isinstance(e, (Pow, Mul)):
        coeff = 1.0 if isinstance(e, Pow) else float(e.coeff)
        factors = ((e.base, e.exponent),) if isinstance(e, Pow) else e.factors
        out = Taylor2.const(coeff, n)
        for b, x in factors:
            xv = taylor_eval(x, env, n)
            if isinstance(b, _EulerE):
                out = out * xv.exp()
                continue
            bv = taylor_eval(b, env, n)
            if np.any(xv.c.ravel()[1:] != 0.0):
                raise ValueError("exponent varies; write the factor with exp()")
            p = xv.c[0, 0]
            out = out * bv.pow(p, float(p).is_integer())
        return out
    if isinstance(e, _EulerE):
        return Taylor2.const(math.e, n)
    raise TypeError(type(e))


def brute_force_condition(
    vf: VectorField, pde: EvolutionPde, point: Mapping[str, float], ujet: Mapping[tuple, float]
) -> float:
    """X^(2) Delta at a jet point via the characteristic form of the prolongation.

    ``ujet`` maps (i, j) to d^(i+j)u/dx^i dt^j at (x0, t0) for i + j <= 3.
    Derivatives are propagated by truncated Taylor arithmetic, so no symbolic
    differentiation is involved.
    """
    n = 3
    x0, t0 = float(point["x"]), float(point["t"])
    uc = np.zeros((n + 1, n + 1))
    for (i, j), v in ujet.items():
        uc[i, j] = v / (math.factorial(i) * math.factorial(j))
    u = Taylor2(uc, n)
    env = {k: Taylor2.const(float(v), n) for k, v in point.items()}
    env.update({"x": Taylor2.variable(x0, 0, n), "t": Taylor2.variable(t0, 1, n), "u": u})
    xi, tau, eta = (taylor_eval(c, env, n) for c in vf.components)

    def deriv(tp: Taylor2, i: int, j: int) -> float:
        return tp.c[i, j] * math.factorial(i) * math.factorial(j)

    def shift(tp: Taylor2, slot: int) -> Taylor2:
        c = np.zeros_like(tp.c)
        if slot == 0:
            c[:-1, :] = tp.c[1:, :] * np.arange(1, n + 1)[:, None]
        else:
            c[:, :-1] = tp.c[:, 1:] * np.arange(1, n + 1)[None, :]
        return Taylor2(c, n)

    ux, ut = shift(u, 0), shift(u, 1)
    Q = eta + (xi * ux).scale(-1.0) + (tau * ut).scale(-1.0)
    xi0, tau0 = xi.c[0, 0], tau.c[0, 0]
    jet_vals = {(i, j): deriv(u, i, j) for i in range(n + 1) for j in range(n + 1 - i)}

    def eta_J(i: int, j: int) -> float:
        return deriv(Q, i, j) + xi0 * jet_vals[(i + 1, j)] + tau0 * jet_vals[(i, j + 1)]

    # directional derivative of Delta along the prolonged field, via a dual variable
    names = {"u": (0, 0), "u_x": (1, 0), "u_t": (0, 1), "u_xx": (2, 0), "u_xt": (1, 1), "u_tt": (0, 2)}
    direction = {"x": xi0, "t": tau0, "u": eta.c[0, 0]}
    for name, (i, j) in names.items():
        if name != "u":
            direction[name] = eta_J(i, j)
    denv = {}
    for k, v in point.items():
        denv[k] = Taylor2.const(float(v), 1)
    values = {"x": x0, "t": t0}
    values.update({name: jet_vals[idx] for name, idx in names.items()})
    for name, v in values.items():
        tp = Taylor2.const(v, 1)
        tp.c[1, 0] = direction.get(name, 0.0)
        denv[name] = tp
    return taylor_eval(pde.delta, denv, 1).c[1, 0]
