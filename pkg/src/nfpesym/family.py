"""The nonlinear Fokker-Planck family u_t = (x u)_x + Omega * Lambda(u)_xx.

Lambda(u) = u^(1+r) * ((r+k)/(2k) u^k - (r-k)/(2k) u^(-k)), with exact
rational r, k. Omega stays a symbol in the tree and is bound only when
evaluating numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .jets import EvolutionPde, VectorField, invariance_residual, total_derivative
from .symexpr import (
    Expr,
    Sym,
    U,
    X,
    add,
    as_expr,
    equivalent,
    mul,
    num,
    parse,
    power,
    substitute,
    to_string,
)

Rational = Union[int, Fraction, str]
OMEGA = Sym("Omega")
DELTA = Sym("delta")

HALF = Fraction(1, 2)
DEGENERATE = {(Fraction(-1, 2), HALF), (Fraction(-1, 2), -HALF)}
PARTS = ("i", "ii", "iii", "iv")


class DegenerateParameterError(ValueError):
    """Lambda is constant: the equation is first-order linear with an infinite-dimensional algebra."""


class DomainError(ValueError):
    """Parameter outside the family's domain (k = 0, Omega <= 0)."""


def rational(v: Rational) -> Fraction:
    if isinstance(v, float):
        raise TypeError("pass rationals as 'p/q' strings, ints or Fractions, not floats")
    return Fraction(v)


def check_parameters(r: Fraction, k: Fraction) -> None:
    if k == 0:
        raise DomainError("k = 0: entropy parameter out of domain")
    if (r, k) in DEGENERATE:
        raise DegenerateParameterError(
            f"(r, k) = ({r}, {k}) makes Lambda constant; the equation is first-order linear "
            "and its symmetry algebra is infinite-dimensional"
        )


def lambda_expr(r, k) -> Expr:
    """Lambda(u) as an expression; r and k may be rationals or symbols."""
    r, k = as_expr(r), as_expr(k)
    two_k = mul(num(2), k)
    a = mul(add(r, k), power(two_k, num(-1)))
    b = mul(add(r, mul(num(-1), k)), power(two_k, num(-1)))
    return add(
        mul(a, power(U, add(num(1), r, k))),
        mul(num(-1), b, power(U, add(num(1), r, mul(num(-1), k)))),
    )


def rhs_expr(r, k, omega: Expr = OMEGA) -> Expr:
    lam = lambda_expr(r, k)
    drift = total_derivative(mul(X, U), "x")
    diffusion = total_derivative(total_derivative(lam, "x"), "x")
    return add(drift, mul(omega, diffusion))


def symbolic_pde() -> EvolutionPde:
    """The family with r, k and Omega all symbolic."""
    return EvolutionPde(rhs_expr(Sym("r"), Sym("k")))


@dataclass(frozen=True)
class PdeInstance:
    r: Fraction
    k: Fraction
    omega: float = 1.0
    rhs: EvolutionPde = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        r, k = rational(self.r), rational(self.k)
        check_parameters(r, k)
        if not self.omega > 0:
            raise DomainError("Omega must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "rhs", EvolutionPde(rhs_expr(r, k)))
        object.__setattr__(self, "_terms", self._power_terms())

    @property
    def lam(self) -> Expr:
        return lambda_expr(self.r, self.k)

    def power_terms(self) -> list[tuple[float, float]]:
        """Lambda as a list of (coefficient, exponent) pairs."""
        return list(self._terms)

    def _power_terms(self) -> tuple:
        r, k = self.r, self.k
        terms = [((r + k) / (2 * k), 1 + r + k), (-(r - k) / (2 * k), 1 + r - k)]
        merged: dict[Fraction, Fraction] = {}
        for c, p in terms:
            if c != 0:
                merged[p] = merged.get(p, Fraction(0)) + c
        return tuple((float(c), float(p)) for p, c in sorted(merged.items()) if c != 0 and p != 0)

    def exponents_integral(self) -> bool:
        return all(float(p).is_integer() for _, p in self.power_terms())

    def lam_numeric(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for c, p in self._terms:
            out = out + c * _pow(u, p)
        return out

    def dlam_numeric(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for c, p in self._terms:
            out = out + c * p * _pow(u, p - 1)
        return out

    def rhs_bound(self) -> Expr:
        """Right-hand side with the float Omega bound as an exact rational."""
        return substitute(self.rhs.F, {OMEGA: num(Fraction(self.omega).limit_denominator(10**12))})


def _pow(u: np.ndarray, p: float) -> np.ndarray:
    if float(p).is_integer():
        return u ** int(p) if p >= 0 else 1.0 / u ** int(-p)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(u > 0, np.exp(p * np.log(np.where(u > 0, u, 1.0))), np.nan)


def make_pde(r: Rational, k: Rational, omega: float = 1.0) -> PdeInstance:
    return PdeInstance(rational(r), rational(k), omega)


# -- classification ---------------------------------------------------------


@dataclass(frozen=True)
class CaseId:
    family: str  # "Generic", "A", "B", "C"
    part: Optional[str] = None
    delta: Optional[Fraction] = None

    def __post_init__(self):
        if self.family not in ("Generic", "A", "B", "C"):
            raise ValueError(f"unknown family {self.family}")
        if self.family != "Generic" and self.part not in PARTS:
            raise ValueError(f"part must be one of {PARTS}")
        if self.delta is not None:
            object.__setattr__(self, "delta", Fraction(self.delta))

    @property
    def label(self) -> str:
        if self.family == "Generic":
            return "Generic"
        s = f"{self.family}({self.part})"
        if self.family == "C" and self.delta is not None:
            s += f"[delta={self.delta}]"
        return s

    @property
    def header_delta(self) -> Optional[Fraction]:
        """The alternative delta (= +-k) used by the (iii)/(iv) reduction formulas."""
        if self.family != "C" or self.part not in ("iii", "iv") or self.delta is None:
            return self.delta
        return self.delta + HALF

    def __str__(self):
        return self.label


def line_of(r: Fraction, k: Fraction) -> Optional[tuple[str, Fraction]]:
    """Which of r = k, -k, -1+k, -1-k holds, with the table's delta."""
    if r == k:
        return "i", k
    if r == -k:
        return "ii", -k
    if r == -1 + k:
        return "iii", k - HALF
    if r == -1 - k:
        return "iv", -k - HALF
    return None


def classify(r: Rational, k: Rational) -> CaseId:
    r, k = rational(r), rational(k)
    check_parameters(r, k)
    hit = line_of(r, k)
    if hit is None:
        return CaseId("Generic")
    part, delta = hit
    if delta == Fraction(-2, 3):
        return CaseId("A", part)
    if delta == -1:
        return CaseId("B", part)
    return CaseId("C", part, delta)


def parameters_for(family: str, part: str, k: Optional[Rational] = None) -> tuple[Fraction, Fraction]:
    """(r, k) realizing a case; A and B fix k, C needs it."""
    fixed = {
        "A": {"i": Fraction(-2, 3), "ii": Fraction(2, 3), "iii": Fraction(-1, 6), "iv": Fraction(1, 6)},
        "B": {"i": Fraction(-1), "ii": Fraction(1), "iii": Fraction(-1, 2), "iv": Fraction(1, 2)},
    }
    if family in fixed:
        kk = fixed[family][part]
    else:
        if k is None:
            raise ValueError("Case C needs k")
        kk = rational(k)
    r = {"i": kk, "ii": -kk, "iii": -1 + kk, "iv": -1 - kk}[part]
    return r, kk


def powerlaw(case: CaseId, r: Fraction, k: Fraction) -> tuple[Fraction, Fraction]:
    """On the four lines Lambda = C*u^m; returns (C, m)."""
    part, _ = line_of(r, k)
    if part == "i":
        return Fraction(1), 1 + 2 * k
    if part == "ii":
        return Fraction(1), 1 - 2 * k
    if part == "iii":
        return (2 * k - 1) / (2 * k), 2 * k
    return (1 + 2 * k) / (2 * k), -2 * k


# -- generator catalog --------------------------------------------------------

PRINCIPAL = (("0", "1", "0"), ("exp(-t)", "0", "0"))
CATALOG_SOURCE = {
    "A": PRINCIPAL
    + (
        ("x*exp(-2*t/3)", "-exp(-2*t/3)", "-u*exp(-2*t/3)"),
        ("x^2*exp(t)", "0", "-3*x*u*exp(t)"),
        ("x", "-1", "-3/2*u"),
    ),
    "B": PRINCIPAL + (("x", "-1", "-u"), ("t*x", "-t", "-u*(t + 1/2)")),
    "C": PRINCIPAL
    + (
        ("x*exp(-2*(1+delta)*t)", "-exp(-2*(1+delta)*t)", "-u*exp(-2*(1+delta)*t)"),
        ("x", "-1", "u/delta"),
    ),
    "Generic": PRINCIPAL,
}


@dataclass(frozen=True)
class GeneratorCatalog:
    case: CaseId
    basis: tuple

    @property
    def names(self) -> list[str]:
        return [f"X{i + 1}" for i in range(len(self.basis))]

    def __len__(self):
        return len(self.basis)


def _field(src: tuple, delta) -> VectorField:
    comps = [parse(s) for s in src]
    if delta is not None:
        comps = [substitute(c, {DELTA: as_expr(delta)}) for c in comps]
    return VectorField(*comps)


def generators(case: CaseId, delta=None) -> GeneratorCatalog:
    """Basis in the table's order. For Case C, ``delta`` overrides case.delta
    (pass DELTA to keep it symbolic)."""
    if case.family == "C":
        d = delta if delta is not None else case.delta
        if d is None:
            raise ValueError("Case C generators need delta")
        if not isinstance(d, Expr):
            d = Fraction(d)
            if d == 0:
                raise ValueError("delta = 0: X4 is undefined")
    else:
        d = None
    return GeneratorCatalog(case, tuple(_field(s, d) for s in CATALOG_SOURCE[case.family]))


def delta_candidates(case: CaseId) -> dict[str, Fraction]:
    """Both readings of delta for Case C: the generator table's and the reduction header's."""
    if case.family != "C":
        return {}
    return {"table": case.delta, "header": case.header_delta}


def verify_catalog(pde: PdeInstance, catalog: GeneratorCatalog) -> list[bool]:
    """Whether each generator's invariance residual is identically zero."""
    return [bool(equivalent(invariance_residual(v, pde.rhs), 0)) for v in catalog.basis]


def resolve_delta(r: Rational, k: Rational) -> dict[str, bool]:
    """For Case C, test which delta candidate yields admitted generators."""
    case = classify(r, k)
    pde = make_pde(r, k)
    out = {}
    for name, d in delta_candidates(case).items():
        if d == 0 or d == -1:
            out[name] = False
            continue
        out[name] = all(verify_catalog(pde, generators(case, d)))
    return out


def catalog_json(case: CaseId) -> str:
    constraints = {
        "A": {"i": "r=k, k=-2/3", "ii": "r=-k, k=2/3", "iii": "r=-1+k, k=-1/6", "iv": "r=-1-k, k=1/6"},
        "B": {"i": "r=k, k=-1", "ii": "r=-k, k=1", "iii": "r=-1+k, k=-1/2", "iv": "r=-1-k, k=1/2"},
        "C": {
            "i": "r=k, k not in {-1/2, -2/3, -1}",
            "ii": "r=-k, k not in {1/2, 2/3, 1}",
            "iii": "r=-1+k, k not in {1/2, -1/2, -1/6}",
            "iv": "r=-1-k, k not in {1/2, -1/2, 1/6}",
        },
    }
    cat = generators(case)
    doc = {
        "case": case.label,
        "constraints": constraints.get(case.family, {}).get(case.part, "r not on r=+-k, r=-1+-k"),
        "delta": None if case.delta is None else str(case.delta),
        "generators": [
            {"name": n, "xi": to_string(v.xi), "tau": to_string(v.tau), "eta": to_string(v.eta)}
            for n, v in zip(cat.names, cat.basis)
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)
