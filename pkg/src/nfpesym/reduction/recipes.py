"""Catalog of invariant ansaetze and reduced ODEs for the optimal-system representatives."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

from ..family import CaseId, PdeInstance, generators, make_pde, parameters_for
from ..jets import VectorField, linear_combination
from ..symexpr import Expr, Sym, num, parse, substitute, to_string
from . import ansatz as az

ZETA, Y, DY, D2Y = Sym("zeta"), Sym("y"), Sym("dy"), Sym("d2y")
ODE_VARIABLES = ("zeta", "y", "dy", "d2y")


class ConstraintError(ValueError):
    """Parameters violate a recipe's domain constraint."""


# The reduced ODEs as published, written in the symbols of the aux/params maps.
ODE_SOURCE = {
    ("A", "a"): "18*beta^(3/2)*y^(7/3)*dy + 9*beta*gamma*y^(10/3)"
    " + 2*theta*gamma*Omega*(3*y*d2y - 9*y^2 - 4*dy^2)",
    ("A", "b"): "18*omega^5*alpha^2*zeta*y^(7/3)*dy + rho*y^(10/3) + 2*theta*Omega*(4*dy^2 - 3*y*d2y)",
    ("A", "c"): "theta*(4*Omega*dy^2 - 3*Omega*y*d2y) + 9*zeta*y^(7/3)*dy + 9*y^(10/3)",
    # the stationary item is stated "with theta = 1" in every part
    ("A", "d"): "(4*Omega*dy^2 - 3*Omega*y*d2y) + 9*zeta*y^(7/3)*dy + 9*y^(10/3)",
    ("B", "a"): "2*theta*Omega*(y*d2y - 2*dy^2) + 2*alpha*zeta*y^3*dy + (1 + 2*alpha)*y^4",
    ("B", "b"): "theta*Omega*(alpha - 1)*(2*dy^2 - y*d2y) + alpha*(y^4 + zeta*y^3*dy)",
    ("B", "c"): "theta*Omega*(y*d2y - 2*dy^2) - zeta*y^3*dy - y^4",
    ("C12", "a"): "y*(lambda*y - delta*alpha*zeta*dy) - Omega*delta*omega*y^(2*delta)*(y*d2y + 2*delta*dy^2)",
    ("C12", "b"): "y^2 + Omega*(1 + 2*delta)*y^(2*delta)*(y*d2y + 2*delta*dy^2) + zeta*y*dy",
    ("C12", "c"): "Omega*(1 + 2*delta)*y^(2*delta - 1)*(y*d2y + 2*delta*dy^2) + zeta*dy + y",
    ("C34", "a"): "Omega*nu*y^(1 + 2*delta)*d2y + Omega*nu^2*y^(2*delta)*dy^2 + mu*zeta*y^2*dy + omega*y^3",
    ("C34", "b"): "y^3 + Omega*rho^2*y^(2*delta)*dy^2 - Omega*rho*y^(1 + 2*delta)*d2y + zeta*y^2*dy",
    ("C34", "c"): "y^3 + Omega*rho^2*y^(2*delta)*dy^2 - Omega*rho*y^(1 + 2*delta)*d2y + zeta*y^2*dy",
}

# Power p with R(x, t) = M(x, t) * y^(-p) * E(zeta): the published ODEs are
# multiplied through by y^p to clear negative and fractional powers.
Y_WEIGHT = {
    "A": Fraction(7, 3),
    "B": Fraction(3),
    ("C12", "a"): Fraction(1),
    ("C12", "b"): Fraction(1),
    ("C12", "c"): Fraction(0),
    "C34": Fraction(2),
}

# Generating field per representative as a combination of the case's basis.
FIELD_SOURCE = {
    ("A", "a"): "beta*X2 + X4 + gamma*X5",
    ("A", "b"): "alpha*X1 + beta*X2 + X4",
    ("A", "c"): "X1 + X3",
    ("A", "d"): "X1",
    ("B", "a"): "alpha*X1 + X4",
    ("B", "b"): "alpha*X1 + X3",
    ("B", "c"): "X1",
    ("C", "a"): "alpha*X1 + X4",
    ("C", "b"): "X1 + X3",
    ("C", "c"): "X1",
}

PARAMETERS = {
    ("A", "a"): ("beta", "gamma"),
    ("A", "b"): ("alpha", "beta"),
    ("B", "a"): ("alpha",),
    ("B", "b"): ("alpha",),
    ("C", "a"): ("alpha",),
}

REPRESENTATIVES = {"A": ("a", "b", "c", "d"), "B": ("a", "b", "c"), "C": ("a", "b", "c")}


def theta_for(case: CaseId) -> Fraction:
    """The coefficient of the power law on the (iii)/(iv) lines."""
    if case.family == "A":
        return Fraction(1) if case.part in ("i", "ii") else Fraction(4)
    if case.family == "B":
        return Fraction(1) if case.part in ("i", "ii") else Fraction(2)
    return Fraction(1)


def pde_for_case(case: CaseId, omega: float = 1.0) -> PdeInstance:
    if case.family in ("A", "B"):
        r, k = parameters_for(case.family, case.part)
    else:
        if case.delta is None:
            raise ValueError("Case C needs delta")
        d = case.delta
        k = {"i": d, "ii": -d, "iii": d + Fraction(1, 2), "iv": -d - Fraction(1, 2)}[case.part]
        r, k = parameters_for("C", case.part, k)
    return make_pde(r, k, omega)


@dataclass(frozen=True)
class Box:
    """Sampling rectangle in (x, t) where the ansatz is real and positive."""

    x: tuple
    t: tuple


@dataclass(frozen=True)
class ReductionRecipe:
    case: CaseId
    label: str
    params: Mapping[str, float]
    theta: Fraction
    aux: Mapping[str, object]
    shape: Callable
    ode: Expr
    field: VectorField
    box: Box
    y_weight: Fraction
    anchor: str
    notes: tuple = field(default=())

    @property
    def stationary(self) -> bool:
        return isinstance(self.shape, az.Stationary)

    def bindings(self, omega: float) -> dict[str, float]:
        """Float values for every non-ODE-variable symbol in ``ode``."""
        env = {k: float(v) for k, v in self.params.items()}
        env.update({k: float(v) for k, v in self.aux.items()})
        env["Omega"] = float(omega)
        return env

    def ode_string(self) -> str:
        return to_string(self.ode)

    def ansatz_string(self) -> str:
        return ANSATZ_TEXT[(_ode_family(self.case), self.label)]

    def to_dict(self) -> dict:
        return {
            "case": self.case.label,
            "representative": self.label,
            "field": FIELD_SOURCE[(self.case.family, self.label)],
            "params": {k: float(v) for k, v in self.params.items()},
            "theta": str(self.theta),
            "aux": {k: (str(v) if isinstance(v, Fraction) else float(v)) for k, v in self.aux.items()},
            "ansatz": self.ansatz_string(),
            "ode": self.ode_string(),
            "y_weight": str(self.y_weight),
            "box": {"x": list(self.box.x), "t": list(self.box.t)},
            "anchor": self.anchor,
            "notes": list(self.notes),
        }


ANSATZ_TEXT = {
    ("A", "a"): "u = e^(3t/2) (1 + x^2 e^(2t)/beta)^(-3/2) y(zeta), zeta = sqrt(beta) t/gamma + arctan(e^t x/sqrt(beta))",
    ("A", "b"): "u = 8 alpha^3 omega^3 e^(3(1-omega)t/2) y(zeta)/(2 e^t x + alpha(1+omega))^3,"
    " zeta = (alpha(omega-1) - 2 e^t x)/(omega (2 e^t x + alpha(1+omega)) e^(omega t))",
    ("A", "c"): "u = e^t y(zeta)/(e^(2t/3) - 1)^(3/2), zeta = e^t x/(e^(2t/3) - 1)^(3/2)",
    ("A", "d"): "u = y(zeta), zeta = x",
    ("B", "a"): "u = e^t (t - alpha)^(alpha + 1/2) y(zeta), zeta = e^t (t - alpha)^alpha x",
    ("B", "b"): "u = e^(t/(1-alpha)) y(zeta), zeta = e^(t/(1-alpha)) x",
    ("B", "c"): "u = y(zeta), zeta = x",
    ("C12", "a"): "u = e^(t/(delta(alpha-1))) y(zeta), zeta = x e^(t/(1-alpha))",
    ("C12", "b"): "u = e^t y(zeta)/(e^(2(1+delta)t) - 1)^(1/(2(1+delta))), zeta = e^t x/(e^(2(1+delta)t) - 1)^(1/(2(1+delta)))",
    ("C12", "c"): "u = y(zeta), zeta = x",
    ("C34", "a"): "u = e^(2t/(nu(alpha-1))) y(zeta), zeta = x e^(t/(1-alpha))",
    ("C34", "b"): "u = e^t y(zeta)/(e^((1+2delta)t) - 1)^(1/(1+2delta)), zeta = e^t x/(e^((1+2delta)t) - 1)^(1/(1+2delta))",
    ("C34", "c"): "u = y(zeta), zeta = x",
}


def _ode_family(case: CaseId) -> str:
    if case.family != "C":
        return case.family
    return "C12" if case.part in ("i", "ii") else "C34"


def _exact(v) -> Optional[Fraction]:
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return None


def _field_for(case: CaseId, label: str, params: Mapping[str, float]) -> VectorField:
    basis = generators(case).basis
    combo = parse(FIELD_SOURCE[(case.family, label)])
    coeffs = []
    for i in range(len(basis)):
        c = substitute(combo, {f"X{j + 1}": (1 if j == i else 0) for j in range(len(basis))})
        c = substitute(c, {k: num(Fraction(v)) for k, v in params.items()})
        coeffs.append(c)
    return linear_combination(coeffs, basis)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConstraintError(message)


def _time_box(a: float, lo: float = 0.3, hi: float = 1.3) -> tuple:
    """Where exp(a t) - 1 has the sign of a."""
    return (lo, hi) if a > 0 else (-hi, -lo)


def recipe(case: CaseId, label: str, params: Optional[Mapping[str, float]] = None) -> ReductionRecipe:
    """Build the reduction recipe for a representative of ``case``."""
    params = dict(params or {})
    if case.family not in REPRESENTATIVES:
        raise ValueError(f"no reductions for {case.label}")
    if label not in REPRESENTATIVES[case.family]:
        raise ValueError(f"unknown representative {label!r} for {case.label}")
    needed = PARAMETERS.get((case.family, label), ())
    missing = [p for p in needed if p not in params]
    if missing:
        raise ConstraintError(f"missing parameter(s) {', '.join(missing)}")
    params = {p: params[p] for p in needed}
    fam = _ode_family(case)
    theta = theta_for(case)
    aux: dict[str, object] = {}
    notes: list[str] = []
    exact: dict[str, Fraction] = {"theta": theta}
    al = float(params.get("alpha", 0.0))

    if fam == "A":
        weight = Y_WEIGHT["A"]
        if label == "a":
            beta, gamma = float(params["beta"]), float(params["gamma"])
            _require(beta * gamma != 0, "beta*gamma != 0")
            _require(beta > 0, "beta > 0 (sqrt(beta) and the arctan argument must be real)")
            shape, box = az.Elliptic(beta, gamma), Box((-1.0, 1.0), (0.1, 1.0))
        elif label == "b":
            beta = float(params["beta"])
            disc = al * al - 4.0 * beta
            _require(disc >= 0, f"alpha^2 - 4*beta >= 0 (got {disc:g})")
            _require(al != 0, "alpha != 0")
            om = math.sqrt(1.0 - 4.0 * beta / (al * al))
            _require(om > 0, "omega > 0 (alpha^2 = 4*beta makes the ansatz vanish identically)")
            aux["omega"] = om
            aux["rho"] = 9.0 * al**2 * om**4 * (3.0 * om - 1.0)
            shape = az.Hyperbolic(al, om)
            box = Box((0.1, 1.0) if al > 0 else (-1.0, -0.1), (0.1, 1.0))
        elif label == "c":
            shape, box = az.Source(2.0 / 3.0, 1.5), Box((-1.0, 1.0), (0.3, 1.3))
        else:
            shape, box = az.Stationary(), Box((-1.0, 1.0), (0.0, 1.0))
            if theta != 1:
                notes.append("published ODE is stated with theta=1; this part has theta=%s" % theta)
    elif fam == "B":
        weight = Y_WEIGHT["B"]
        if label == "a":
            shape, box = az.PowerTime(al), Box((-1.0, 1.0), (al + 0.3, al + 1.3))
        elif label == "b":
            _require(al != 1, "alpha != 1")
            shape, box = az.Exponential(1 / (1 - al), 1 / (1 - al)), Box((-1.0, 1.0), (0.0, 1.0))
        else:
            shape, box = az.Stationary(), Box((-1.0, 1.0), (0.0, 1.0))
    else:
        if case.delta is None:
            raise ValueError("Case C recipes need delta")
        if fam == "C12":
            d = case.delta
            weight = Y_WEIGHT[(fam, label)]
        else:
            d = case.header_delta
            weight = Y_WEIGHT[fam]
            notes.append(f"ODE delta = +-k = {d} (table delta {case.delta})")
        exact["delta"] = d
        aux["delta"] = d
        if label == "a":
            _require(al != 1, "alpha != 1")
            if fam == "C12":
                aux["omega"] = (al - 1) * (1 + 2 * float(d))
                aux["lambda"] = 1 + float(d) * (1 - al)
                shape = az.Exponential(1 / (float(d) * (al - 1)), 1 / (1 - al))
            else:
                nu = 2 * d - 1
                aux["nu"] = nu
                exact["nu"] = nu
                aux["mu"] = al / (al - 1)
                aux["omega"] = 1 + 2 / ((1 - al) * float(nu))
                shape = az.Exponential(2 / (float(nu) * (al - 1)), 1 / (1 - al))
            box = Box((0.1, 1.0), (0.0, 1.0))
        elif label == "b":
            a = 2 * (1 + d) if fam == "C12" else 1 + 2 * d
            shape = az.Source(float(a), 1.0 / float(a))
            box = Box((0.1, 1.0), _time_box(float(a)))
        else:
            shape, box = az.Stationary(), Box((0.1, 1.0), (0.0, 1.0))
        if fam == "C34":
            aux["rho"] = 1 - 2 * d
            exact["rho"] = 1 - 2 * d

    ode = parse(ODE_SOURCE[(fam, label)])
    ode = substitute(ode, {k: num(v) for k, v in exact.items()})
    for k, v in params.items():
        e = _exact(v)
        if e is not None:
            ode = substitute(ode, {k: num(e)})
    anchor = {
        "A": "reduced ODEs, Case A",
        "B": "reduced ODEs, Case B",
        "C12": "reduced ODEs, Case C (i) & (ii)",
        "C34": "reduced ODEs, Case C (iii) & (iv)",
    }[fam] + f", representative ({label})"
    return ReductionRecipe(
        case=case,
        label=label,
        params=params,
        theta=theta,
        aux=aux,
        shape=shape,
        ode=ode,
        field=_field_for(case, label, params),
        box=box,
        y_weight=weight,
        anchor=anchor,
        notes=tuple(notes),
    )


def catalog_json(recipes) -> str:
    return json.dumps([r.to_dict() for r in recipes], indent=2, sort_keys=True)
