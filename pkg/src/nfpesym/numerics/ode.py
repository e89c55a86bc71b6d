"""Integration of reduced second-order ODEs y'' = G(zeta, y, y')."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from ..symexpr import differentiate
from ..reduction.recipes import D2Y, ReductionRecipe
from ..reduction.verify import ode_function


class OdeIntegrationError(RuntimeError):
    """The integrator failed (for instance the step size underflowed)."""


class SpanError(ValueError):
    """Evaluation outside the integrated interval."""


@dataclass(frozen=True)
class OdeProblem:
    """y'' = G(zeta, y, y') with the y''-coefficient monitored.

    ``coeff`` returns the coefficient of y'' in the implicit form of the ODE;
    integration stops when it becomes smaller than ``coeff_tol`` in modulus.
    """

    G: Callable[[float, float, float], float]
    zeta0: float
    y0: float
    dy0: float
    zeta_end: float
    coeff: Optional[Callable[[float, float, float], float]] = None
    rtol: float = 1e-9
    atol: float = 1e-12
    coeff_tol: float = 1e-12
    y_floor: float = 0.0
    max_step: float = np.inf

    @classmethod
    def from_recipe(
        cls,
        rec: ReductionRecipe,
        omega: float,
        zeta0: float,
        y0: float,
        dy0: float,
        zeta_end: float,
        **kw,
    ) -> "OdeProblem":
        """Solve the recipe's ODE (linear in y'') for y''."""
        if not differentiate(differentiate(rec.ode, D2Y), D2Y).is_zero:
            raise ValueError("the ODE is not linear in y''")
        E = ode_function(rec, omega)

        def coeff(z, y, dy):
            return E(z, y, dy, 1.0) - E(z, y, dy, 0.0)

        def G(z, y, dy):
            return -E(z, y, dy, 0.0) / coeff(z, y, dy)

        kw.setdefault("y_floor", 1e-4 * abs(y0))
        # short steps keep the Hermite interpolant smooth enough for finite differences
        kw.setdefault("max_step", abs(zeta_end - zeta0) / 1000)
        return cls(G, zeta0, y0, dy0, zeta_end, coeff, **kw)


@dataclass(frozen=True)
class OdeSolution:
    """Samples of y and y' plus a cubic Hermite interpolant through them."""

    zeta: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    reason: str
    problem: OdeProblem

    @property
    def span(self) -> tuple[float, float]:
        return float(min(self.zeta[0], self.zeta[-1])), float(max(self.zeta[0], self.zeta[-1]))

    @property
    def completed(self) -> bool:
        return self.reason == "completed"

    @cached_property
    def _spline(self) -> CubicHermiteSpline:
        order = np.argsort(self.zeta)
        return CubicHermiteSpline(self.zeta[order], self.y[order], self.dy[order])

    def _check(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        lo, hi = self.span
        pad = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(z < lo - pad) or np.any(z > hi + pad):
            raise SpanError(f"zeta outside the integrated span [{lo:g}, {hi:g}]")
        return z

    def __call__(self, z) -> np.ndarray:
        return self._spline(self._check(z))

    def derivative(self, z, order: int = 1) -> np.ndarray:
        z = self._check(z)
        if order == 1:
            return self._spline(z, 1)
        if order == 2:
            y, dy = self._spline(z), self._spline(z, 1)
            G = np.vectorize(self.problem.G)
            return G(z, y, dy)
        raise ValueError("order must be 1 or 2")


def integrate_ode(p: OdeProblem, max_points: int = 100000) -> OdeSolution:
    """Dormand-Prince RK45 with event stops on y <= floor and a vanishing y'' coefficient."""

    def rhs(z, s):
        return [s[1], p.G(z, s[0], s[1])]

    def y_event(z, s):
        return s[0] - p.y_floor

    y_event.terminal = True
    events = [y_event]
    if p.coeff is not None:

        def coeff_event(z, s):
            # signed, so a crossing registers as a sign change; tiny values count as zero
            c = p.coeff(z, s[0], s[1])
            return 0.0 if abs(c) < p.coeff_tol else c

        coeff_event.terminal = True
        events.append(coeff_event)

    if p.y0 <= p.y_floor:
        raise ValueError("initial value must be positive")
    with np.errstate(all="ignore"):
        sol = solve_ivp(
            rhs,
            (p.zeta0, p.zeta_end),
            [p.y0, p.dy0],
            method="RK45",
            rtol=p.rtol,
            atol=p.atol,
            events=events,
            max_step=p.max_step,
        )
    if sol.status == -1:
        # a profile collapsing to zero with unbounded slope (degenerate
        # diffusion) stalls the step size before crossing any floor
        if sol.y[0, -1] < 1e-3 * np.max(sol.y[0]) and abs(sol.y[1, -1]) > 1e3 * max(1.0, abs(p.dy0)):
            reason = "y <= 0 event"
        else:
            raise OdeIntegrationError(sol.message)
    elif sol.status == 1:
        reason = "y <= 0 event" if len(sol.t_events[0]) else "y'' coefficient vanished"
    else:
        reason = "completed"
    z, y, dy = sol.t, sol.y[0], sol.y[1]
    if len(z) > max_points:
        raise OdeIntegrationError("too many steps")
    return OdeSolution(np.asarray(z), np.asarray(y), np.asarray(dy), reason, p)


def integrate_two_sided(p: OdeProblem, zeta_lo: float, zeta_hi: float) -> OdeSolution:
    """Integrate from zeta0 towards both ends and merge the samples."""
    if not zeta_lo <= p.zeta0 <= zeta_hi:
        raise ValueError("zeta0 must lie inside [zeta_lo, zeta_hi]")
    parts = []
    reasons = []
    for end in (zeta_lo, zeta_hi):
        if end == p.zeta0:
            continue
        s = integrate_ode(replace(p, zeta_end=end))
        parts.append(s)
        reasons.append(s.reason)
    if not parts:
        raise ValueError("empty interval")
    z = np.concatenate([q.zeta for q in parts])
    y = np.concatenate([q.y for q in parts])
    dy = np.concatenate([q.dy for q in parts])
    z, idx = np.unique(z, return_index=True)
    reason = next((r for r in reasons if r != "completed"), "completed")
    return OdeSolution(z, y[idx], dy[idx], reason, p)
