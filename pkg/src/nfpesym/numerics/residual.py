"""Discrete residual of u_t = (x u)_x + Omega Lambda(u)_xx on a GridField."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..family import PdeInstance
from .grid import GridField

SLOPE_BAND = 0.3


class NonPositiveError(ValueError):
    """u <= 0 somewhere while Lambda has non-integer exponents."""


def second_derivative(f: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Central second difference; second-order one-sided four-point stencils at the edges."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, -1)
    if f.shape[-1] < 4:
        raise ValueError("need at least 4 nodes")
    out = np.empty_like(f)
    out[..., 1:-1] = (f[..., 2:] - 2 * f[..., 1:-1] + f[..., :-2]) / h**2
    out[..., 0] = (2 * f[..., 0] - 5 * f[..., 1] + 4 * f[..., 2] - f[..., 3]) / h**2
    out[..., -1] = (2 * f[..., -1] - 5 * f[..., -2] + 4 * f[..., -3] - f[..., -4]) / h**2
    return np.moveaxis(out, -1, axis)


@dataclass(frozen=True)
class ResidualReport:
    sup: float
    l2: float
    dx: float
    dt: float
    slopes: tuple = ()
    band: float = SLOPE_BAND

    def slopes_within(self, target: float = 2.0) -> bool:
        return bool(self.slopes) and all(abs(s - target) <= self.band for s in self.slopes)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def residual_field(f: GridField, pde: PdeInstance) -> np.ndarray:
    if f.nx < 5 or f.nt < 5:
        raise ValueError("pde_residual needs at least 5 nodes in x and in t")
    if not pde.exponents_integral() and np.any(f.u <= 0):
        raise NonPositiveError("u must be positive where Lambda has non-integer exponents")
    ut = np.gradient(f.u, f.dt, axis=0, edge_order=2)
    drift = np.gradient(f.x[None, :] * f.u, f.dx, axis=1, edge_order=2)
    diff = second_derivative(pde.lam_numeric(f.u), f.dx, axis=1)
    return ut - drift - pde.omega * diff


def pde_residual(f: GridField, pde: PdeInstance) -> ResidualReport:
    r = residual_field(f, pde)
    l2 = math.sqrt(float(np.sum(r * r)) * f.dx * f.dt)
    return ResidualReport(float(np.max(np.abs(r))), l2, f.dx, f.dt)


def residual_convergence(
    builder: Callable[[int, int], GridField],
    pde: PdeInstance,
    levels: Sequence[tuple[int, int]],
) -> ResidualReport:
    """Residual on successively refined grids; slopes are log(sup ratio)/log(dx ratio)."""
    reports = [pde_residual(builder(nx, nt), pde) for nx, nt in levels]
    slopes = []
    for a, b in zip(reports, reports[1:]):
        slopes.append(math.log(a.sup / b.sup) / math.log(a.dx / b.dx))
    last = reports[-1]
    return ResidualReport(last.sup, last.l2, last.dx, last.dt, tuple(slopes))


def refinement_levels(nx0: int, nt: int, count: int = 3) -> list[tuple[int, int]]:
    """Halve dx ``count - 1`` times keeping the node set nested."""
    return [((nx0 - 1) * 2**i + 1, nt) for i in range(count)]


def measured_sup(f: GridField, pde: PdeInstance, interior: Optional[slice] = None) -> float:
    r = residual_field(f, pde)
    return float(np.max(np.abs(r if interior is None else r[:, interior])))
