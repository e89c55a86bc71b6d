"""Method-of-lines evolution of u_t = d/dx [x u + Omega d/dx Lambda(u)] with no-flux walls.

Cells of width h carry averages; fluxes live on faces and vanish on the two
walls, so the cell sum of u is conserved up to round-off. Time stepping is
classical RK4 with dt <= 0.4 h^2 / (Omega max |Lambda'(u)|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..family import PdeInstance
from .grid import GridField

CFL = 0.4
MASS_TOL = 1e-6


class IllPosedError(ValueError):
    """Omega * Lambda'(u) < 0: the equation is a backward diffusion there."""


class PositivityError(RuntimeError):
    def __init__(self, time: float):
        super().__init__(f"positivity lost at t = {time:.6g}")
        self.time = time


class CflError(ValueError):
    """A prescribed time step exceeds the explicit stability bound."""


class MassDriftError(RuntimeError):
    pass


@dataclass(frozen=True)
class CellGrid:
    """N uniform cells on [a, b]."""

    a: float
    b: float
    n: int

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n) + 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        return self.a + np.arange(1, self.n) * self.h  # interior faces only


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def flux_divergence(u: np.ndarray, grid: CellGrid, pde: PdeInstance) -> np.ndarray:
    """Drift flux x*u from a limited upwind reconstruction (transport speed is -x),
    diffusive flux from the central difference of Lambda."""
    h = grid.h
    lam = pde.lam_numeric(u)
    slope = np.zeros_like(u)
    slope[1:-1] = _minmod(u[1:-1] - u[:-2], u[2:] - u[1:-1])
    xf = grid.faces
    u_face = np.where(xf > 0, u[1:] - 0.5 * slope[1:], u[:-1] + 0.5 * slope[:-1])
    F = np.zeros(grid.n + 1)
    F[1:-1] = xf * u_face + pde.omega * (lam[1:] - lam[:-1]) / h
    return (F[1:] - F[:-1]) / h


def stable_dt(u: np.ndarray, grid: CellGrid, pde: PdeInstance) -> float:
    d = pde.omega * float(np.max(np.abs(pde.dlam_numeric(u))))
    return math.inf if d == 0 else CFL * grid.h**2 / d


def _check_well_posed(u: np.ndarray, pde: PdeInstance) -> None:
    if np.any(pde.omega * pde.dlam_numeric(u) < 0):
        raise IllPosedError("Omega * Lambda'(u) < 0: backward diffusion, the initial value problem is ill-posed")


def _rk4(u, dt, grid, pde):
    k1 = flux_divergence(u, grid, pde)
    k2 = flux_divergence(u + 0.5 * dt * k1, grid, pde)
    k3 = flux_divergence(u + 0.5 * dt * k2, grid, pde)
    k4 = flux_divergence(u + dt * k3, grid, pde)
    return u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve_pde(
    initial: np.ndarray,
    pde: PdeInstance,
    t_span: tuple[float, float],
    grid: CellGrid,
    n_out: int = 11,
    dt: Optional[float] = None,
) -> GridField:
    """Evolve cell averages ``initial`` and sample n_out uniform time levels.

    With ``dt`` given every step uses exactly that size, so the output
    spacing must be a whole number of steps; otherwise dt adapts to the
    stability bound.
    """
    u = np.asarray(initial, dtype=float).copy()
    if u.shape != (grid.n,):
        raise ValueError("initial must hold one value per cell")
    if not np.all(u > 0):
        raise ValueError("initial profile must be strictly positive")
    _check_well_posed(u, pde)
    t0, t1 = map(float, t_span)
    times = np.linspace(t0, t1, n_out)
    out = [u.copy()]
    t = t0
    if dt is not None:
        steps_per = (times[1] - times[0]) / dt if n_out > 1 else 0.0
        if n_out > 1 and abs(steps_per - round(steps_per)) > 1e-9 * max(1.0, steps_per):
            raise ValueError("dt must divide the output spacing")
    for target in times[1:]:
        if dt is not None:
            for _ in range(int(round((target - t) / dt))):
                if dt > stable_dt(u, grid, pde) * (1 + 1e-12):
                    raise CflError(f"dt = {dt:g} exceeds the stability bound {stable_dt(u, grid, pde):g}")
                u = _rk4(u, dt, grid, pde)
                t += dt
                if not np.all(u > 0):
                    raise PositivityError(t)
            t = target
        else:
            eps = 1e-14 * max(1.0, abs(target))
            while target - t > eps:
                step = min(stable_dt(u, grid, pde), target - t)
                u = _rk4(u, step, grid, pde)
                t += step
                if not np.all(u > 0):
                    raise PositivityError(t)
            t = target
        _check_well_posed(u, pde)
        out.append(u.copy())
    field = GridField(grid.centers, times, np.array(out), weights=np.full(grid.n, grid.h))
    m = field.mass()
    drift = float(np.max(np.abs(m - m[0])) / abs(m[0]))
    if drift > MASS_TOL:
        raise MassDriftError(f"relative mass drift {drift:.3e}")
    return field


def cell_averages(f, grid: CellGrid, order: int = 4) -> np.ndarray:
    """Cell averages of a function by Gauss-Legendre quadrature on each cell."""
    nodes, w = np.polynomial.legendre.leggauss(order)
    c = grid.centers
    vals = sum(wi * f(c[:, None] + 0.5 * grid.h * ni) for ni, wi in zip(nodes, w))
    return np.asarray(vals, dtype=float).reshape(grid.n) / 2.0
