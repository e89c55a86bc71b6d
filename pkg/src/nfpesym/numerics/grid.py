"""Uniform space-time grids of solution samples and their I/O."""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..reduction.ansatz import PowerTime, Source
from ..reduction.recipes import ReductionRecipe

MAGIC = b"NFPG"
# layout: MAGIC, uint32 n_x, uint32 n_t (little endian), then n_x x-nodes,
# n_t t-nodes and n_t*n_x values u[j][i] (time-major), all float64


@dataclass(frozen=True)
class GridField:
    """u[j, i] = u(x_i, t_j) on uniform nodes; each row is one time level."""

    x: np.ndarray
    t: np.ndarray
    u: np.ndarray
    weights: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        t = np.asarray(self.t, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if u.shape != (len(t), len(x)):
            raise ValueError(f"u has shape {u.shape}, expected {(len(t), len(x))}")
        for name, v in (("x", x), ("t", t)):
            if len(v) > 2 and not np.allclose(np.diff(v), v[1] - v[0], rtol=1e-9, atol=1e-12):
                raise ValueError(f"{name}-nodes are not uniform")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)

    @property
    def nx(self) -> int:
        return len(self.x)

    @property
    def nt(self) -> int:
        return len(self.t)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if self.nt > 1 else 0.0

    @property
    def positive(self) -> bool:
        return bool(np.all(self.u > 0))

    def mass(self) -> np.ndarray:
        """Integral of u over x per time level (trapezoid unless weights are given)."""
        if self.weights is not None:
            return self.u @ self.weights
        return np.trapezoid(self.u, self.x, axis=1)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "t", "u"])
        for j, tj in enumerate(self.t):
            for i, xi in enumerate(self.x):
                w.writerow([repr(float(xi)), repr(float(tj)), repr(float(self.u[j, i]))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "GridField":
        text = source if "\n" in str(source) else open(source, encoding="utf-8").read()
        rows = list(csv.DictReader(io.StringIO(text)))
        xs = sorted({float(r["x"]) for r in rows})
        ts = sorted({float(r["t"]) for r in rows})
        ix = {v: i for i, v in enumerate(xs)}
        it = {v: j for j, v in enumerate(ts)}
        u = np.full((len(ts), len(xs)), np.nan)
        for r in rows:
            u[it[float(r["t"])], ix[float(r["x"])]] = float(r["u"])
        if np.isnan(u).any():
            raise ValueError("CSV does not cover the full grid")
        return cls(np.array(xs), np.array(ts), u)

    def to_bytes(self) -> bytes:
        head = MAGIC + struct.pack("<II", self.nx, self.nt)
        body = np.concatenate([self.x, self.t, self.u.ravel()]).astype("<f8").tobytes()
        return head + body

    @classmethod
    def from_bytes(cls, data: bytes) -> "GridField":
        if data[:4] != MAGIC:
            raise ValueError("not a grid dump")
        nx, nt = struct.unpack("<II", data[4:12])
        vals = np.frombuffer(data[12:], dtype="<f8")
        if len(vals) != nx + nt + nx * nt:
            raise ValueError("truncated grid dump")
        return cls(vals[:nx].copy(), vals[nx : nx + nt].copy(), vals[nx + nt :].reshape(nt, nx).copy())


def uniform(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n)


def build_solution(rec: ReductionRecipe, y, x: np.ndarray, t: np.ndarray) -> GridField:
    """u(x_i, t_j) = Phi * y(zeta); ``y`` is any callable raising outside its span."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    # ansaetze singular at a finite time are only sampled on the box's side of it
    lo, hi = rec.box.t
    if isinstance(rec.shape, PowerTime) or (isinstance(rec.shape, Source) and lo > 0):
        if t.min() < lo:
            raise ValueError(f"t must be at least {lo:g} for this ansatz")
    elif isinstance(rec.shape, Source) and t.max() > hi:
        raise ValueError(f"t must be at most {hi:g} for this ansatz")
    X, T = np.meshgrid(x, t)
    a = rec.shape(X, T)
    return GridField(x, t, a.phi * y(a.zeta))
