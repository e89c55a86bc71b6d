"""Closed-form invariant ansatz shapes u = Phi(x, t) * y(zeta(x, t)).

Each shape returns Phi, zeta and their first and second derivatives from
hand-written formulas (no symbolic trees: arctan and fractional powers of
differences stay out of the CAS).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AnsatzValues:
    phi: np.ndarray
    phi_x: np.ndarray
    phi_t: np.ndarray
    phi_xx: np.ndarray
    zeta: np.ndarray
    zeta_x: np.ndarray
    zeta_t: np.ndarray
    zeta_xx: np.ndarray


def _arr(*vals):
    return [np.asarray(v, dtype=float) for v in vals]


@dataclass(frozen=True)
class Stationary:
    """Phi = 1, zeta = x."""

    def __call__(self, x, t) -> AnsatzValues:
        x, t = np.broadcast_arrays(*_arr(x, t))
        one, zero = np.ones_like(x), np.zeros_like(x)
        return AnsatzValues(one, zero, zero, zero, x.copy(), one, zero, zero)


@dataclass(frozen=True)
class Exponential:
    """Phi = exp(a t), zeta = x exp(b t)."""

    a: float
    b: float

    def __call__(self, x, t) -> AnsatzValues:
        x, t = np.broadcast_arrays(*_arr(x, t))
        phi = np.exp(self.a * t)
        eb = np.exp(self.b * t)
        zero = np.zeros_like(x)
        return AnsatzValues(phi, zero, self.a * phi, zero, x * eb, eb, self.b * x * eb, zero)


@dataclass(frozen=True)
class Source:
    """Phi = exp(t) (exp(a t) - 1)^(-b), zeta = x Phi; needs a t > 0."""

    a: float
    b: float

    def __call__(self, x, t) -> AnsatzValues:
        x, t = np.broadcast_arrays(*_arr(x, t))
        g = np.expm1(self.a * t)
        if np.any(g <= 0):
            raise ValueError("source ansatz needs a*t > 0")
        phi = np.exp(t) * g ** (-self.b)
        phi_t = phi * (1.0 - self.a * self.b * np.exp(self.a * t) / g)
        zero = np.zeros_like(x)
        return AnsatzValues(phi, zero, phi_t, zero, x * phi, phi, x * phi_t, zero)


@dataclass(frozen=True)
class Elliptic:
    """Phi = e^(3t/2) (1 + s^2)^(-3/2), zeta = sqrt(beta) t / gamma + arctan(s), s = e^t x / sqrt(beta)."""

    beta: float
    gamma: float

    def __call__(self, x, t) -> AnsatzValues:
        x, t = np.broadcast_arrays(*_arr(x, t))
        sb = np.sqrt(self.beta)
        s = np.exp(t) * x / sb
        s_x = np.exp(t) / sb
        q = 1.0 + s * s
        e = np.exp(1.5 * t)
        phi = e * q**-1.5
        phi_x = -3.0 * e * s * s_x * q**-2.5
        phi_xx = -3.0 * e * s_x**2 * (q**-2.5 - 5.0 * s * s * q**-3.5)
        phi_t = 1.5 * phi - 3.0 * e * s * s * q**-2.5
        zeta = sb * t / self.gamma + np.arctan(s)
        zeta_x = s_x / q
        zeta_xx = -2.0 * s * s_x**2 / q**2
        zeta_t = sb / self.gamma + s / q
        return AnsatzValues(phi, phi_x, phi_t, phi_xx, zeta, zeta_x, zeta_t, zeta_xx)


@dataclass(frozen=True)
class Hyperbolic:
    """Phi = 8 alpha^3 omega^3 e^(3(1-omega)t/2) / w^3, zeta = (2 alpha / w - 1/omega) e^(-omega t),
    with w = 2 e^t x + alpha (1 + omega)."""

    alpha: float
    omega: float

    def __call__(self, x, t) -> AnsatzValues:
        x, t = np.broadcast_arrays(*_arr(x, t))
        al, om = self.alpha, self.omega
        w = 2.0 * np.exp(t) * x + al * (1.0 + om)
        w_x = 2.0 * np.exp(t)
        w_t = 2.0 * np.exp(t) * x
        phi = 8.0 * al**3 * om**3 * np.exp(1.5 * (1.0 - om) * t) / w**3
        phi_x = -3.0 * phi * w_x / w
        phi_xx = 12.0 * phi * w_x**2 / w**2
        phi_t = phi * (1.5 * (1.0 - om) - 3.0 * w_t / w)
        em = np.exp(-om * t)
        zeta = (2.0 * al / w - 1.0 / om) * em
        zeta_x = -2.0 * al * w_x / w**2 * em
        zeta_xx = 4.0 * al * w_x**2 / w**3 * em
        zeta_t = -2.0 * al * w_t / w**2 * em - om * zeta
        return AnsatzValues(phi, phi_x, phi_t, phi_xx, zeta, zeta_x, zeta_t, zeta_xx)


@dataclass(frozen=True)
class PowerTime:
    """Phi = e^t (t - alpha)^(alpha + 1/2), zeta = e^t (t - alpha)^alpha x; needs t > alpha."""

    alpha: float

    def __call__(self, x, t) -> AnsatzValues:
        x, t = np.broadcast_arrays(*_arr(x, t))
        al = self.alpha
        d = t - al
        if np.any(d <= 0):
            raise ValueError("power-time ansatz needs t > alpha")
        phi = np.exp(t) * d ** (al + 0.5)
        phi_t = phi * (1.0 + (al + 0.5) / d)
        h = np.exp(t) * d**al
        h_t = h * (1.0 + al / d)
        zero = np.zeros_like(x)
        return AnsatzValues(phi, zero, phi_t, zero, x * h, h, x * h_t, zero)
