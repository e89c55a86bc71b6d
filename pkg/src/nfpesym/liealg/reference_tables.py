"""Published commutator, adjoint and optimal-system tables, as oracle data.

Entries are strings in the expression grammar over the basis symbols
X1..Xn, the group parameter eps and (for Case C) delta.
"""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from ..symexpr import Sym, differentiate, evaluate, parse, substitute

BRACKETS = {
    "A": [
        ["0", "-X2", "-2/3*X3", "X4", "0"],
        ["X2", "0", "0", "2*(X1 + X5)", "0"],
        ["2/3*X3", "0", "0", "0", "-2/3*X3"],
        ["-X4", "-2*(X1 + X5)", "0", "0", "0"],
        ["0", "0", "2/3*X3", "0", "0"],
    ],
    "B": [
        ["0", "-X2", "0", "X3"],
        ["X2", "0", "0", "0"],
        ["0", "0", "0", "-X3"],
        ["-X3", "0", "X3", "0"],
    ],
    "C": [
        ["0", "-X2", "-2*(1 + delta)*X3", "0"],
        ["X2", "0", "0", "0"],
        ["2*(1 + delta)*X3", "0", "0", "-2*(1 + delta)*X3"],
        ["0", "0", "2*(1 + delta)*X3", "0"],
    ],
}

# entry (i, j) is Ad(exp(eps X_i)) X_j
ADJOINT = {
    "A": [
        ["X1", "exp(eps)*X2", "exp(2/3*eps)*X3", "exp(-eps)*X4", "X5"],
        ["X1 - eps*X2", "X2", "X3", "eps^2*X2 + X4 - 2*eps*(X1 + X5)", "X5"],
        ["X1 - 2*eps/3*X3", "X2", "X3", "X4", "X5 + 2*eps/3*X3"],
        ["X1 + eps*X4", "X2 + eps^2*X4 + 2*eps*(X1 + X5)", "X3", "X4", "X5"],
        ["X1", "X2", "exp(-2/3*eps)*X3", "X4", "X5"],
    ],
    "B": [
        ["X1", "exp(eps)*X2", "X3", "X4 - eps*X3"],
        ["X1 - eps*X2", "X2", "X3", "X4"],
        ["X1", "X2", "X3", "X4 + eps*X3"],
        ["X1 + (1 - exp(-eps))*X3", "X2", "exp(-eps)*X3", "X4"],
    ],
    "C": [
        ["X1", "exp(eps)*X2", "exp(2*(1 + delta)*eps)*X3", "X4"],
        ["X1 - eps*X2", "X2", "X3", "X4"],
        ["X1 - 2*(1 + delta)*eps*X3", "X2", "X3", "X4 + 2*(1 + delta)*eps*X3"],
        ["X1", "X2", "exp(-2*(1 + delta)*eps)*X3", "X4"],
    ],
}

# representatives with their free parameters
OPTIMAL_SYSTEM = {
    "A": {"a": "beta*X2 + X4 + gamma*X5", "b": "alpha*X1 + beta*X2 + X4", "c": "X1 + X3", "d": "X1"},
    "B": {"a": "alpha*X1 + X4", "b": "alpha*X1 + X3", "c": "X1"},
    "C": {"a": "alpha*X1 + X4", "b": "alpha*X1 + X3", "c": "X1"},
}

DIMENSION = {"A": 5, "B": 4, "C": 4}


def _coefficients(text: str, n: int, values: Mapping) -> list:
    e = parse(text)
    out = []
    for m in range(n):
        c = differentiate(e, Sym(f"X{m + 1}"))
        out.append(c if values is None else substitute(c, values))
    return out


def bracket_table(case: str, delta=None) -> list:
    """c[i][j][m] as exact expressions (delta substituted when given)."""
    n = DIMENSION[case]
    values = {"delta": delta} if delta is not None else {}
    return [[_coefficients(BRACKETS[case][i][j], n, values) for j in range(n)] for i in range(n)]


def adjoint_table(case: str, eps: float, delta: Optional[float] = None) -> np.ndarray:
    """T[i, j, :] = coefficients of the published Ad(exp(eps X_i)) X_j."""
    n = DIMENSION[case]
    env = {"eps": eps}
    if delta is not None:
        env["delta"] = delta
    out = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for m, c in enumerate(_coefficients(ADJOINT[case][i][j], n, None)):
                if not c.is_zero:
                    out[i, j, m] = evaluate(c, env)
    return out


def representative(case: str, label: str, params: Mapping[str, float]) -> np.ndarray:
    n = DIMENSION[case]
    coeffs = _coefficients(OPTIMAL_SYSTEM[case][label], n, None)
    return np.array([evaluate(c, params) if not c.is_zero else 0.0 for c in coeffs])


def representative_parameters(case: str, label: str) -> list[str]:
    e = parse(OPTIMAL_SYSTEM[case][label])
    return sorted(a.name for a in e.atoms() if not a.name.startswith("X"))
