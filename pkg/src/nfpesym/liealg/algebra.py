"""Brackets, structure constants and the adjoint representation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from ..jets import VectorField, linear_combination
from ..symexpr import (
    ONE,
    ZERO,
    Expr,
    Fn,
    Jet,
    Num,
    Sym,
    add,
    as_expr,
    div,
    equivalent,
    evaluate,
    mul,
    neg,
    num,
    substitute,
    to_string,
)
from ..symexpr.expr import Add, Mul, Pow, _EulerE


class NotInSpanError(ValueError):
    """A bracket is not a combination of the basis: the basis is not closed."""


def bracket(v: VectorField, w: VectorField) -> VectorField:
    """[v, w] with components v(w_c) - w(v_c)."""
    return VectorField(
        *[add(v.apply(wc), neg(w.apply(vc))) for vc, wc in zip(v.components, w.components)]
    )


_COORD_NAMES = {"x", "t"}


def _is_coordinate_factor(b: Expr, x: Expr) -> bool:
    if isinstance(b, _EulerE):
        return True
    for a in list(b.atoms()) + list(x.atoms()):
        if isinstance(a, (Jet, Fn)) or (isinstance(a, Sym) and a.name in _COORD_NAMES):
            return True
    return False


def split_coordinate_terms(e: Expr) -> dict:
    """Write e = sum_f c_f * f with f a product of coordinate factors and c_f coordinate-free."""
    out: dict = {}
    keys: dict = {}
    terms = e.terms if isinstance(e, Add) else (e,)
    for term in terms:
        if isinstance(term, Mul):
            coeff, factors = num(term.coeff), term.factors
        elif isinstance(term, Pow):
            coeff, factors = ONE, ((term.base, term.exponent),)
        elif isinstance(term, Num):
            coeff, factors = term, ()
        else:
            coeff, factors = ONE, ((term, ONE),)
        fpart, cpart = [ONE], [coeff]
        for b, x in factors:
            f = Pow(b, x) if x != ONE else b
            (fpart if _is_coordinate_factor(b, x) else cpart).append(f)
        f = mul(*fpart)
        out[f.key] = add(out.get(f.key, ZERO), mul(*cpart))
        keys[f.key] = f
    return {keys[k]: c for k, c in out.items() if not c.is_zero}


def _solve_exact(rows: list[list[Expr]], rhs: list[Expr], n: int) -> list[Expr]:
    """Gauss-Jordan elimination with expression entries; numeric pivots preferred."""
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(n):
        cand = [i for i in range(row, len(A)) if not A[i][col].is_zero]
        if not cand:
            continue
        numeric = [i for i in cand if isinstance(A[i][col], Num)]
        p = (numeric or cand)[0]
        A[row], A[p] = A[p], A[row]
        piv = A[row][col]
        A[row] = [div(v, piv) for v in A[row]]
        for i in range(len(A)):
            if i != row and not A[i][col].is_zero:
                f = A[i][col]
                A[i] = [add(a, neg(mul(f, b))) for a, b in zip(A[i], A[row])]
        pivots.append(col)
        row += 1
    for i in range(row, len(A)):
        if not equivalent(A[i][n], 0):
            raise NotInSpanError("inconsistent expansion")
    sol = [ZERO] * n
    for i, col in enumerate(pivots):
        sol[col] = A[i][n]
    return sol


def expand_in_basis(vf: VectorField, basis: Sequence[VectorField]) -> list[Expr]:
    """Exact coefficients c with vf = sum c_m basis[m]."""
    n = len(basis)
    eq_rows: list[list[Expr]] = []
    eq_rhs: list[Expr] = []
    for comp in range(3):
        target = split_coordinate_terms(vf.components[comp])
        parts = [split_coordinate_terms(b.components[comp]) for b in basis]
        funcs = {}
        for d in [target] + parts:
            for f in d:
                funcs[f.key] = f
        for key in sorted(funcs):
            f = funcs[key]
            eq_rows.append([p.get(f, ZERO) for p in parts])
            eq_rhs.append(target.get(f, ZERO))
    coeffs = _solve_exact(eq_rows, eq_rhs, n)
    check = linear_combination(coeffs, basis)
    for a, b in zip(check.components, vf.components):
        if not equivalent(a, b):
            raise NotInSpanError(f"bracket {vf} is not in the span of the basis")
    return coeffs


@dataclass(frozen=True)
class StructureConstants:
    """c[i][j][m] with [X_i, X_j] = sum_m c[i][j][m] X_m (0-based indices)."""

    n: int
    c: tuple

    def entry(self, i: int, j: int, m: int) -> Expr:
        return self.c[i][j][m]

    def bracket_coeffs(self, i: int, j: int) -> list[Expr]:
        return list(self.c[i][j])

    def free_symbols(self) -> set[str]:
        out = set()
        for i in range(self.n):
            for j in range(self.n):
                for e in self.c[i][j]:
                    out |= {a.name for a in e.atoms()}
        return out

    def bind(self, values: Mapping) -> "StructureConstants":
        vals = {k: as_expr(v) for k, v in values.items()}
        return StructureConstants(
            self.n,
            tuple(
                tuple(tuple(substitute(e, vals) for e in self.c[i][j]) for j in range(self.n))
                for i in range(self.n)
            ),
        )

    def numeric(self, values: Optional[Mapping] = None) -> np.ndarray:
        out = np.zeros((self.n, self.n, self.n))
        vals = dict(values or {})
        for i in range(self.n):
            for j in range(self.n):
                for m in range(self.n):
                    e = self.c[i][j][m]
                    if not e.is_zero:
                        out[i, j, m] = evaluate(e, vals)
        return out

    def is_antisymmetric(self) -> bool:
        return all(
            add(self.c[i][j][m], self.c[j][i][m]).is_zero
            for i in range(self.n)
            for j in range(self.n)
            for m in range(self.n)
        )

    def jacobi_defects(self) -> list[tuple]:
        """Index tuples (i, j, l, p) where the Jacobi sum is not exactly zero."""
        n, c = self.n, self.c
        bad = []
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    for p in range(n):
                        s = add(
                            *[
                                add(
                                    mul(c[i][j][m], c[m][l][p]),
                                    mul(c[j][l][m], c[m][i][p]),
                                    mul(c[l][i][m], c[m][j][p]),
                                )
                                for m in range(n)
                            ]
                        )
                        if not s.is_zero:
                            bad.append((i, j, l, p))
        return bad

    def to_json(self) -> str:
        doc = {
            "dimension": self.n,
            "brackets": {
                f"[X{i + 1},X{j + 1}]": combination_string(self.c[i][j])
                for i in range(self.n)
                for j in range(self.n)
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def text_table(self) -> str:
        names = [f"X{i + 1}" for i in range(self.n)]
        cells = [[combination_string(self.c[i][j]) for j in range(self.n)] for i in range(self.n)]
        return aligned_table("[Xi,Xj]", names, cells)


def combination_string(coeffs: Sequence[Expr]) -> str:
    parts = []
    for m, c in enumerate(coeffs):
        if c.is_zero:
            continue
        s = to_string(c)
        if c == ONE:
            parts.append(f"X{m + 1}")
        elif c == num(-1):
            parts.append(f"-X{m + 1}")
        elif isinstance(c, Add):
            parts.append(f"({s})*X{m + 1}")
        else:
            parts.append(f"{s}*X{m + 1}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


def aligned_table(corner: str, names: Sequence[str], cells: Sequence[Sequence[str]]) -> str:
    header = [corner] + list(names)
    rows = [[names[i]] + list(cells[i]) for i in range(len(names))]
    widths = [max(len(r[k]) for r in [header] + rows) for k in range(len(header))]
    fmt = lambda r: " | ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()
    line = "-+-".join("-" * w for w in widths)
    return "\n".join([fmt(header), line] + [fmt(r) for r in rows])


def structure_constants(basis: Sequence[VectorField]) -> StructureConstants:
    """Expand every pairwise bracket of the basis exactly."""
    if hasattr(basis, "basis"):
        basis = basis.basis
    n = len(basis)
    c = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # every ordered pair is expanded, so antisymmetry is a real check
            c[i][j] = expand_in_basis(bracket(basis[i], basis[j]), basis)
    return StructureConstants(n, tuple(tuple(tuple(row) for row in plane) for plane in c))


# -- adjoint representation ---------------------------------------------------


def ad_matrix(sc_numeric: np.ndarray, i: int) -> np.ndarray:
    """(ad_i)[m][j] = c[i][j][m]."""
    return sc_numeric[i].T.copy()


def _nilpotent_series(A: np.ndarray) -> Optional[np.ndarray]:
    n = A.shape[0]
    term = np.eye(n)
    out = np.eye(n)
    for k in range(1, n + 1):
        term = term @ A / k
        if not np.any(term):
            return out
        out = out + term
    return out if not np.any(term @ A) else None


@dataclass(frozen=True)
class AdjointMatrix:
    """M with column j = coefficients of Ad(exp(eps X_i)) X_j."""

    i: int
    eps: float
    M: np.ndarray

    def apply(self, coeffs) -> np.ndarray:
        return self.M @ np.asarray(coeffs, dtype=float)

    def column(self, j: int) -> np.ndarray:
        return self.M[:, j]


def adjoint(sc: StructureConstants | np.ndarray, i: int, eps: float, values: Optional[Mapping] = None) -> AdjointMatrix:
    """Ad(exp(eps X_i)) = exp(-eps ad_i); the series is summed exactly when ad_i is nilpotent."""
    cn = sc if isinstance(sc, np.ndarray) else sc.numeric(values)
    A = -eps * ad_matrix(cn, i)
    M = _nilpotent_series(A) if _exactly_nilpotent(ad_matrix(cn, i)) else None
    if M is None:
        M = expm(A)
    return AdjointMatrix(i, float(eps), M)


def _exactly_nilpotent(ad: np.ndarray) -> bool:
    n = ad.shape[0]
    P = np.eye(n)
    for _ in range(n):
        P = P @ ad
    return not np.any(P)


def adjoint_table_numeric(sc: StructureConstants, eps: float, values: Optional[Mapping] = None) -> np.ndarray:
    """T[i, j, :] = coefficients of Ad(exp(eps X_i)) X_j."""
    cn = sc.numeric(values)
    n = sc.n
    out = np.zeros((n, n, n))
    for i in range(n):
        M = adjoint(cn, i, eps).M
        out[i] = M.T
    return out


def numeric_bracket(cn: np.ndarray, a, b) -> np.ndarray:
    """Bracket of two algebra elements given as coefficient vectors."""
    return np.einsum("i,j,ijm->m", np.asarray(a, float), np.asarray(b, float), cn)


@dataclass(frozen=True)
class AlgebraElement:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(v) for v in self.coeffs))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coeffs)

    def __str__(self):
        parts = []
        for m, c in enumerate(self.coeffs):
            if c != 0:
                parts.append(f"{c:g}*X{m + 1}")
        return " + ".join(parts) or "0"
