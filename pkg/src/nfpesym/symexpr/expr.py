"""Immutable expression trees in canonical form.

Every public constructor (``add``, ``mul``, ``power``, ``exp``) returns a
canonical tree: a sum of products whose factors are merged by base, sorted
by a fixed total order, with rational constants folded. Two expressions that
canonicalize to the same tree compare equal and hash equal.

Bases raised to non-integer exponents are assumed positive; this is what
licenses ``(a*b)^e -> a^e*b^e`` and ``(a^p)^q -> a^(p*q)`` for such bases.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "Expr",
    "Num",
    "Sym",
    "Jet",
    "Fn",
    "Pow",
    "Mul",
    "Add",
    "E",
    "ZERO",
    "ONE",
    "X",
    "T",
    "U",
    "num",
    "sym",
    "jet",
    "add",
    "mul",
    "power",
    "exp",
    "neg",
    "sub",
    "div",
    "as_expr",
    "COORDINATES",
]

Number = Union[int, Fraction]
ExprLike = Union["Expr", int, Fraction, str]

COORDINATES = ("x", "t")
MAX_JET_ORDER = 3
MAX_FN_ORDER = 2

# rank of each node kind in the factor order
_R_NUM, _R_COORD, _R_PARAM, _R_JET, _R_FN, _R_ADD, _R_MUL, _R_POW, _R_E = range(9)


class Expr:
    """Base class. Subclasses are immutable; use the module constructors."""

    __slots__ = ("_key", "_hash")

    def _init_key(self, key: tuple) -> None:
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    @property
    def key(self) -> tuple:
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                return isinstance(self, Num) and self.value == other
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Expr") -> bool:
        return self._key < other._key

    # arithmetic sugar
    def __add__(self, o):
        return add(self, as_expr(o))

    def __radd__(self, o):
        return add(as_expr(o), self)

    def __sub__(self, o):
        return sub(self, as_expr(o))

    def __rsub__(self, o):
        return sub(as_expr(o), self)

    def __mul__(self, o):
        return mul(self, as_expr(o))

    def __rmul__(self, o):
        return mul(as_expr(o), self)

    def __truediv__(self, o):
        return div(self, as_expr(o))

    def __rtruediv__(self, o):
        return div(as_expr(o), self)

    def __pow__(self, o):
        return power(self, as_expr(o))

    def __rpow__(self, o):
        return power(as_expr(o), self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    def __str__(self):
        from .printing import to_string

        return to_string(self)

    def __repr__(self):
        return f"Expr({self})"

    # structural helpers
    @property
    def is_zero(self) -> bool:
        return isinstance(self, Num) and self.value == 0

    @property
    def is_number(self) -> bool:
        return isinstance(self, Num)

    def atoms(self) -> frozenset:
        """Free atoms: symbols, jet variables and unknown-function atoms."""
        out: set = set()
        _collect_atoms(self, out)
        return frozenset(out)

    def has(self, atom: "Expr") -> bool:
        return atom in self.atoms()


def _collect_atoms(e: Expr, out: set) -> None:
    if isinstance(e, (Sym, Jet, Fn)):
        out.add(e)
    elif isinstance(e, Pow):
        _collect_atoms(e.base, out)
        _collect_atoms(e.exponent, out)
    elif isinstance(e, Mul):
        for b, x in e.factors:
            _collect_atoms(b, out)
            _collect_atoms(x, out)
    elif isinstance(e, Add):
        for t in e.terms:
            _collect_atoms(t, out)


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        object.__setattr__(self, "value", Fraction(value))
        self._init_key((_R_NUM, self.value))


class Sym(Expr):
    """A named scalar: a coordinate (x, t) or a parameter."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        if name in COORDINATES:
            self._init_key((_R_COORD, COORDINATES.index(name)))
        else:
            self._init_key((_R_PARAM, name))


class Jet(Expr):
    """Derivative of the dependent variable u; (0, 0) is u itself."""

    __slots__ = ("nx", "nt")

    def __init__(self, nx: int, nt: int):
        if nx < 0 or nt < 0:
            raise ValueError("negative jet index")
        if nx + nt > MAX_JET_ORDER:
            raise OrderOverflowError(f"jet order {nx + nt} exceeds {MAX_JET_ORDER}")
        object.__setattr__(self, "nx", nx)
        object.__setattr__(self, "nt", nt)
        # graded lex: u < u_x < u_t < u_xx < u_xt < u_tt < ...
        self._init_key((_R_JET, nx + nt, -nx))

    @property
    def order(self) -> int:
        return self.nx + self.nt

    @property
    def name(self) -> str:
        if self.order == 0:
            return "u"
        return "u_" + "x" * self.nx + "t" * self.nt


class Fn(Expr):
    """Derivative atom of an unknown function f(x, t, u), e.g. xi_xu."""

    __slots__ = ("fname", "ix", "it", "iu")

    def __init__(self, fname: str, ix: int = 0, it: int = 0, iu: int = 0):
        if ix + it + iu > MAX_FN_ORDER:
            raise OrderOverflowError(
                f"derivative of {fname} of order {ix + it + iu} exceeds {MAX_FN_ORDER}"
            )
        object.__setattr__(self, "fname", fname)
        object.__setattr__(self, "ix", ix)
        object.__setattr__(self, "it", it)
        object.__setattr__(self, "iu", iu)
        self._init_key((_R_FN, fname, ix + it + iu, -ix, -it))

    @property
    def order(self) -> int:
        return self.ix + self.it + self.iu

    @property
    def name(self) -> str:
        if self.order == 0:
            return self.fname
        return self.fname + "_" + "x" * self.ix + "t" * self.it + "u" * self.iu


class _EulerE(Expr):
    """The base of exponentials: exp(a) is stored as Pow(E, a)."""

    __slots__ = ()

    def __init__(self):
        self._init_key((_R_E,))


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: Expr):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)
        # a lone power sorts as a one-factor product
        self._init_key((_R_MUL, ((base._key, exponent._key),), Fraction(1)))


class Mul(Expr):
    """coeff * prod(base**exponent); factors sorted by base key."""

    __slots__ = ("coeff", "factors")

    def __init__(self, coeff: Fraction, factors: tuple):
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "factors", factors)
        self._init_key((_R_MUL, tuple((b._key, x._key) for b, x in factors), coeff))


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        object.__setattr__(self, "terms", terms)
        self._init_key((_R_ADD, tuple(t._key for t in terms)))


class OrderOverflowError(ValueError):
    """A jet or unknown-function derivative beyond the supported order."""


E = _EulerE()
ZERO = Num(0)
ONE = Num(1)
X = Sym("x")
T = Sym("t")
U = Jet(0, 0)

_NUM_CACHE: dict = {}


def num(v: Number) -> Num:
    v = Fraction(v)
    n = _NUM_CACHE.get(v)
    if n is None:
        n = Num(v)
        if len(_NUM_CACHE) < 4096:
            _NUM_CACHE[v] = n
    return n


def sym(name: str) -> Sym:
    return Sym(name)


def jet(nx: int = 0, nt: int = 0) -> Jet:
    return Jet(nx, nt)


def as_expr(v: ExprLike) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not an expression")
    if isinstance(v, (int, Fraction)):
        return num(v)
    if isinstance(v, str):
        from .parse import parse

        return parse(v)
    raise TypeError(f"cannot convert {type(v).__name__} to Expr (floats are not allowed)")


# ---------------------------------------------------------------------------
# term-level representation: (coeff, ((base, exponent), ...))

def _as_term(e: Expr):
    if isinstance(e, Num):
        return e.value, ()
    if isinstance(e, Mul):
        return e.coeff, e.factors
    if isinstance(e, Pow):
        return Fraction(1), ((e.base, e.exponent),)
    return Fraction(1), ((e, ONE),)


def _mono_key(mono: tuple) -> tuple:
    return tuple((b._key, x._key) for b, x in mono)


def _from_term(coeff: Fraction, mono: tuple) -> Expr:
    if coeff == 0:
        return ZERO
    if not mono:
        return num(coeff)
    if coeff == 1 and len(mono) == 1:
        b, x = mono[0]
        return b if x == ONE else Pow(b, x)
    return Mul(coeff, mono)


def add(*args: Expr) -> Expr:
    acc: dict = {}
    monos: dict = {}
    for a in args:
        if isinstance(a, Add):
            items = a.terms
        else:
            items = (a,)
        for t in items:
            c, mono = _as_term(t)
            if c == 0:
                continue
            k = _mono_key(mono)
            if k in acc:
                acc[k] += c
            else:
                acc[k] = c
                monos[k] = mono
    terms = [_from_term(c, monos[k]) for k, c in acc.items() if c != 0]
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=lambda e: e._key)
    return Add(tuple(terms))


def _merge_monomials(c: Fraction, parts: Iterable[tuple]):
    """Multiply factor lists; returns an Expr (may need redistribution)."""
    bases: dict = {}
    exps: dict = {}
    for mono in parts:
        for b, x in mono:
            k = b._key
            if k in exps:
                exps[k] = add(exps[k], x)
            else:
                bases[k] = b
                exps[k] = x
    out = []
    coeff = c
    pending = []
    for k in sorted(exps):
        b, x = bases[k], exps[k]
        if x.is_zero:
            continue
        if x == ONE:
            out.append((b, ONE))
            continue
        p = power(b, x) if not isinstance(b, (Sym, Jet, Fn, _EulerE)) else None
        if p is None:
            out.append((b, x))
        elif isinstance(p, Num):
            coeff *= p.value
        elif isinstance(p, Pow) and p.base == b:
            out.append((p.base, p.exponent))
        else:
            pending.append(p)
    if coeff == 0:
        return ZERO
    base = _from_term(coeff, tuple(out))
    if pending:
        return mul(base, *pending)
    return base


def mul(*args: Expr) -> Expr:
    coeff = Fraction(1)
    monos = []
    sums = []
    for a in args:
        if isinstance(a, Num):
            if a.value == 0:
                return ZERO
            coeff *= a.value
        elif isinstance(a, Add):
            sums.append(a)
        else:
            c, mono = _as_term(a)
            coeff *= c
            monos.append(mono)
    if not sums:
        return _merge_monomials(coeff, monos)
    # distribute products over sums
    partial = [(coeff, tuple(monos))]
    for s in sums:
        nxt = []
        for c0, ms in partial:
            for t in s.terms:
                c1, m1 = _as_term(t)
                nxt.append((c0 * c1, ms + (m1,)))
        partial = nxt
    return add(*[_merge_monomials(c, ms) for c, ms in partial])


def _int_value(e: Expr):
    if isinstance(e, Num) and e.value.denominator == 1:
        return int(e.value)
    return None


def _exact_root(v: Fraction, q: int):
    """Exact q-th root of a positive rational, or None."""

    def iroot(n: int):
        r = round(n ** (1.0 / q))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**q == n:
                return cand
        return None

    a, b = iroot(v.numerator), iroot(v.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def power(base: Expr, exponent: Expr) -> Expr:
    base = as_expr(base)
    exponent = as_expr(exponent)
    if exponent.is_zero:
        return ONE
    if exponent == ONE:
        return base
    n = _int_value(exponent)
    if isinstance(base, Num):
        v = base.value
        if v == 1:
            return ONE
        if v == 0:
            if isinstance(exponent, Num) and exponent.value > 0:
                return ZERO
            raise ZeroDivisionError("0 raised to a non-positive power")
        if n is not None:
            return num(v**n)
        if isinstance(exponent, Num) and v > 0:
            p = exponent.value
            whole = p.numerator // p.denominator
            frac = p - whole
            root = _exact_root(v, frac.denominator)
            if root is not None:
                return num(v**whole * root**frac.numerator)
            if whole != 0:
                return mul(num(v**whole), Pow(base, num(frac)))
        return Pow(base, exponent)
    if base is E:
        return Pow(E, exponent)
    if isinstance(base, Pow):
        inner_int = _int_value(base.exponent) is not None
        if base.base is E or n is not None or not inner_int:
            return power(base.base, mul(base.exponent, exponent))
        return Pow(base, exponent)
    if isinstance(base, Mul):
        if n is not None or base.coeff > 0:
            parts = [power(num(base.coeff), exponent)]
            for b, x in base.factors:
                parts.append(power(_from_term(Fraction(1), ((b, x),)), exponent))
            return mul(*parts)
        return Pow(base, exponent)
    if isinstance(base, Add):
        if n is not None and 0 < n <= 12:
            out = base
            for _ in range(n - 1):
                out = mul(out, base)
            return out
        # pull the leading rational out so that equal sums share one base
        c, _ = _as_term(base.terms[0])
        if c != 1 and (c > 0 or n is not None):
            inner = mul(num(1 / c), base)
            return mul(power(num(c), exponent), Pow(inner, exponent))
        return Pow(base, exponent)
    return Pow(base, exponent)


def exp(arg: ExprLike) -> Expr:
    return power(E, as_expr(arg))


def neg(e: Expr) -> Expr:
    return mul(num(-1), e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def div(a: Expr, b: Expr) -> Expr:
    b = as_expr(b)
    if isinstance(b, Num):
        if b.value == 0:
            raise ZeroDivisionError("division by zero")
        return mul(a, num(1 / b.value))
    return mul(a, power(b, num(-1)))


def rebuild(e: Expr, leaf) -> Expr:
    """Reconstruct ``e`` bottom-up, mapping atoms through ``leaf``."""
    if isinstance(e, (Sym, Jet, Fn)):
        return leaf(e)
    if isinstance(e, (Num, _EulerE)):
        return e
    if isinstance(e, Pow):
        return power(rebuild(e.base, leaf), rebuild(e.exponent, leaf))
    if isinstance(e, Mul):
        parts = [num(e.coeff)]
        for b, x in e.factors:
            parts.append(power(rebuild(b, leaf), rebuild(x, leaf)))
        return mul(*parts)
    if isinstance(e, Add):
        return add(*[rebuild(t, leaf) for t in e.terms])
    raise TypeError(type(e))


def substitute(e: Expr, bindings: Mapping) -> Expr:
    """Simultaneous replacement of atoms, followed by canonicalization."""
    table = {_atom_key(k): as_expr(v) for k, v in bindings.items()}
    if not table:
        return e
    return rebuild(e, lambda a: table.get(a, a))


def _atom_key(k) -> Expr:
    if isinstance(k, str):
        from .parse import parse_atom

        return parse_atom(k)
    if isinstance(k, (Sym, Jet, Fn)):
        return k
    raise TypeError(f"binding key must be a symbol, jet variable or name, not {k!r}")
