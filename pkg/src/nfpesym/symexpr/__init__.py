"""Small exact computer-algebra core used by every symbolic module."""

from .calculus import depends_on, differentiate
from .expr import (
    ONE,
    ZERO,
    E,
    Expr,
    Fn,
    Jet,
    Num,
    OrderOverflowError,
    Sym,
    T,
    U,
    X,
    add,
    as_expr,
    div,
    exp,
    jet,
    mul,
    neg,
    num,
    power,
    sub,
    substitute,
    sym,
)
from .numeric import EvaluationError, Equivalence, compile_numeric, equivalent, evaluate, free_names
from .parse import ParseError, parse
from .printing import to_string

simplify = as_expr  # trees are canonical on construction

__all__ = [
    "ONE", "ZERO", "E", "Expr", "Fn", "Jet", "Num", "OrderOverflowError", "Sym", "T", "U", "X",
    "add", "as_expr", "div", "exp", "jet", "mul", "neg", "num", "power", "sub", "substitute", "sym",
    "depends_on", "differentiate", "EvaluationError", "Equivalence", "compile_numeric",
    "equivalent", "evaluate", "free_names", "ParseError", "parse", "to_string", "simplify",
]
