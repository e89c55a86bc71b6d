"""Lie algebra toolkit over a generator basis."""

from .algebra import (
    AdjointMatrix,
    AlgebraElement,
    NotInSpanError,
    StructureConstants,
    adjoint,
    adjoint_table_numeric,
    bracket,
    expand_in_basis,
    numeric_bracket,
    structure_constants,
)

__all__ = [
    "AdjointMatrix",
    "AlgebraElement",
    "NotInSpanError",
    "StructureConstants",
    "adjoint",
    "adjoint_table_numeric",
    "bracket",
    "expand_in_basis",
    "numeric_bracket",
    "structure_constants",
]
