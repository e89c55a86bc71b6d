"""Random expression corpus shared by the symbolic tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

VARIABLES = ("x", "t", "u", "k")
EXPONENTS = ("2", "3", "-1", "1/2", "3/2", "-2/3", "k")


def random_text(rng: random.Random, depth: int = 3) -> str:
    """Infix text whose value is finite for all variables in [1/2, 2]."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.3:
            return str(rng.randint(1, 5)) if rng.random() < 0.7 else f"{rng.randint(1, 5)}/{rng.randint(2, 7)}"
        return rng.choice(VARIABLES)
    kind = rng.choice(("+", "-", "*", "/", "^", "exp"))
    if kind == "exp":
        return f"exp({random_text(rng, depth - 1)}/5)"
    if kind == "^":
        # positive base keeps fractional and symbolic powers real
        base = rng.choice(VARIABLES[:3])
        return f"({base}+{rng.randint(1, 3)})^({rng.choice(EXPONENTS)})"
    if kind == "/":
        return f"({random_text(rng, depth - 1)})/({rng.choice(VARIABLES)}+1)"
    return f"({random_text(rng, depth - 1)}){kind}({random_text(rng, depth - 1)})"


def corpus(n: int, seed: int = 7, depth: int = 3) -> list[str]:
    rng = random.Random(seed)
    return [random_text(rng, depth) for _ in range(n)]


expression_texts = st.builds(lambda s, d: random_text(random.Random(s), d), st.integers(0, 10**9), st.integers(0, 4))
