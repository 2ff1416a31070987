"""Exact solver for affine fixpoint systems V = A*V + B.

A is a square matrix of rationals; B is a vector whose entries only need
+, - and multiplication by a Fraction, so the same elimination serves both
plain rational right-hand sides and LinearTerm ones.  Gaussian elimination
runs on (I - A) with the first nonzero pivot in row order; exact arithmetic
makes numerical pivoting pointless, and a zero pivot column is exactly a
singular system.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, TypeVar

V = TypeVar("V")  # Fraction, LinearTerm, or anything with +, - and Fraction*


class SingularSystem(ArithmeticError):
    """(I - A) is not invertible; the model has no unique value vector."""


def solve_affine_fixpoint(a: Sequence[Sequence[Fraction]], b: Sequence[V]) -> list[V]:
    """Return the unique V with V = A*V + B, or raise SingularSystem."""
    n = len(b)
    if any(len(row) != n for row in a) or len(a) != n:
        raise ValueError("matrix/vector dimensions do not match")
    # build I - A and a mutable copy of the right-hand side
    m = [[(Fraction(1) if i == j else Fraction(0)) - a[i][j] for j in range(n)]
         for i in range(n)]
    rhs = list(b)

    for col in range(n):
        for piv in range(col, n):
            if m[piv][col] != 0:
                break
        else:
            raise SingularSystem(f"zero pivot column {col}")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for row in range(col + 1, n):
            factor = m[row][col] / m[col][col]
            if factor == 0:
                continue
            for j in range(col, n):
                m[row][j] -= factor * m[col][j]
            rhs[row] = rhs[row] - rhs[col] * factor

    out: list[V] = [None] * n  # type: ignore[list-item]
    for row in range(n - 1, -1, -1):
        acc = rhs[row]
        for j in range(row + 1, n):
            acc = acc - out[j] * m[row][j]
        out[row] = acc * (Fraction(1) / m[row][row])
    return out
