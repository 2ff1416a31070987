"""Shared test utilities.

Independent oracles (big-integer term evaluation, Cramer-rule solving) are
deliberately written with different algorithms than the library so the two
routes only agree if both are right.  The random generators produce models
that are valid by construction: PMDP supports always contain a higher-index
state, so every policy drains into the absorbing one, and matrices get a
spanning permutation cycle before extra edges, so they are strongly
connected.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from polypol import LinearTerm, ZERO
from polypol import maxplus, mdp


# --- independent oracles ------------------------------------------------------

def eval_term_int(term: LinearTerm, point) -> tuple[int, int]:
    """Evaluate with plain integer arithmetic; returns a reduced (num, den)."""
    num, den = term.const.numerator, term.const.denominator
    for name, c in term.coeffs:
        v = point[name]
        cn = c.numerator * v.numerator
        cd = c.denominator * v.denominator
        num, den = num * cd + cn * den, den * cd
    g = math.gcd(num, den)
    return num // g, den // g


def det(m: list[list[Fraction]]) -> Fraction:
    if len(m) == 1:
        return m[0][0]
    total = Fraction(0)
    for j, pivot in enumerate(m[0]):
        if pivot == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * pivot * det(minor)
    return total


def solve_cramer(a, b) -> list[Fraction]:
    """x with (I - a)x = b by cofactor determinants; keep n small."""
    n = len(a)
    m = [[(Fraction(1) if i == j else Fraction(0)) - a[i][j] for j in range(n)]
         for i in range(n)]
    d = det(m)
    assert d != 0
    columns = []
    for j in range(n):
        mj = [[b[i] if k == j else m[i][k] for k in range(n)] for i in range(n)]
        columns.append(det(mj) / d)
    return columns


# --- random values -------------------------------------------------------------

def rand_fraction(rng: random.Random, lo: int = -8, hi: int = 8,
                  den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_point(rng: random.Random, names) -> dict[str, Fraction]:
    return {name: rand_fraction(rng) for name in names}


# --- random models --------------------------------------------------------------

def random_pmdp(rng: random.Random, max_states: int = 4, max_actions: int = 2,
                parametric: bool = True) -> mdp.Pmdp:
    """A valid PMDP: every support contains a higher-index state, so no policy
    can avoid the absorbing one (which is always the last state)."""
    n = rng.randint(2, max_states)
    states = tuple(f"s{i}" for i in range(n))
    actions = tuple(f"a{j}" for j in range(max_actions)) + ("stay",)
    absorbing = n - 1
    moves = {(absorbing, max_actions): mdp.Move(ZERO, ((absorbing, Fraction(1)),))}
    params: list[str] = []
    for s in range(n - 1):
        for a in rng.sample(range(max_actions), rng.randint(1, max_actions)):
            above = rng.randint(s + 1, n - 1)
            pool = [t for t in range(n - 1) if t != above]
            targets = sorted({above, *rng.sample(pool, min(len(pool), rng.randint(0, 2)))})
            shares = [rng.randint(1, 5) for _ in targets]
            total = sum(shares)
            dist = tuple((t, Fraction(c, total)) for t, c in zip(targets, shares))
            if parametric:
                name = f"q{len(params)}"
                params.append(name)
                weight = LinearTerm.parameter(name)
                if rng.random() < 0.3:
                    weight = weight + LinearTerm.constant(rand_fraction(rng, 0, 3))
            else:
                weight = LinearTerm.constant(rand_fraction(rng, 0, 6))
            moves[(s, a)] = mdp.Move(weight, dist)
    return mdp.Pmdp(states, actions, tuple(params), absorbing, moves)


def random_sc_matrix(rng: random.Random, max_n: int = 4,
                     parametric: bool = True) -> maxplus.MaxPlusMatrix:
    """Strongly connected by construction: a permutation cycle through all
    states, plus each remaining edge with probability ~1/3."""
    n = rng.randint(2, max_n)
    order = list(range(n))
    rng.shuffle(order)
    present = {(order[k], order[(k + 1) % n]) for k in range(n)}
    for i in range(n):
        for j in range(n):
            if (i, j) not in present and rng.random() < 0.35:
                present.add((i, j))
    grid: list[list[LinearTerm | None]] = [[None] * n for _ in range(n)]
    params = []
    for i, j in sorted(present):
        if parametric:
            name = f"w{i}{j}"
            params.append(name)
            grid[i][j] = LinearTerm.parameter(name)
        else:
            grid[i][j] = LinearTerm.constant(rand_fraction(rng))
    return maxplus.MaxPlusMatrix(tuple(str(i + 1) for i in range(n)),
                                 tuple(params),
                                 tuple(tuple(row) for row in grid))


def matrix_of(rows) -> maxplus.MaxPlusMatrix:
    """Constant matrix from a list of lists; None marks a missing edge."""
    entries = tuple(
        tuple(None if w is None else LinearTerm.constant(Fraction(w))
              for w in row)
        for row in rows)
    return maxplus.MaxPlusMatrix(tuple(str(i + 1) for i in range(len(rows))),
                                 (), entries)


# --- constraint-region sampling ---------------------------------------------------

def sample_satisfying(rng: random.Random, constraint, pi0, count: int,
                      radius: Fraction = Fraction(2)):
    """Rejection sampling in a box around pi0, shrinking the box on misses.

    Falls back to copies of pi0 (always a member) if the region's interior
    is too thin to hit; the property being tested holds trivially there.
    """
    from polypol import satisfies

    names = sorted(pi0)
    out = []
    misses = 0
    r = radius
    while len(out) < count:
        if r < Fraction(1, 64):
            out.extend(dict(pi0) for _ in range(count - len(out)))
            break
        point = {name: pi0[name] + Fraction(rng.randint(-8, 8), 8) * r
                 for name in names}
        if satisfies(constraint, point):
            out.append(point)
            misses = 0
        else:
            misses += 1
            if misses >= 40:
                r = r / 2
                misses = 0
    return out
