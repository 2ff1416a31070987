"""Maximal circuit mean in max-plus algebra, direct and inverse.

A parametric weighted digraph is a square matrix whose entries are linear
terms or eps (minus infinity, stored as None).  A policy picks one outgoing
edge per state; its functional graph decomposes into classes, each with one
circuit.  Value determination assigns to every state the mean of its class
circuit (eta) and an offset (x) obtained by walking the policy graph
backwards from an anchor on the circuit.  Policy improvement follows the
classic two-phase rule (raise eta first, then x), and at the fixpoint eta is
the maximal circuit mean.

All "arbitrary" choices in the algorithms are pinned for reproducibility:
circuits are found by following the policy from the smallest remaining
index, the anchor is the smallest circuit state, back-propagation visits
predecessors in ascending order, and argmax ties pick the smallest target.
The parametric variants share the exact same control flow, so instantiating
their output commutes with instantiating the matrix.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional

from .params import (Constraint, ContradictionError, Inequality, Instantiation,
                     LinearTerm, ZERO, render_term, satisfies)

DEFAULT_CIRCUIT_CAP = 10

MaxPolicy = tuple[int, ...]


class InvalidMatrix(ValueError):
    """The matrix violates a structural invariant; see .violations."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class NotStronglyConnected(ValueError):
    """The inverse computation requires one strongly connected graph."""


class NonConvergence(RuntimeError):
    """Policy iteration exceeded the policy count; indicates a bug."""


class TooLarge(RuntimeError):
    """Circuit enumeration refused; the matrix exceeds the oracle cap."""


class Eigenmode(NamedTuple):
    eta: tuple[Fraction, ...]
    x: tuple[Fraction, ...]


class ParamEigenmode(NamedTuple):
    h: tuple[LinearTerm, ...]
    x: tuple[LinearTerm, ...]


@dataclass(frozen=True)
class MaxPlusMatrix:
    """Square matrix over linear terms, None standing for eps (no edge)."""

    states: tuple[str, ...]
    parameters: tuple[str, ...]
    entries: tuple[tuple[Optional[LinearTerm], ...], ...]

    @property
    def n(self) -> int:
        return len(self.states)

    def edges(self):
        """(i, j) pairs with an entry, in row-major order."""
        for i, row in enumerate(self.entries):
            for j, w in enumerate(row):
                if w is not None:
                    yield i, j

    def successors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, w in enumerate(self.entries[i]) if w is not None)

    @property
    def is_constant(self) -> bool:
        return all(w.is_constant for row in self.entries for w in row
                   if w is not None)


def validate(m: MaxPlusMatrix) -> list[str]:
    bad = []
    if any(len(row) != m.n for row in m.entries) or len(m.entries) != m.n:
        bad.append("matrix is not square")
        return bad
    for i in range(m.n):
        if not m.successors(i):
            bad.append(f"state {m.states[i]} has no outgoing edge")
    return bad


def _require_valid(m: MaxPlusMatrix) -> None:
    violations = validate(m)
    if violations:
        raise InvalidMatrix(violations)


def is_strongly_connected(m: MaxPlusMatrix) -> bool:
    def reach(next_of: Callable[[int], tuple[int, ...]]) -> set[int]:
        seen = {0}
        stack = [0]
        while stack:
            for j in next_of(stack.pop()):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    preds = [tuple(i for i in range(m.n) if m.entries[i][j] is not None)
             for j in range(m.n)]
    return len(reach(m.successors)) == m.n and \
        len(reach(lambda j: preds[j])) == m.n


def instantiate(m: MaxPlusMatrix, pi: Instantiation) -> MaxPlusMatrix:
    """Evaluate every entry at pi; eps entries stay eps."""
    rows = tuple(
        tuple(None if w is None else LinearTerm.constant(w.evaluate(pi))
              for w in row)
        for row in m.entries)
    return MaxPlusMatrix(m.states, (), rows)


def default_policy(m: MaxPlusMatrix) -> MaxPolicy:
    """Smallest successor index per state."""
    _require_valid(m)
    return tuple(m.successors(i)[0] for i in range(m.n))


# --- value determination -----------------------------------------------------

def _value_determination(n: int, mu: MaxPolicy, weight: Callable, zero):
    """Shared core of the numeric and parametric variants.

    weight(j) is the weight of edge (j, mu[j]); zero is the additive origin
    for the anchor.  Works for Fractions and LinearTerms alike.
    """
    eta = [None] * n
    x = [None] * n
    remaining = list(range(n))
    while remaining:
        rem = set(remaining)
        # follow the policy from the smallest remaining state until a repeat;
        # the repeated tail is this class's circuit
        order: dict[int, int] = {}
        cur = remaining[0]
        while cur not in order:
            order[cur] = len(order)
            cur = mu[cur]
        walk = list(order)
        circuit = walk[order[cur]:]
        total = weight(circuit[0])
        for j in circuit[1:]:
            total = total + weight(j)
        eta_bar = total * Fraction(1, len(circuit))
        anchor = min(circuit)
        preds = {k: sorted(j for j in rem if mu[j] == k) for k in rem}
        eta[anchor] = eta_bar
        x[anchor] = zero
        stack = [anchor]
        seen = {anchor}
        while stack:
            k = stack.pop()
            for j in preds[k]:
                if j in seen:
                    continue
                # mu[j] == k, so x[k] is already assigned
                eta[j] = eta_bar
                x[j] = weight(j) - eta_bar + x[k]
                seen.add(j)
                stack.append(j)
        remaining = [s for s in remaining if s not in seen]
    return eta, x


def max_vd(m: MaxPlusMatrix, mu: MaxPolicy) -> Eigenmode:
    """Eigenmode (eta, x) of the policy-restricted constant matrix."""
    def weight(j: int) -> Fraction:
        return m.entries[j][mu[j]].constant_value()

    eta, x = _value_determination(m.n, mu, weight, Fraction(0))
    return Eigenmode(tuple(eta), tuple(x))


def p_max_vd(m: MaxPlusMatrix, mu: MaxPolicy) -> ParamEigenmode:
    """Parametric eigenmode (H, X); same control flow with symbolic weights."""
    eta, x = _value_determination(m.n, mu, lambda j: m.entries[j][mu[j]], ZERO)
    return ParamEigenmode(tuple(eta), tuple(x))


# --- policy improvement and iteration ------------------------------------------

def max_pimpr(m: MaxPlusMatrix, mu: MaxPolicy, em: Eigenmode) -> Optional[MaxPolicy]:
    """One improvement step; None means (eta, x) is an eigenmode (fixpoint).

    Phase one (type 3a) raises eta along some edge; phase two (type 3b)
    raises x among the eta-maximal edges.  "Any" choices take the smallest
    target index.
    """
    eta, x = em
    best_eta = {}
    k_set = {}
    j_set = []
    for i in range(m.n):
        succ = m.successors(i)
        best_eta[i] = max(eta[j] for j in succ)
        k_set[i] = [j for j in succ if eta[j] == best_eta[i]]
        if best_eta[i] > eta[i]:
            j_set.append(i)
    if j_set:
        out = list(mu)
        for i in j_set:
            out[i] = min(k_set[i])
        return tuple(out)
    i_set = []
    l_set = {}
    for i in range(m.n):
        values = {j: m.entries[i][j].constant_value() - eta[j] + x[j]
                  for j in k_set[i]}
        best = max(values.values())
        l_set[i] = [j for j, v in values.items() if v == best]
        if best > x[i]:
            i_set.append(i)
    if i_set:
        out = list(mu)
        for i in i_set:
            out[i] = min(l_set[i])
        return tuple(out)
    return None


def max_pi(m: MaxPlusMatrix, mu: MaxPolicy | None = None,
           history: list | None = None) -> tuple[Eigenmode, MaxPolicy]:
    """Policy iteration to the fixpoint eigenmode.

    history, if given, collects (policy, eigenmode) per round, fixpoint
    round included.
    """
    _require_valid(m)
    if not m.is_constant:
        raise ValueError("policy iteration needs a constant matrix; "
                         "instantiate the parameters first")
    if mu is None:
        mu = default_policy(m)
    bound = 1
    for i in range(m.n):
        bound *= len(m.successors(i))
    for _ in range(bound + 1):
        em = max_vd(m, mu)
        if history is not None:
            history.append((mu, em))
        nxt = max_pimpr(m, mu, em)
        if nxt is None:
            return em, mu
        mu = nxt
    raise NonConvergence("policy iteration did not settle within the policy count")


# --- inverse problem ------------------------------------------------------------

@dataclass(frozen=True)
class MaxInverse:
    constraint: Constraint
    policy: MaxPolicy
    eigenmode: ParamEigenmode
    raw: tuple[Inequality, ...]


def _generate(m: MaxPlusMatrix, m0: MaxPlusMatrix, em: Eigenmode,
              pem: ParamEigenmode) -> list[Inequality]:
    """The two inequality families, branched on the numeric signs at pi0.

    For every edge (i, j): require H_j > H_i when eta_j > eta_i held, else
    H_j <= H_i; and in the latter case additionally pin the sign of
    (W_ij - H_j + X_j) against X_i.
    """
    eta, x = em
    h, xs = pem
    raw = []
    for i, j in m.edges():
        if eta[j] > eta[i]:
            raw.append(Inequality.gt(h[j], h[i]))
        else:
            raw.append(Inequality.le(h[j], h[i]))
            lhs = m.entries[i][j] - h[j] + xs[j]
            w0 = m0.entries[i][j].constant_value()
            if w0 - eta[j] + x[j] > x[i]:
                raw.append(Inequality.gt(lhs, xs[i]))
            else:
                raw.append(Inequality.le(lhs, xs[i]))
    return raw


def p_max_pi(m: MaxPlusMatrix, pi0: Instantiation) -> MaxInverse:
    """Constraint under which the circuit optimal at pi0 keeps maximal mean.

    The guarantee needs one of two structural facts: a strongly connected
    graph (the H-comparison rows then force all H equal at any satisfying
    point), or a reference policy whose graph is a single class (H is then
    one shared term outright).  Either way every circuit's mean telescopes
    to at most H, which the reference circuit attains.
    """
    _require_valid(m)
    m0 = instantiate(m, pi0)
    em, mu0 = max_pi(m0)
    if not is_strongly_connected(m) and len(policy_circuits(m0, mu0)) != 1:
        raise NotStronglyConnected(
            "the graph must be strongly connected, or the reference policy's "
            "graph must form a single class")
    pem = p_max_vd(m, mu0)
    raw = _generate(m, m0, em, pem)
    try:
        constraint = Constraint.of(raw)
    except ContradictionError as exc:
        raise AssertionError("inverse generation produced a contradiction") from exc
    if not satisfies(constraint, pi0):
        raise AssertionError("generated constraint excludes the reference "
                             "instantiation")
    return MaxInverse(constraint, mu0, pem, tuple(raw))


# --- brute-force oracle -----------------------------------------------------------

def policy_circuits(m: MaxPlusMatrix, mu: MaxPolicy) -> frozenset[tuple[int, ...]]:
    """The circuits of the policy's functional graph, smallest state first."""
    found = set()
    for start in range(m.n):
        order: dict[int, int] = {}
        cur = start
        while cur not in order:
            order[cur] = len(order)
            cur = mu[cur]
        walk = list(order)
        circuit = walk[order[cur]:]
        pivot = circuit.index(min(circuit))
        found.add(tuple(circuit[pivot:] + circuit[:pivot]))
    return frozenset(found)


def circuit_mean(m: MaxPlusMatrix, circuit: tuple[int, ...]) -> Fraction:
    total = Fraction(0)
    for k, i in enumerate(circuit):
        j = circuit[(k + 1) % len(circuit)]
        total += m.entries[i][j].constant_value()
    return total / len(circuit)


def brute_force_mcm(m: MaxPlusMatrix, cap: int | None = None) \
        -> tuple[Fraction, frozenset[tuple[int, ...]]]:
    """Maximal circuit mean by enumerating every simple circuit.

    Circuits are canonicalized to start at their smallest state.  Means of
    non-simple circuits are convex combinations of simple ones, so the
    maximum over simple circuits is the true maximum.
    """
    _require_valid(m)
    if not m.is_constant:
        raise ValueError("circuit enumeration needs a constant matrix")
    if cap is None:
        cap = int(os.environ.get("POLYPOL_ORACLE_CAP") or DEFAULT_CIRCUIT_CAP)
    if m.n > cap:
        raise TooLarge(f"{m.n} states exceed the cap of {cap}")
    weights = [[None if w is None else w.constant_value() for w in row]
               for row in m.entries]
    succ = [m.successors(i) for i in range(m.n)]
    best: Fraction | None = None
    attaining: set[tuple[int, ...]] = set()
    path: list[int] = []
    on_path: set[int] = set()

    def visit(u: int, root: int, total: Fraction) -> None:
        nonlocal best
        path.append(u)
        on_path.add(u)
        for v in succ[u]:
            if v == root:
                mean = (total + weights[u][v]) / len(path)
                if best is None or mean > best:
                    best = mean
                    attaining.clear()
                if mean == best:
                    attaining.add(tuple(path))
            elif v > root and v not in on_path:
                visit(v, root, total + weights[u][v])
        path.pop()
        on_path.discard(u)

    for root in range(m.n):
        # every simple circuit is enumerated once, rooted at its smallest state
        visit(root, root, Fraction(0))
    if best is None:
        raise InvalidMatrix(["graph has no circuit"])
    return best, frozenset(attaining)


# --- presentation ------------------------------------------------------------------

def format_matrix(m: MaxPlusMatrix) -> str:
    """Aligned text dump, eps marking missing edges."""
    cells = [[("eps" if w is None else render_term(w)) for w in row]
             for row in m.entries]
    widths = [max(len(cells[i][j]) for i in range(m.n)) for j in range(m.n)]
    lines = ["  ".join(cell.rjust(width) for cell, width in zip(row, widths))
             for row in cells]
    return "\n".join(lines)
