"""Markov decision processes with parametric weights and an absorbing state.

States and actions are kept as index tuples internally; names live in the
model and are only used at the boundaries.  A policy is a tuple with one
action index per state (the absorbing state's entry is its forced self-loop).
The value of a state under a policy is the expected sum of weights until
absorption, and "optimal" always means minimal value at every state.

Direct path: value determination (one exact linear solve) and policy
iteration with strict-improvement greedy steps.  Inverse path: parametric
value determination, then one inequality per non-chosen action stating that
switching to it does not improve the policy; the conjunction is the
constraint under which the reference-optimal policy stays optimal.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping

from .linsolve import solve_affine_fixpoint
from .params import (Constraint, ContradictionError, Inequality, Instantiation,
                     LinearTerm, ZERO, satisfies)

DEFAULT_POLICY_CAP = 100_000

MdpPolicy = tuple[int, ...]


class InvalidModel(ValueError):
    """The model violates a structural invariant; see .violations."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class TooManyPolicies(RuntimeError):
    """Exhaustive policy enumeration would exceed the configured cap."""


class InternalOptimalityViolation(RuntimeError):
    """Postcondition check failed: the reference instantiation does not
    satisfy its own constraint.  Indicates a bug, not a user error."""


class PolicyNotOptimal(ValueError):
    """A caller-supplied policy is not optimal at the reference instantiation."""


@dataclass(frozen=True)
class Move:
    """One (state, action) row: its weight and outgoing distribution."""

    weight: LinearTerm
    dist: tuple[tuple[int, Fraction], ...]  # (target, probability > 0)


@dataclass(frozen=True, eq=True)
class Pmdp:
    states: tuple[str, ...]
    actions: tuple[str, ...]
    parameters: tuple[str, ...]
    absorbing: int
    moves: Mapping[tuple[int, int], Move]

    @property
    def n_states(self) -> int:
        return len(self.states)

    def enabled(self, s: int) -> tuple[int, ...]:
        return tuple(a for a in range(len(self.actions)) if (s, a) in self.moves)

    def move(self, s: int, a: int) -> Move:
        return self.moves[(s, a)]

    @property
    def is_constant(self) -> bool:
        return all(mv.weight.is_constant for mv in self.moves.values())

    def state_index(self, name: str) -> int:
        return self.states.index(name)

    def action_index(self, name: str) -> int:
        return self.actions.index(name)


def enabled(m: Pmdp, s: int) -> tuple[int, ...]:
    """Actions with an outgoing distribution at state s."""
    return m.enabled(s)


def _oracle_cap(default: int) -> int:
    value = os.environ.get("POLYPOL_ORACLE_CAP")
    return int(value) if value else default


# --- validation --------------------------------------------------------------

def validate(m: Pmdp) -> list[str]:
    """Structural violations; an empty list means the model is usable.

    Beyond row sums and the absorbing self-loop, rejects any model with a
    "trap": a set of states avoiding the absorbing one in which every state
    has some action whose whole support stays inside the set.  A trapped
    policy never absorbs and its value system is singular, so traps are
    exactly what breaks value determination.
    """
    bad = []
    if not (0 <= m.absorbing < m.n_states):
        return [f"absorbing index {m.absorbing} out of range"]
    for (s, a), mv in sorted(m.moves.items()):
        row = Fraction(0)
        for t, p in mv.dist:
            if not 0 < p <= 1:
                bad.append(f"prob({m.states[s]}, {m.actions[a]}, {m.states[t]}) = {p} "
                           "outside (0, 1]")
            row += p
        if row != 1:
            bad.append(f"probabilities from ({m.states[s]}, {m.actions[a]}) "
                       f"sum to {row}, not 1")
        if len({t for t, _ in mv.dist}) != len(mv.dist):
            bad.append(f"duplicate target in ({m.states[s]}, {m.actions[a]})")
    for s in range(m.n_states):
        if not m.enabled(s):
            bad.append(f"state {m.states[s]} has no enabled action")
    absorbing = m.absorbing
    acts = m.enabled(absorbing)
    if len(acts) == 1:
        mv = m.move(absorbing, acts[0])
        if mv.dist != ((absorbing, Fraction(1)),):
            bad.append(f"absorbing state {m.states[absorbing]} must self-loop "
                       "with probability 1")
        if mv.weight != ZERO:
            bad.append(f"absorbing self-loop weight must be 0, got {mv.weight}")
    elif acts:
        bad.append(f"absorbing state {m.states[absorbing]} must have exactly "
                   "one enabled action")
    if bad:
        return bad

    # greatest fixpoint: shrink the candidate trap set until every remaining
    # state keeps some action fully inside it
    trap = set(range(m.n_states)) - {absorbing}
    while True:
        keep = {s for s in trap
                if any(all(t in trap for t, _ in m.move(s, a).dist)
                       for a in m.enabled(s))}
        if keep == trap:
            break
        trap = keep
    if trap:
        names = ", ".join(m.states[s] for s in sorted(trap))
        bad.append(f"some policy never reaches the absorbing state "
                   f"(trap set: {names})")
    return bad


def _require_valid(m: Pmdp) -> None:
    violations = validate(m)
    if violations:
        raise InvalidModel(violations)


# --- instantiation ------------------------------------------------------------

def instantiate(m: Pmdp, pi: Instantiation) -> Pmdp:
    """Replace every weight by its value at pi (total over the model's parameters)."""
    moves = {key: Move(LinearTerm.constant(mv.weight.evaluate(pi)), mv.dist)
             for key, mv in m.moves.items()}
    return Pmdp(m.states, m.actions, (), m.absorbing, moves)


# --- direct problem -----------------------------------------------------------

def default_policy(m: Pmdp) -> MdpPolicy:
    """Lowest-index enabled action everywhere; the deterministic starting point."""
    return tuple(m.enabled(s)[0] for s in range(m.n_states))


def _value_system(m: Pmdp, mu: MdpPolicy, rows: list[int]):
    index = {s: i for i, s in enumerate(rows)}
    a = [[Fraction(0)] * len(rows) for _ in rows]
    for i, s in enumerate(rows):
        for t, p in m.move(s, mu[s]).dist:
            if t != m.absorbing:
                a[i][index[t]] += p
    return a


def mdp_vd(m: Pmdp, mu: MdpPolicy) -> tuple[Fraction, ...]:
    """Value vector of a constant-weight model under mu (absorbing entry 0)."""
    rows = [s for s in range(m.n_states) if s != m.absorbing]
    a = _value_system(m, mu, rows)
    b = [m.move(s, mu[s]).weight.constant_value() for s in rows]
    solved = solve_affine_fixpoint(a, b)
    values = [Fraction(0)] * m.n_states
    for s, v in zip(rows, solved):
        values[s] = v
    return tuple(values)


def p_mdp_vd(m: Pmdp, mu: MdpPolicy) -> tuple[LinearTerm, ...]:
    """Parametric value vector: the same system with the weights kept symbolic."""
    rows = [s for s in range(m.n_states) if s != m.absorbing]
    a = _value_system(m, mu, rows)
    b = [m.move(s, mu[s]).weight for s in rows]
    solved = solve_affine_fixpoint(a, b)
    values = [ZERO] * m.n_states
    for s, v in zip(rows, solved):
        values[s] = v
    return tuple(values)


def mdp_pi(m: Pmdp) -> tuple[MdpPolicy, tuple[Fraction, ...]]:
    """Optimal policy and its values, by policy iteration with strict improvement."""
    _require_valid(m)
    if not m.is_constant:
        raise ValueError("policy iteration needs a constant-weight model; "
                         "instantiate the parameters first")
    mu = default_policy(m)
    seen = {mu}
    while True:
        values = mdp_vd(m, mu)
        nxt = list(mu)
        for s in range(m.n_states):
            if s == m.absorbing:
                continue
            best = values[s]
            for a in m.enabled(s):
                q = m.move(s, a).weight.constant_value()
                for t, p in m.move(s, a).dist:
                    q += p * values[t]
                if q < best:  # strict: ties keep the current action
                    best = q
                    nxt[s] = a
        nxt = tuple(nxt)
        if nxt == mu:
            return mu, values
        if nxt in seen:
            raise AssertionError("policy repeated; improvement is not monotone")
        seen.add(nxt)
        mu = nxt


# --- inverse problem ----------------------------------------------------------

@dataclass(frozen=True)
class MdpInverse:
    """Result of the inverse computation.

    constraint is the simplified conjunction; raw keeps the generated
    inequalities in (state, action) order before simplification.
    """

    constraint: Constraint
    policy: MdpPolicy
    values: tuple[LinearTerm, ...]
    raw: tuple[Inequality, ...]


def _generate(m: Pmdp, mu0: MdpPolicy, values: tuple[LinearTerm, ...]) \
        -> list[Inequality]:
    raw = []
    for s in range(m.n_states):
        if s == m.absorbing:
            continue
        for a in m.enabled(s):
            if a == mu0[s]:
                continue
            q = m.move(s, a).weight
            for t, p in m.move(s, a).dist:
                q = q + values[t] * p
            raw.append(Inequality.ge(q, values[s]))
    return raw


def p_mdp_pi(m: Pmdp, pi0: Instantiation) -> MdpInverse:
    """Constraint under which the policy optimal at pi0 stays optimal."""
    _require_valid(m)
    mu0, _ = mdp_pi(instantiate(m, pi0))
    return _finish_inverse(m, pi0, mu0, InternalOptimalityViolation)


def p_mdp_pi_for_policy(m: Pmdp, pi0: Instantiation, mu0: MdpPolicy) -> MdpInverse:
    """Same, for a caller-supplied policy; rejects one not optimal at pi0."""
    _require_valid(m)
    for s in range(m.n_states):
        if mu0[s] not in m.enabled(s):
            raise InvalidModel([f"policy picks disabled action at {m.states[s]}"])
    return _finish_inverse(m, pi0, mu0, PolicyNotOptimal)


def _finish_inverse(m, pi0, mu0, failure) -> MdpInverse:
    values = p_mdp_vd(m, mu0)
    raw = _generate(m, mu0, values)
    message = ("the supplied policy is not optimal at the reference "
               "instantiation" if failure is PolicyNotOptimal else
               "generated constraint excludes the reference instantiation")
    try:
        constraint = Constraint.of(raw)
    except ContradictionError as exc:
        raise failure(message) from exc
    if not satisfies(constraint, pi0):
        raise failure(message)
    return MdpInverse(constraint, mu0, values, tuple(raw))


# --- brute-force oracle ---------------------------------------------------------

def brute_force_optimal(m: Pmdp, cap: int | None = None) -> frozenset[MdpPolicy]:
    """All policies whose value vector is the componentwise minimum.

    Enumerates every policy, so it is only meant for small models; the cap
    (default 10^5, overridable via POLYPOL_ORACLE_CAP) guards against misuse.
    """
    _require_valid(m)
    if not m.is_constant:
        raise ValueError("brute force needs a constant-weight model")
    if cap is None:
        cap = _oracle_cap(DEFAULT_POLICY_CAP)
    rows = [s for s in range(m.n_states) if s != m.absorbing]
    choices = [m.enabled(s) for s in rows]
    count = math.prod(len(c) for c in choices)
    if count > cap:
        raise TooManyPolicies(f"{count} policies exceed the cap of {cap}")
    absorbing_action = m.enabled(m.absorbing)[0]
    evaluated: list[tuple[MdpPolicy, tuple[Fraction, ...]]] = []
    for combo in product(*choices):
        mu = [absorbing_action] * m.n_states
        for s, a in zip(rows, combo):
            mu[s] = a
        mu = tuple(mu)
        evaluated.append((mu, mdp_vd(m, mu)))
    minimum = tuple(min(v[s] for _, v in evaluated) for s in range(m.n_states))
    best = frozenset(mu for mu, v in evaluated if v == minimum)
    if not best:
        raise AssertionError("no policy attains the componentwise minimum")
    return best


def policy_as_names(m: Pmdp, mu: MdpPolicy) -> dict[str, str]:
    """Readable mapping, skipping the absorbing state."""
    return {m.states[s]: m.actions[mu[s]]
            for s in range(m.n_states) if s != m.absorbing}
