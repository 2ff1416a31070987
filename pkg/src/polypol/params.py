"""Exact linear terms, inequalities and constraints over named parameters.

Everything is built on `fractions.Fraction`, so all arithmetic is exact and
all equality checks are literal.  A linear term is an affine expression
``sum(coeff * param) + const``; an inequality compares a term against zero
with ``<`` or ``<=``; a constraint is a conjunction of inequalities, the
empty conjunction meaning True.  Parameter names are ordered alphabetically
wherever a canonical order is needed.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union


class MissingParameter(KeyError):
    """A parameter required by an evaluation has no assigned value."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no value assigned to parameter {self.name!r}"


class ContradictionError(ValueError):
    """An inequality (or a whole constraint) became constant-false."""


class TermSyntaxError(ValueError):
    """Text does not follow the linear-term grammar."""


#: A (possibly partial) assignment of rational values to parameter names.
Instantiation = Mapping[str, Fraction]


# --- rationals -------------------------------------------------------------

_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+)?\Z")


def parse_rational(text: str) -> Fraction:
    """Parse ``integer`` or ``integer/positive-integer``; floats are rejected."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise TermSyntaxError(f"not a rational: {text!r}")
    num, _, den = text.partition("/")
    if den:
        if int(den) == 0:
            raise TermSyntaxError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(num))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


# --- linear terms ----------------------------------------------------------

@dataclass(frozen=True)
class LinearTerm:
    """Affine expression over parameters: ``sum(c_i * p_i) + const``.

    ``coeffs`` is sorted by parameter name and never stores a zero
    coefficient, so structural equality is semantic equality.
    """

    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction

    # construction ---------------------------------------------------------

    @staticmethod
    def constant(value) -> "LinearTerm":
        return LinearTerm((), _as_fraction(value))

    @staticmethod
    def parameter(name: str, coeff=1) -> "LinearTerm":
        return LinearTerm.from_coeffs({name: _as_fraction(coeff)})

    @staticmethod
    def from_coeffs(coeffs: Mapping[str, Fraction], const=0) -> "LinearTerm":
        kept = tuple(sorted((n, _as_fraction(c)) for n, c in coeffs.items() if c != 0))
        return LinearTerm(kept, _as_fraction(const))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: "LinearTerm") -> "LinearTerm":
        merged = dict(self.coeffs)
        for name, c in other.coeffs:
            merged[name] = merged.get(name, Fraction(0)) + c
        return LinearTerm.from_coeffs(merged, self.const + other.const)

    def __neg__(self) -> "LinearTerm":
        return LinearTerm(tuple((n, -c) for n, c in self.coeffs), -self.const)

    def __sub__(self, other: "LinearTerm") -> "LinearTerm":
        return self + (-other)

    def __mul__(self, scalar) -> "LinearTerm":
        scalar = _as_fraction(scalar)
        if scalar == 0:
            return ZERO
        return LinearTerm(tuple((n, c * scalar) for n, c in self.coeffs),
                          self.const * scalar)

    __rmul__ = __mul__

    # queries ----------------------------------------------------------------

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def constant_value(self) -> Fraction:
        if self.coeffs:
            raise ValueError(f"term is not constant: {render_term(self)}")
        return self.const

    def parameters(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.coeffs)

    def coefficient(self, name: str) -> Fraction:
        for n, c in self.coeffs:
            if n == name:
                return c
        return Fraction(0)

    def evaluate(self, pi: Instantiation) -> Fraction:
        """Exact value at a total (over this term's parameters) instantiation."""
        total = self.const
        for name, c in self.coeffs:
            if name not in pi:
                raise MissingParameter(name)
            total += c * pi[name]
        return total

    def substitute(self, pi: Instantiation) -> "LinearTerm":
        """Replace the assigned parameters by their values; keep the rest."""
        kept: dict[str, Fraction] = {}
        const = self.const
        for name, c in self.coeffs:
            if name in pi:
                const += c * pi[name]
            else:
                kept[name] = c
        return LinearTerm.from_coeffs(kept, const)

    def __str__(self) -> str:
        return render_term(self)


ZERO = LinearTerm((), Fraction(0))


# --- term grammar ----------------------------------------------------------
#
#   term    := addend (('+'|'-') addend)*
#   addend  := rational ('*' ident)? | ident
#   rational:= integer ('/' positive-integer)?

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[+\-*]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise TermSyntaxError(f"unexpected {rest[:10]!r} at column {pos + 1}")
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    return tokens


def parse_term(text: str) -> LinearTerm:
    """Parse the textual grammar, e.g. ``"5/4*p1 + p3"`` or ``"-1/2*w34"``."""
    tokens = _tokenize(text)
    if not tokens:
        raise TermSyntaxError("empty term")
    coeffs: dict[str, Fraction] = {}
    const = Fraction(0)
    i = 0

    def take(kind: str) -> str:
        nonlocal i
        if i >= len(tokens) or tokens[i][0] != kind:
            got = tokens[i][1] if i < len(tokens) else "end of input"
            raise TermSyntaxError(f"expected {kind}, got {got!r} in {text!r}")
        value = tokens[i][1]
        i += 1
        return value

    first = True
    while i < len(tokens):
        sign = Fraction(1)
        if tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = Fraction(-1)
            i += 1
        elif not first:
            raise TermSyntaxError(f"expected '+' or '-' before {tokens[i][1]!r}")
        # rationals carry their own optional sign ("p1 + -2"), so one more
        # sign token may open the addend
        if not first and i < len(tokens) and tokens[i][0] == "op" \
                and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        first = False
        if i >= len(tokens):
            raise TermSyntaxError(f"dangling sign in {text!r}")
        kind, value = tokens[i]
        if kind == "num":
            i += 1
            coeff = sign * parse_rational(value)
            if i < len(tokens) and tokens[i] == ("op", "*"):
                i += 1
                name = take("name")
                coeffs[name] = coeffs.get(name, Fraction(0)) + coeff
            else:
                const += coeff
        elif kind == "name":
            i += 1
            coeffs[value] = coeffs.get(value, Fraction(0)) + sign
        else:
            raise TermSyntaxError(f"unexpected {value!r} in {text!r}")
    return LinearTerm.from_coeffs(coeffs, const)


def render_term(t: LinearTerm) -> str:
    """Canonical text: coefficients in name order, constant last.

    A coefficient of one is left implicit ("p3"); everything else is
    explicit ("5/4*p1", "-1*w43").
    """
    parts: list[tuple[Fraction, str]] = [
        (c, n if c == 1 else f"{abs(c)}*{n}") for n, c in t.coeffs]
    if t.const != 0 or not parts:
        parts.append((t.const, str(abs(t.const))))
    out = []
    for k, (value, body) in enumerate(parts):
        if k == 0:
            out.append(f"-{body}" if value < 0 else body)
        else:
            out.append(f"- {body}" if value < 0 else f"+ {body}")
    return " ".join(out)


# --- inequalities ----------------------------------------------------------

class Trivial(enum.Enum):
    """Outcome of normalizing an inequality with no parameters left."""

    TAUTOLOGY = "tautology"
    CONTRADICTION = "contradiction"


TAUTOLOGY = Trivial.TAUTOLOGY
CONTRADICTION = Trivial.CONTRADICTION


@dataclass(frozen=True)
class Inequality:
    """``lhs < 0`` or ``lhs <= 0``; the rhs is always zero by construction."""

    lhs: LinearTerm
    strict: bool

    # the four comparison constructors fold "a REL b" into "a-b REL 0"
    @staticmethod
    def le(a: LinearTerm, b: LinearTerm) -> "Inequality":
        return Inequality(a - b, strict=False)

    @staticmethod
    def lt(a: LinearTerm, b: LinearTerm) -> "Inequality":
        return Inequality(a - b, strict=True)

    @staticmethod
    def ge(a: LinearTerm, b: LinearTerm) -> "Inequality":
        return Inequality.le(b, a)

    @staticmethod
    def gt(a: LinearTerm, b: LinearTerm) -> "Inequality":
        return Inequality.lt(b, a)

    def holds_at(self, pi: Instantiation) -> bool:
        value = self.lhs.evaluate(pi)
        return value < 0 if self.strict else value <= 0

    def substitute(self, pi: Instantiation) -> "Inequality":
        return Inequality(self.lhs.substitute(pi), self.strict)

    def __str__(self) -> str:
        return render_inequality(self)


def render_inequality(iq: Inequality) -> str:
    rel = "<" if iq.strict else "<="
    return f"{render_term(iq.lhs)} {rel} 0"


def normalize(iq: Inequality) -> Union[Inequality, Trivial]:
    """Canonical form: integer coefficients, gcd(coefficients, constant) = 1.

    The scaling factor is the unique positive rational achieving that, so the
    inequality's direction is preserved.  Parameter-free inequalities collapse
    to TAUTOLOGY or CONTRADICTION.
    """
    t = iq.lhs
    if t.is_constant:
        holds = t.const < 0 if iq.strict else t.const <= 0
        return TAUTOLOGY if holds else CONTRADICTION
    values = [c for _, c in t.coeffs] + ([t.const] if t.const else [])
    scale = Fraction(math.lcm(*(v.denominator for v in values)))
    ints = [v * scale for v in values]
    g = math.gcd(*(int(v) for v in ints))
    scale /= g
    return Inequality(t * scale, iq.strict)


# --- constraints -----------------------------------------------------------

def _bound_form(iq: Inequality) -> tuple[tuple[tuple[str, int], ...], Fraction]:
    # normalized "L + d <= 0" as "prim(L) <= bound", prim having coprime
    # integer coefficients; parallel inequalities share the prim key
    ints = [int(c) for _, c in iq.lhs.coeffs]
    g = math.gcd(*ints)
    prim = tuple((n, int(c) // g) for n, c in iq.lhs.coeffs)
    return prim, Fraction(-iq.lhs.const, g)


@dataclass(frozen=True)
class Constraint:
    """Conjunction of normalized inequalities; the empty conjunction is True."""

    inequalities: tuple[Inequality, ...]

    @staticmethod
    def of(inequalities: Iterable[Inequality]) -> "Constraint":
        """Normalize, drop tautologies, merge duplicates and parallel bounds.

        Raises ContradictionError if some inequality is constant-false.
        """
        tightest: dict[tuple, tuple[Fraction, bool]] = {}
        for raw in inequalities:
            iq = normalize(raw)
            if iq is TAUTOLOGY:
                continue
            if iq is CONTRADICTION:
                raise ContradictionError(f"constant-false inequality: {raw}")
            prim, bound = _bound_form(iq)
            held = tightest.get(prim)
            # smaller bound wins; on equal bounds strict subsumes non-strict
            if held is None or bound < held[0] or \
                    (bound == held[0] and iq.strict and not held[1]):
                tightest[prim] = (bound, iq.strict)
        kept = []
        for prim, (bound, strict) in tightest.items():
            lhs = LinearTerm.from_coeffs({n: Fraction(c) for n, c in prim}, -bound)
            result = normalize(Inequality(lhs, strict))
            assert isinstance(result, Inequality)
            kept.append(result)
        kept.sort(key=lambda iq: (iq.lhs.coeffs, iq.lhs.const, iq.strict))
        return Constraint(tuple(kept))

    @property
    def is_true(self) -> bool:
        return not self.inequalities

    def parameters(self) -> frozenset[str]:
        return frozenset().union(*(iq.lhs.parameters() for iq in self.inequalities)) \
            if self.inequalities else frozenset()

    def __len__(self) -> int:
        return len(self.inequalities)

    def __str__(self) -> str:
        return " and ".join(str(iq) for iq in self.inequalities) or "true"


TRUE = Constraint(())


def satisfies(k: Constraint, pi: Instantiation) -> bool:
    """Whether the (total) instantiation makes every inequality true."""
    return all(iq.holds_at(pi) for iq in k.inequalities)


def simplify(k: Constraint) -> Constraint:
    return Constraint.of(k.inequalities)


def partial_instantiate(k: Constraint, pi: Instantiation) -> Constraint:
    """Replace the assigned parameters and re-simplify.

    Raises ContradictionError if some inequality becomes constant-false.
    """
    return Constraint.of(iq.substitute(pi) for iq in k.inequalities)
