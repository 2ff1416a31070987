"""Reading and writing models, instantiations, and constraint files.

Models are JSON documents dispatched on their "type" field: "pmdp" for
decision processes, "pdwg" for weighted digraphs.  All rationals travel as
strings ("4/5"), never as floats, and weights use the linear-term grammar of
:mod:`polypol.params`.  Constraints and instantiations are plain text so they
can be piped between CLI commands.

Malformed structure raises ModelFormatError with the offending location;
semantic problems (unknown names, undeclared parameters, broken model
invariants) are collected into a ModelValidationError listing every
violation found.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Union

from . import maxplus, mdp
from .params import (Constraint, Inequality, Instantiation, LinearTerm,
                     TermSyntaxError, parse_rational, parse_term,
                     render_inequality, render_term)

Model = Union[mdp.Pmdp, maxplus.MaxPlusMatrix]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_PAIR_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)\Z")
_REL_RE = re.compile(r"(<=|>=|<|>)")


class ModelFormatError(ValueError):
    """The document's structure is malformed (bad JSON, missing fields)."""


class ModelValidationError(ValueError):
    """The document parses but breaks model invariants; see .violations."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ModelFormatError(message)


def _names(doc: dict, key: str, violations: list[str], required: bool = True,
           idents: bool = False) -> tuple[str, ...]:
    value = doc.get(key, [] if not required else None)
    _expect(isinstance(value, list) and
            all(isinstance(v, str) for v in value),
            f'"{key}" must be a list of strings')
    seen = set()
    for v in value:
        # parameters must fit the term grammar; states/actions are free-form
        if (not _NAME_RE.match(v)) if idents else (not v or v != v.strip()):
            violations.append(f'{key}: invalid name "{v}"')
        if v in seen:
            violations.append(f'{key}: duplicate name "{v}"')
        seen.add(v)
    return tuple(value)


def _index(pool: tuple[str, ...], name, what: str, where: str,
           violations: list[str]) -> int | None:
    _expect(isinstance(name, str), f'{where}: "{what}" must be a string')
    if name not in pool:
        violations.append(f'{where}: unknown {what} "{name}"')
        return None
    return pool.index(name)


def _weight(item: dict, where: str, declared: tuple[str, ...],
            violations: list[str]) -> LinearTerm | None:
    text = item.get("weight")
    _expect(isinstance(text, str), f'{where}: "weight" must be a term string')
    try:
        term = parse_term(text)
    except TermSyntaxError as exc:
        raise ModelFormatError(f"{where}: {exc}") from None
    undeclared = sorted(term.parameters() - set(declared))
    if undeclared:
        violations.append(f"{where}: undeclared parameter(s) "
                          + ", ".join(undeclared))
        return None
    return term


def parse_model(text: str) -> Model:
    """Parse and validate a model document; see the module docstring."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON (line {exc.lineno}: {exc.msg})") \
            from None
    _expect(isinstance(doc, dict), "top level must be a JSON object")
    kind = doc.get("type")
    if kind == "pmdp":
        return _parse_pmdp(doc)
    if kind == "pdwg":
        return _parse_pdwg(doc)
    raise ModelFormatError('"type" must be "pmdp" or "pdwg"')


def _parse_pmdp(doc: dict) -> mdp.Pmdp:
    violations: list[str] = []
    states = _names(doc, "states", violations)
    actions = _names(doc, "actions", violations)
    parameters = _names(doc, "parameters", violations, required=False,
                        idents=True)
    absorbing = _index(states, doc.get("absorbing"), "absorbing state",
                       "header", violations)
    transitions = doc.get("transitions")
    _expect(isinstance(transitions, list), '"transitions" must be a list')
    moves: dict[tuple[int, int], mdp.Move] = {}
    for k, item in enumerate(transitions):
        where = f"transitions[{k}]"
        _expect(isinstance(item, dict), f"{where} must be an object")
        s = _index(states, item.get("from"), "from", where, violations)
        a = _index(actions, item.get("action"), "action", where, violations)
        weight = _weight(item, where, parameters, violations)
        dests = item.get("to")
        _expect(isinstance(dests, list) and dests,
                f'{where}: "to" must be a non-empty list')
        dist = []
        for dest in dests:
            _expect(isinstance(dest, dict), f"{where}: destinations must be objects")
            t = _index(states, dest.get("state"), "state", where, violations)
            prob = dest.get("prob")
            _expect(isinstance(prob, str),
                    f'{where}: "prob" must be a rational string like "4/5"')
            try:
                p = parse_rational(prob)
            except TermSyntaxError as exc:
                raise ModelFormatError(f"{where}: {exc}") from None
            if t is not None:
                dist.append((t, p))
        if s is None or a is None or weight is None:
            continue
        if (s, a) in moves:
            violations.append(f"{where}: duplicate transition for "
                              f'("{states[s]}", "{actions[a]}")')
            continue
        moves[(s, a)] = mdp.Move(weight, tuple(sorted(dist)))
    if absorbing is None:
        raise ModelValidationError(violations)
    model = mdp.Pmdp(states, actions, parameters, absorbing, moves)
    violations.extend(mdp.validate(model))
    if violations:
        raise ModelValidationError(violations)
    return model


def _parse_pdwg(doc: dict) -> maxplus.MaxPlusMatrix:
    violations: list[str] = []
    states = _names(doc, "states", violations)
    parameters = _names(doc, "parameters", violations, required=False,
                        idents=True)
    edges = doc.get("edges")
    _expect(isinstance(edges, list), '"edges" must be a list')
    n = len(states)
    grid: list[list[LinearTerm | None]] = [[None] * n for _ in range(n)]
    for k, item in enumerate(edges):
        where = f"edges[{k}]"
        _expect(isinstance(item, dict), f"{where} must be an object")
        i = _index(states, item.get("from"), "from", where, violations)
        j = _index(states, item.get("to"), "to", where, violations)
        weight = _weight(item, where, parameters, violations)
        if i is None or j is None or weight is None:
            continue
        if grid[i][j] is not None:
            violations.append(f'{where}: duplicate edge ("{states[i]}", "{states[j]}")')
            continue
        grid[i][j] = weight
    matrix = maxplus.MaxPlusMatrix(states, parameters,
                                   tuple(tuple(row) for row in grid))
    violations.extend(maxplus.validate(matrix))
    if violations:
        raise ModelValidationError(violations)
    return matrix


def serialize_model(model: Model) -> str:
    """Canonical JSON for a model; parse_model inverts it exactly."""
    if isinstance(model, mdp.Pmdp):
        doc = {
            "type": "pmdp",
            "parameters": list(model.parameters),
            "states": list(model.states),
            "absorbing": model.states[model.absorbing],
            "actions": list(model.actions),
            "transitions": [
                {"from": model.states[s],
                 "action": model.actions[a],
                 "weight": render_term(mv.weight),
                 "to": [{"state": model.states[t], "prob": str(p)}
                        for t, p in mv.dist]}
                for (s, a), mv in sorted(model.moves.items())
            ],
        }
    else:
        doc = {
            "type": "pdwg",
            "parameters": list(model.parameters),
            "states": list(model.states),
            "edges": [
                {"from": model.states[i],
                 "to": model.states[j],
                 "weight": render_term(model.entries[i][j])}
                for i, j in model.edges()
            ],
        }
    return json.dumps(doc, indent=2) + "\n"


def load_model(path: str) -> Model:
    with open(path, encoding="utf-8") as handle:
        return parse_model(handle.read())


# --- instantiations ----------------------------------------------------------

def parse_instantiation(text: str) -> dict[str, Fraction]:
    """name=rational pairs, separated by commas or newlines; # comments."""
    pieces: list[str] = []
    for line in text.splitlines() or [text]:
        pieces.extend(line.split("#", 1)[0].split(","))
    out: dict[str, Fraction] = {}
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        pair = _PAIR_RE.match(piece)
        if pair is None:
            raise TermSyntaxError(f"expected name=value, got {piece!r}")
        name = pair.group(1)
        if name in out:
            raise TermSyntaxError(f"parameter {name!r} assigned twice")
        out[name] = parse_rational(pair.group(2))
    return out


def render_instantiation(pi: Instantiation) -> str:
    return ",".join(f"{name}={pi[name]}" for name in sorted(pi))


# --- constraints -------------------------------------------------------------

def parse_constraint(text: str) -> Constraint:
    """One inequality per line: "lhs REL rhs" with REL in <=, <, >=, >.

    Blank lines and # comments are skipped; an empty body means True.
    Raises ContradictionError if some line is constant-false.
    """
    rows: list[Inequality] = []
    builders = {"<=": Inequality.le, "<": Inequality.lt,
                ">=": Inequality.ge, ">": Inequality.gt}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = _REL_RE.split(line)
        if len(parts) != 3:
            raise TermSyntaxError(f"line {lineno}: expected one relation "
                                  f"(<=, <, >= or >), got {raw!r}")
        try:
            lhs, rhs = parse_term(parts[0]), parse_term(parts[2])
        except TermSyntaxError as exc:
            raise TermSyntaxError(f"line {lineno}: {exc}") from None
        rows.append(builders[parts[1]](lhs, rhs))
    return Constraint.of(rows)


def render_constraint(k: Constraint) -> str:
    """Normalized lines, one inequality each; True renders as a comment."""
    if k.is_true:
        return "# true\n"
    return "".join(render_inequality(iq) + "\n" for iq in k.inequalities)
