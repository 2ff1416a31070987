"""Command-line front end.

Subcommands: solve (optimal policy and values / eigenmode), inverse
(constraint synthesis around a reference instantiation), check (does an
instantiation satisfy a constraint), instantiate (partial substitution into
a constraint), simplify.  Exit codes: 0 success or satisfied, 1 not
satisfied / constraint became false, 2 any parse, validation, or usage
error.

Constraint output is line-oriented and re-parseable, so commands compose:

    polypol inverse model.json --pi0 @ref.pi | polypol check - --pi p1=2
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import maxplus, mdp, model_io
from .params import (ContradictionError, MissingParameter, TermSyntaxError,
                     partial_instantiate, satisfies)


def _fmt(value: Fraction, decimal: bool) -> str:
    return str(float(value)) if decimal else str(value)


def _read_pairs(value: str) -> dict[str, Fraction]:
    """Inline "a=1,b=2/3" pairs, or @path to read the same format from a file."""
    if value.startswith("@"):
        with open(value[1:], encoding="utf-8") as handle:
            value = handle.read()
    return model_io.parse_instantiation(value)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _constant_model(model, pairs):
    if pairs:
        if isinstance(model, mdp.Pmdp):
            return mdp.instantiate(model, pairs)
        return maxplus.instantiate(model, pairs)
    if not model.is_constant:
        raise ValueError("model has parameters; provide --pi")
    return model


def cmd_solve(args) -> int:
    model = model_io.load_model(args.model)
    pairs = _read_pairs(args.pi) if args.pi else {}
    instance = _constant_model(model, pairs)
    lines = []
    if isinstance(instance, mdp.Pmdp):
        mu, values = mdp.mdp_pi(instance)
        named = mdp.policy_as_names(instance, mu)
        lines.append("policy: " + ", ".join(f"{s}->{a}" for s, a in named.items()))
        lines.append("values: " + ", ".join(
            f"{name}={_fmt(values[i], args.decimal)}"
            for i, name in enumerate(instance.states)))
    else:
        em, mu = maxplus.max_pi(instance)
        lines.append("policy: " + ", ".join(
            f"{instance.states[i]}->{instance.states[mu[i]]}"
            for i in range(instance.n)))
        lines.append("rho: " + _fmt(max(em.eta), args.decimal))
        lines.append("eta: " + ", ".join(
            f"{name}={_fmt(em.eta[i], args.decimal)}"
            for i, name in enumerate(instance.states)))
        lines.append("x: " + ", ".join(
            f"{name}={_fmt(em.x[i], args.decimal)}"
            for i, name in enumerate(instance.states)))
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_inverse(args) -> int:
    model = model_io.load_model(args.model)
    pi0 = _read_pairs(args.pi0)
    if isinstance(model, mdp.Pmdp):
        result = mdp.p_mdp_pi(model, pi0)
        named = mdp.policy_as_names(model, result.policy)
        policy = ", ".join(f"{s}->{a}" for s, a in named.items())
    else:
        result = maxplus.p_max_pi(model, pi0)
        policy = ", ".join(f"{model.states[i]}->{model.states[result.policy[i]]}"
                           for i in range(model.n))
    lines = [f"# policy: {policy}"]
    if args.raw:
        lines.extend(f"# raw: {iq}" for iq in result.raw)
    text = "\n".join(lines) + "\n" + model_io.render_constraint(result.constraint)
    _emit(text, args.output)
    return 0


def cmd_check(args) -> int:
    pairs = _read_pairs(args.pi)
    try:
        constraint = model_io.parse_constraint(_read_text(args.constraint))
    except ContradictionError:
        print("not satisfied")
        return 1
    if satisfies(constraint, pairs):
        print("satisfied")
        return 0
    print("not satisfied")
    return 1


def cmd_instantiate(args) -> int:
    pairs = _read_pairs(args.pi) if args.pi else {}
    try:
        constraint = model_io.parse_constraint(_read_text(args.constraint))
        constraint = partial_instantiate(constraint, pairs)
    except ContradictionError as exc:
        print(f"contradiction: {exc}", file=sys.stderr)
        return 1
    _emit(model_io.render_constraint(constraint), args.output)
    return 0


def cmd_simplify(args) -> int:
    try:
        constraint = model_io.parse_constraint(_read_text(args.constraint))
    except ContradictionError as exc:
        print(f"contradiction: {exc}", file=sys.stderr)
        return 1
    _emit(model_io.render_constraint(constraint), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polypol",
        description="Optimal policies for weighted models, and the constraint "
                    "under which a reference-optimal policy stays optimal.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="optimal policy and values")
    solve.add_argument("model", help="model file (.json, pmdp or pdwg)")
    solve.add_argument("--pi", help='instantiation, "a=1,b=2/3" or @file')
    solve.add_argument("--decimal", action="store_true",
                       help="display values as decimals (display only)")
    solve.add_argument("--output", help="write to a file instead of stdout")
    solve.set_defaults(func=cmd_solve)

    inverse = sub.add_parser("inverse",
                             help="constraint keeping the reference policy optimal")
    inverse.add_argument("model")
    inverse.add_argument("--pi0", required=True,
                         help='reference instantiation, "a=1,..." or @file')
    inverse.add_argument("--raw", action="store_true",
                         help="also print the unsimplified inequalities")
    inverse.add_argument("--output")
    inverse.set_defaults(func=cmd_inverse)

    check = sub.add_parser("check", help="test an instantiation against a constraint")
    check.add_argument("constraint", help="constraint file, - for stdin")
    check.add_argument("--pi", required=True)
    check.set_defaults(func=cmd_check)

    inst = sub.add_parser("instantiate",
                          help="substitute some parameters into a constraint")
    inst.add_argument("constraint")
    inst.add_argument("--pi")
    inst.add_argument("--output")
    inst.set_defaults(func=cmd_instantiate)

    simp = sub.add_parser("simplify", help="normalize and deduplicate a constraint")
    simp.add_argument("constraint")
    simp.add_argument("--output")
    simp.set_defaults(func=cmd_simplify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (model_io.ModelFormatError, model_io.ModelValidationError,
            TermSyntaxError, MissingParameter, ContradictionError,
            mdp.InvalidModel, maxplus.InvalidMatrix,
            maxplus.NotStronglyConnected, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
