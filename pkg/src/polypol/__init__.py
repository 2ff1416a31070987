"""Optimal policies over parametric weighted models, exactly.

Two model families share one workflow.  A decision process with rational
transition probabilities and parametric weights is solved for the policy
minimizing expected cost to the absorbing state; a weighted digraph is
solved for the successor policy maximizing the circuit mean in max-plus
algebra.  For either, the inverse computation synthesizes a conjunction of
linear inequalities over the parameters under which the policy that is
optimal at a reference instantiation remains optimal.

All arithmetic is exact (fractions end to end); every algorithmic choice is
deterministic, so results are reproducible bit for bit.
"""

from .params import (Constraint, ContradictionError, Inequality, LinearTerm,
                     MissingParameter, TermSyntaxError, TRUE, ZERO, normalize,
                     parse_rational, parse_term, partial_instantiate,
                     render_inequality, render_term, satisfies, simplify)
from .linsolve import SingularSystem, solve_affine_fixpoint
from .mdp import (InvalidModel, MdpInverse, Move, Pmdp, TooManyPolicies,
                  brute_force_optimal, mdp_pi, mdp_vd, p_mdp_pi,
                  p_mdp_pi_for_policy, p_mdp_vd)
from .maxplus import (Eigenmode, InvalidMatrix, MaxInverse, MaxPlusMatrix,
                      NotStronglyConnected, ParamEigenmode, TooLarge,
                      brute_force_mcm, format_matrix, max_pi, max_pimpr,
                      max_vd, p_max_pi, p_max_vd)
from .model_io import (ModelFormatError, ModelValidationError, load_model,
                       parse_constraint, parse_instantiation, parse_model,
                       render_constraint, render_instantiation,
                       serialize_model)

__all__ = [
    "Constraint", "ContradictionError", "Inequality", "LinearTerm",
    "MissingParameter", "TermSyntaxError", "TRUE", "ZERO", "normalize",
    "parse_rational", "parse_term", "partial_instantiate",
    "render_inequality", "render_term", "satisfies", "simplify",
    "SingularSystem", "solve_affine_fixpoint",
    "InvalidModel", "MdpInverse", "Move", "Pmdp", "TooManyPolicies",
    "brute_force_optimal", "mdp_pi", "mdp_vd", "p_mdp_pi",
    "p_mdp_pi_for_policy", "p_mdp_vd",
    "Eigenmode", "InvalidMatrix", "MaxInverse", "MaxPlusMatrix",
    "NotStronglyConnected", "ParamEigenmode", "TooLarge",
    "brute_force_mcm", "format_matrix", "max_pi", "max_pimpr", "max_vd",
    "p_max_pi", "p_max_vd",
    "ModelFormatError", "ModelValidationError", "load_model",
    "parse_constraint", "parse_instantiation", "parse_model",
    "render_constraint", "render_instantiation", "serialize_model",
]
