"""Exact certification, minimization and duality for integrally convex sets and functions."""

from .conjugate import (BiconjugacyReport, DualityReport, SeparableFunction, biconjugacy_certify,
                        biconjugate_bruteforce, biconjugate_values, fenchel_check, integral_conjugate,
                        separable_conjugate, set_minmax, toland_singer_check)
from .core import INF, IntegralBox, integral_neighborhood, lp_solve, parse_rational
from .functions import (FiniteFunction, apply_fn_op, convex_envelope_at, half_integer_extension,
                        is_integrally_convex_2d, is_integrally_convex_fn, local_convex_extension,
                        parallelogram_holds)
from .generators import (TriangulationSpec, gen_quadratic_dd, gen_random_ic, gen_separable,
                         gen_triangulation_2d, gen_two_separable, perturb_non_ic)
from .minimize import (MinimizeReport, alpha_local_minimizers, argmin_set, beta, box_barrier_check,
                       is_local_min, minimize_bruteforce, minimize_scaling)
from .sets import (DiscreteSet, Verdict, apply_set_op, box_integrality_probe, in_hull, is_hole_free,
                   is_integrally_convex_set, local_hull_oracle)
from .subgrad import integral_subgradient, subdifferential_system

__version__ = "0.1.0"

__all__ = [
    "INF", "IntegralBox", "integral_neighborhood", "lp_solve", "parse_rational",
    "DiscreteSet", "Verdict", "apply_set_op", "box_integrality_probe", "in_hull", "is_hole_free",
    "is_integrally_convex_set", "local_hull_oracle",
    "FiniteFunction", "apply_fn_op", "convex_envelope_at", "half_integer_extension",
    "is_integrally_convex_2d", "is_integrally_convex_fn", "local_convex_extension", "parallelogram_holds",
    "MinimizeReport", "alpha_local_minimizers", "argmin_set", "beta", "box_barrier_check",
    "is_local_min", "minimize_bruteforce", "minimize_scaling",
    "integral_subgradient", "subdifferential_system",
    "BiconjugacyReport", "DualityReport", "SeparableFunction", "biconjugacy_certify",
    "biconjugate_bruteforce", "biconjugate_values", "fenchel_check", "integral_conjugate", "separable_conjugate",
    "set_minmax", "toland_singer_check",
    "TriangulationSpec", "gen_quadratic_dd", "gen_random_ic", "gen_separable", "gen_triangulation_2d",
    "gen_two_separable", "perturb_non_ic",
]
