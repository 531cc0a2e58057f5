"""Anosov domains of reducible suspensions of representations of hyperbolic groups."""
from .errors import (AnosovDomainsError, EigenSolverError, NumericalAmbiguityError, ResourceLimitError,
                     SingularMatrixError, ValidationError)
from .group import (BallIndex, GroupPresentation, RealCharacter, character_eval, character_validate,
                    cyclic_reduce, enumerate_ball, format_word, free_reduce, inverse, parse_word,
                    uniform_norm)
from .group.cayley import translation_length, word_length
from .lab import (AnosovDomain, GapGrowth, ball_bounds_check, boundary_formula, criterion_inf,
                  deformation_sweep, gap_series, growth_slope, intersection_character, membership,
                  nesting_check, s_k_estimate, slice_domain)
from .reps import (ComposedFuchsian, Representation, genus2_rep, rep_eval, rep_validate, schottky_rep,
                   surface_rep, sym_power, symmetric_residual)
from .spectral import (contragredient, eigen_magnitudes, g_omega_residual, product_log_magnitudes,
                       sl_star_check, symspace_length, weak_unipotent_check)
from .suspension import (CoboundarySeed, ExplicitTable, SuspensionSpec, Zero, build_suspension,
                         coboundary_kappa, cocycle_residual, generality_check, qie_slope_check,
                         sandwich_check, symmetric_sandwich_check)

__version__ = "0.1.0"
