from .domain import (BAND, BoundsReport, DomainEstimate, ball_bounds_check, criterion_inf, membership,
                     random_directions, threshold, verdict_of)
from .estimators import AnosovDomain, GapGrowth
from .gaps import GapSeries, gap_series, growth_slope, s_k_estimate
from .slices import NestingReport, SliceResult, nesting_check, slice_domain
from .sweep import (LENGTH_CONVENTION, SweepResult, boundary_comparison, boundary_formula,
                    deformation_sweep, intersection_character, predicted_transition)
from .tables import SpectralTable, character_space, clear_cache, spectral_table
