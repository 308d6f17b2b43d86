"""Semiclassical spectra of asymmetric one-dimensional double-well
potentials: the parabolic-cylinder/WKB matching quantization condition,
tunneling splittings, localization diagnostics and the two-level model,
all verified against a built-in exact grid eigensolver.
"""

from .errors import (AsymwellError, ConfigError, ConstructionError,
                     CoverageError, DegeneracyStructureError, DomainError,
                     NearDegeneracyError, NoBarrierError, RangeError,
                     ShapeError, SingularInputError, ValidityError)
from .oracle import (GridSpec, PairClassification, SpectrumResult,
                     default_grid, eigenvalue_error_estimate, pair_splitting,
                     probability_split, resolve_pair_or_single, solve_spectrum)
from .potential import (DoubleWellPotential, TurningPair, UnitsConfig,
                        WellParams, barrier_top, build_biased_quartic,
                        build_from_csv, build_from_table,
                        build_piecewise_parabolic, locate_wells,
                        turning_points)
from .quantize import (EnergyDecomposition, LocalizationReport, PairSolution,
                       decompose_energy, epsilon_level, localization_report,
                       nu_of_energy, quantization_residual, solve_pair_exact,
                       solve_pair_quadratic, splitting_degenerate)
from .specfun import (PcfEvaluation, g_factor, hermite_gaussian, pcf_d,
                      pcf_d_asymptotic, pcf_d_ode, pcf_hermite_identity)
from .twolevel import (TwoLevelModel, ab_ratio_check, build_two_level,
                       flux_splitting, mixing_angle, tilde_delta,
                       two_level_hamiltonian, two_level_states,
                       wkb_norm_left, wkb_norm_right, wkb_tail_functions)
from .wkb_matching import (ActionIntegrals, MatchingCoefficients,
                           amplitude_ratio, barrier_action, match_left,
                           match_right, quadratic_action,
                           quadratic_action_asymptotic, wkb_wavefunction)

__version__ = "0.1.0"
