"""Singularity analysis of the CP^(N-1) sigma model field equations."""
from .config import TOL, Tolerances
from .counterexample import (MonodromyProbe, SolitonParams, eval_derivatives, eval_solution,
                             locate_branch_points, monodromy_probe, phase_branch_points)
from .errors import (CompatibilityError, ConfigurationError, DegeneracyError,
                     InternalConsistencyError, NumericalConditioningError, OutOfWindowError,
                     PainleveError, RefineStepsError, SingularityError)
from .jets import Jet, jet_derive, jet_eval, jet_mul
from .laurent import (LaurentSeries, SingularityFunction, apply_d, apply_dbar, extract_order,
                      series_eval, series_mul)
from .leading_order import (LeadingData, build_exponent_system, det_closed_form_check,
                            random_leading_data, solve_exponents)
from .model import FieldTuple, PointState, residual_point, residual_series
from .resonance import (analyze_resonances, build_resonance_matrix, expected_resonances,
                        find_resonances, resonance_polynomial)
from .series_builder import (CompatibilityReport, ModelConfig, SeriesSolution, build_series,
                             step_order, verify_residual_scaling)

__version__ = "0.1.0"
