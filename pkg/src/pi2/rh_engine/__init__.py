"""Riemann-Hilbert engine: y(x, T) for large |x| from the small-norm problem."""

from .airy_model import (B_matrices, M_from_series, OnContourError, airy_model_M, model_jump,
                         normalized_M, normalized_M_series)
from .cauchy import cauchy_minus_matrix
from .contour import ContourMismatch, ContourSet, Panel, build_contour
from .parametrix import (circle_jump, delta_functions, delta_residues, exterior_jump, jump_S,
                         local_prefactor, model_argument, parametrix_local, parametrix_outer)
from .solve import (IllConditioned, NonrealExtraction, RHConfig, RHResult, RMoments,
                    extract_y, jump_deviation, rh_evaluate, solve_R)
