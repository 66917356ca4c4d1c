"""Small numerical building blocks shared by both engines."""

from .airy import AiryValue, airy, airy_eval, airy_scaled
from .branch import BranchCutError, BranchedPower, principal_power
from .cubic import cubic_real_roots, cubic_residual
from .gamma import AiryCoeffs, airy_coeffs, airy_coeffs_exact, gamma, log_gamma
from .mat2 import (I2, J_CUT, N_INV, N_MATRIX, SIGMA3, det2, diag_power, inv2,
                   lower, mat2, mat2_mul, opnorm, upper)

__all__ = [
    "AiryValue", "airy", "airy_eval", "airy_scaled",
    "BranchCutError", "BranchedPower", "principal_power",
    "cubic_real_roots", "cubic_residual",
    "AiryCoeffs", "airy_coeffs", "airy_coeffs_exact", "gamma", "log_gamma",
    "I2", "J_CUT", "N_INV", "N_MATRIX", "SIGMA3", "det2", "diag_power", "inv2",
    "lower", "mat2", "mat2_mul", "opnorm", "upper",
]
