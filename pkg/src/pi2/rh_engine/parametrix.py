"""Outer and local parametrices, the jumps of the small-norm problem, and Delta_1, Delta_2.

All matrices live in the rescaled plane where the cut of g is (-inf, z0].
With ``a(zeta) = |x|^(1/9) h(zeta)^(1/6)``, ``h = 3/2 (c3 + c2 d + c1 d^2)``,
the analytic prefactor of the local parametrix is ``E = diag(a, 1/a)``; this
is ``|x|^(-sigma3/12) (zeta-z0)^(-sigma3/4) (|x|^(7/9) f)^(sigma3/4)`` written
without any branch cut inside the disk.  On the circle

    P (P_inf)^-1 = E Mhat(w) E^-1,   Mhat(w) = M(w) N^-1 w^(sigma3/4),

with ``w = |x|^(7/9) f(zeta)``, so ``v_R - I`` is formed without cancellation.
"""

from fractions import Fraction

import numpy as np

from ..asymptotics import conformal_f, f_prime_z0, f_second_z0, g_eval
from ..core_math.branch import BranchedPower
from ..core_math.gamma import airy_coeffs
from ..core_math.mat2 import N_INV, N_MATRIX, diag_power, lower, mat2, upper
from .airy_model import airy_model_M, normalized_M, normalized_M_series

#: |w| beyond which the expansion at infinity may replace the Airy evaluation
SERIES_RADIUS = 30.0
#: the series is used only when its first omitted term is below this
SERIES_TOL = 1e-16


def _quarter_inv(G):
    return BranchedPower(G.z0, Fraction(-1, 4))


def parametrix_outer(zeta, G, side=None):
    """P_inf = |x|^(-sigma3/12) (zeta-z0)^(-sigma3/4) N, cut on (-inf, z0]."""
    b = abs(G.x) ** (-1.0 / 12.0) * _quarter_inv(G)(zeta, side)
    return diag_power(b, 1.0 / b) @ N_MATRIX


def _h(zeta, G):
    d = np.asarray(zeta, dtype=complex) - G.z0
    return 1.5 * (G.c3 + G.c2 * d + G.c1 * d * d)


def local_prefactor(zeta, G):
    """E(zeta) = diag(a, 1/a), analytic and invertible on the disk."""
    a = abs(G.x) ** (1.0 / 9.0) * _h(zeta, G) ** (1.0 / 6.0)
    return diag_power(a, 1.0 / a)


def model_argument(zeta, G):
    """w = |x|^(7/9) f(zeta)."""
    return abs(G.x) ** (7.0 / 9.0) * np.asarray(conformal_f(zeta, G))


def parametrix_local(zeta, G, contour, side=None):
    """P = E M(|x|^(7/9) f(zeta)) inside the disk."""
    w = model_argument(zeta, G)
    return local_prefactor(zeta, G) @ airy_model_M(w, contour.sigma, side)


def _mhat_minus_identity(w, sigma, method):
    w = np.asarray(w, dtype=complex)
    if method == "series":
        val, _ = normalized_M_series(w)
        return val - np.eye(2)
    if method == "exact":
        return normalized_M(w, sigma) - np.eye(2)
    if method != "auto":
        raise ValueError(f"unknown model evaluation method {method!r}")
    val, mon = normalized_M_series(w)
    use = (np.abs(w) >= SERIES_RADIUS) & (mon <= SERIES_TOL)
    out = val - np.eye(2)
    if not use.all():
        out[~use] = normalized_M(w[~use], sigma) - np.eye(2)
    return out


def circle_jump(zeta, G, sigma, method="auto"):
    """v_R - I = E (Mhat(w) - I) E^-1 on the circle around z0_hat."""
    zeta = np.asarray(zeta, dtype=complex)
    w = model_argument(zeta, G)
    a = abs(G.x) ** (1.0 / 9.0) * _h(zeta, G) ** (1.0 / 6.0)
    D = _mhat_minus_identity(np.atleast_1d(w), sigma, method).reshape(zeta.shape + (2, 2))
    out = D.copy()
    out[..., 0, 1] *= a * a
    out[..., 1, 0] /= a * a
    return out


def _g_exponent(zeta, G):
    return abs(G.x) ** (7.0 / 6.0) * g_eval(zeta, G)


def exterior_jump(zeta, G, component):
    """v_R - I = P_inf (v_S - I) P_inf^-1 on an exterior leg.

    ``component`` is ``"right"`` (real axis right of the disk, upper
    triangular jump) or ``"upper"``/``"lower"`` (the lens rays, lower
    triangular jump).
    """
    zeta = np.asarray(zeta, dtype=complex)
    e = 2.0 * _g_exponent(zeta, G)
    if component == "right":
        core = mat2(0.0, np.exp(-e), 0.0, 0.0)
    elif component in ("upper", "lower"):
        core = mat2(0.0, 0.0, np.exp(e), 0.0)
    else:
        raise ValueError(f"unknown contour component {component!r}")
    P = parametrix_outer(zeta, G)
    b = abs(G.x) ** (-1.0 / 12.0) * _quarter_inv(G)(zeta)
    Pinv = N_INV @ diag_power(1.0 / b, b)
    return P @ core @ Pinv


def jump_S(zeta, G, component):
    """The jump of S on the exterior legs (before conjugation by P_inf)."""
    e = 2.0 * _g_exponent(zeta, G)
    if component == "right":
        return upper(np.exp(-e))
    return lower(np.exp(e))


# ---------------------------------------------------------------- Delta terms

def delta_functions(zeta, G):
    """(Delta_1, Delta_2) at zeta: the |x|^-1 and |x|^(-4/3) terms of P P_inf^-1."""
    zeta = np.asarray(zeta, dtype=complex)
    f = np.asarray(conformal_f(zeta, G))
    # ((zeta - z0)/f)^(1/2) = h^(-1/3), analytic near z0
    root = np.asarray(_h(zeta, G)) ** (-1.0 / 3.0)
    t1 = airy_coeffs(1).t_k
    s1 = airy_coeffs(1).s_k
    zero = np.zeros_like(f)
    d1 = mat2(zero, zero, t1 * root / f, zero)
    d2 = mat2(zero, s1 / (f * f * root), zero, zero)
    return d1, d2


def delta_residues(G):
    """Residues at z0 of Delta_1 and Delta_2 from the Laurent data f'(z0), f''(z0).

    Res Delta_1 = t1 f'^(-3/2) (entry (2,1)) and
    Res Delta_2 = -(3/4) s1 f'' f'^(-5/2) (entry (1,2)).
    """
    f1 = f_prime_z0(G)
    f2 = f_second_z0(G)
    t1 = airy_coeffs(1).t_k
    s1 = airy_coeffs(1).s_k
    r1 = np.zeros((2, 2), dtype=complex)
    r2 = np.zeros((2, 2), dtype=complex)
    r1[1, 0] = t1 * f1 ** -1.5
    r2[0, 1] = -0.75 * s1 * f2 * f1 ** -2.5
    return r1, r2
