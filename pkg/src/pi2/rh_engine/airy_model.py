"""The Airy model problem M on four rays arg w = 0, sigma, pi, -sigma.

Jumps (rays oriented left to right)::

    arg w = 0       M+ = M- [[1, exp(-4/3 w^(3/2))], [0, 1]]
    arg w = +-sigma M+ = M- [[1, 0], [exp(4/3 w^(3/2)), 1]]
    arg w = pi      M+ = M- [[0, 1], [-1, 0]]

and ``M(w) ~ (I + sum_k B_k w^-k) w^(-sigma3/4) N`` at infinity.  The exact
solution is ``sqrt(2 pi) e^(-i pi/4) Psi(w) e^((2/3) w^(3/2) sigma3)`` where
Psi is built sector by sector from Ai(w), w Ai(w w), w^2 Ai(w^2 w) with
w = exp(2 pi i/3).  All Airy values are taken in scaled form and the
exponentials are combined before exponentiation, so large |w| is safe.
"""

import numpy as np

from ..asymptotics import LENS_ANGLE
from ..core_math.airy import airy_scaled, zeta_of
from ..core_math.gamma import airy_coeffs
from ..core_math.mat2 import N_INV, N_MATRIX, diag_power, mat2

_OMEGA = np.exp(2j * np.pi / 3)
_PREF = np.sqrt(2 * np.pi) * np.exp(-0.25j * np.pi)
#: tolerance in arg w below which a point counts as lying on a ray
RAY_TOL = 1e-13

# sector labels: A (0, sigma), B (sigma, pi], C (-pi, -sigma), D (-sigma, 0)
_A, _B, _C, _D = 0, 1, 2, 3
#: (sector on the + side, sector on the - side) for rays 1..4
_RAY_SIDES = {1: (_A, _D), 2: (_A, _B), 3: (_B, _C), 4: (_C, _D)}


class OnContourError(ValueError):
    pass


def ray_of(w, sigma=LENS_ANGLE):
    """Index 1..4 of the ray carrying w, or 0 if w is off the contour."""
    a = np.angle(complex(w))
    if abs(w) == 0:
        return 3
    for k, ang in ((1, 0.0), (2, sigma), (4, -sigma)):
        if abs(a - ang) <= RAY_TOL:
            return k
    if abs(abs(a) - np.pi) <= RAY_TOL:
        return 3
    return 0


def _sectors(w, sigma, side):
    a = np.angle(w)
    # the negative real axis (either sign of zero) belongs to B
    a = np.where((w.imag == 0) & (w.real < 0), np.pi, a)
    sec = np.where(a >= 0, np.where(a < sigma, _A, _B), np.where(a < -sigma, _C, _D))
    hits = [(k, np.abs(a - ang) <= RAY_TOL) for k, ang in
            ((1, 0.0), (2, sigma), (3, np.pi), (4, -sigma))]
    for k, mask in hits:
        if k == 3:
            mask = mask | (np.abs(a + np.pi) <= RAY_TOL)
        if np.any(mask):
            if side is None:
                raise OnContourError(f"w on ray {k} of the model contour: side must be specified")
            plus, minus = _RAY_SIDES[k]
            sec = np.where(mask, plus if side > 0 else minus, sec)
    return sec


def _rotated(w, k, a, sign):
    """(y_k e^(sign a), y_k' e^(sign a)) with y_k = w^k Ai(w^k w)."""
    u = _OMEGA ** k * w
    ai, aip, zu = airy_scaled(u)
    e = np.exp(sign * a - zu)
    return _OMEGA ** k * ai * e, _OMEGA ** (2 * k) * aip * e


def airy_model_M(w, sigma=LENS_ANGLE, side=None):
    """Exact M(w) from Airy functions; vectorized, returns shape (..., 2, 2).

    On a ray pass ``side=+1`` (left of the oriented ray) or ``side=-1``.
    """
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    sec = _sectors(w, sigma, side)
    a = zeta_of(w)
    # on the negative axis zeta_of returns the upper boundary value; sector C
    # needs the lower one
    a = np.where((sec == _C) & (w.imag == 0), np.conj(a), a)
    out = np.empty(w.shape + (2, 2), dtype=complex)
    # column 1 carries e^(+a), column 2 carries e^(-a)
    spec = {_A: ((0, 1), (2, -1)), _B: ((1, -1), (2, -1)),
            _C: ((2, -1), (1, 1)), _D: ((0, 1), (1, 1))}
    for s, ((k1, f1), (k2, f2)) in spec.items():
        m = sec == s
        if not m.any():
            continue
        y1, d1 = _rotated(w[m], k1, a[m], 1)
        y2, d2 = _rotated(w[m], k2, a[m], -1)
        out[m, 0, 0] = f1 * y1
        out[m, 1, 0] = f1 * d1
        out[m, 0, 1] = f2 * y2
        out[m, 1, 1] = f2 * d2
    out *= _PREF
    return out[0] if scalar else out


def model_jump(w, ray):
    """The jump matrix of M on ray 1..4 at w."""
    w = np.asarray(w, dtype=complex)
    e = np.exp(4.0 / 3.0 * w ** 1.5) if ray in (2, 4) else None
    if ray == 1:
        return mat2(1.0, np.exp(-4.0 / 3.0 * w ** 1.5), 0.0, 1.0)
    if ray in (2, 4):
        return mat2(1.0, 0.0, e, 1.0)
    if ray == 3:
        return mat2(0.0, 1.0, -1.0, 0.0) * np.ones(w.shape + (1, 1))
    raise ValueError("ray must be 1, 2, 3 or 4")


def _quarter(w):
    return diag_power(w ** 0.25, w ** -0.25)


def normalized_M(w, sigma=LENS_ANGLE, side=None):
    """M(w) N^-1 w^(sigma3/4), which tends to I like I + B_1/w + ..."""
    M = airy_model_M(w, sigma, side)
    return M @ N_INV @ _quarter(np.asarray(w, dtype=complex))


def B_matrices(kmax=6):
    """B_1..B_kmax of the expansion at infinity, as an array (kmax, 2, 2)."""
    out = np.zeros((kmax, 2, 2))
    for k in range(1, kmax + 1):
        j, r = divmod(k + 2, 3)
        if r == 0:      # k = 3j - 2
            out[k - 1, 1, 0] = airy_coeffs(2 * j - 1).t_k
        elif r == 1:    # k = 3j - 1
            out[k - 1, 0, 1] = airy_coeffs(2 * j - 1).s_k
        else:           # k = 3j
            c = airy_coeffs(2 * j)
            out[k - 1, 0, 0] = c.s_k
            out[k - 1, 1, 1] = c.t_k
    return out


def normalized_M_series(w, kmax=6):
    """Truncated series I + sum_{k<=kmax} B_k w^-k and the size of the first omitted term.

    Returns ``(value, monitor)``; ``monitor`` bounds the truncation error for
    large |w| in any sector, up to exponentially small terms.
    """
    w = np.asarray(w, dtype=complex)
    B = B_matrices(kmax + 1)
    out = np.broadcast_to(np.eye(2, dtype=complex), w.shape + (2, 2)).copy()
    p = np.ones_like(w)
    for k in range(kmax):
        p = p / w
        out = out + B[k] * p[..., None, None]
    monitor = np.max(np.abs(B[kmax])) * np.abs(p / w)
    return out, monitor


def M_from_series(w, kmax=6):
    """M(w) through the truncated expansion at infinity (no Airy evaluation)."""
    w = np.asarray(w, dtype=complex)
    val, _ = normalized_M_series(w, kmax)
    return val @ diag_power(w ** -0.25, w ** 0.25) @ N_MATRIX
