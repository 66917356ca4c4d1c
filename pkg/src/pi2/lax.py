"""The fourth-order equation, its Lax pair, and the zero-curvature defect.

With ``Psi_zeta = U Psi`` and ``Psi_x = W Psi`` the compatibility condition
``U_x - W_zeta + [U, W] = 0`` is equivalent to the equation

    x = T y - (y^3/6 + (y_x^2 + 2 y y_xx)/24 + y_xxxx/240).

More precisely, for any jet ``U_x - W_zeta + [U, W] = -F sigma3`` with
``F = x - T y + y^3/6 + (y_x^2 + 2 y y_xx)/24 + y_xxxx/240``, so the defect
matrix doubles as a solution check that is independent of how y was computed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core_math.mat2 import mat2


@dataclass(frozen=True)
class Jet4:
    """y and its first four x-derivatives at the point (x, T)."""
    y: float
    y_x: float
    y_xx: float
    y_xxx: float
    y_xxxx: float
    x: float
    T: float

    def __post_init__(self):
        for name in ("y", "y_x", "y_xx", "y_xxx", "y_xxxx", "x", "T"):
            v = getattr(self, name)
            if isinstance(v, complex) or np.iscomplexobj(v):
                raise TypeError(f"jet field {name} must be real")
            if not math.isfinite(v):
                raise ValueError(f"jet field {name} is not finite")
            object.__setattr__(self, name, float(v))

    def norm(self):
        return max(abs(self.y), abs(self.y_x), abs(self.y_xx), abs(self.y_xxx), abs(self.y_xxxx))


def pi2_residual(j):
    """F = x - T y + y^3/6 + (y_x^2 + 2 y y_xx)/24 + y_xxxx/240; zero on solutions."""
    y = j.y
    return (j.x - j.T * y + y ** 3 / 6.0 + (j.y_x ** 2 + 2.0 * y * j.y_xx) / 24.0
            + j.y_xxxx / 240.0)


def fourth_derivative_from_equation(y, y_x, y_xx, x, T):
    """The y_xxxx that makes the residual vanish."""
    return 240.0 * (T * y - x - y ** 3 / 6.0 - (y_x ** 2 + 2.0 * y * y_xx) / 24.0)


def lax_U(zeta, j):
    """Coefficient matrix of the zeta-equation; a cubic polynomial in zeta."""
    z = np.asarray(zeta, dtype=complex)
    y, y1, y2, y3 = j.y, j.y_x, j.y_xx, j.y_xxx
    u11 = -4.0 * y1 * z - (12.0 * y * y1 + y3)
    u12 = 8.0 * z ** 2 + 8.0 * y * z + (12.0 * y ** 2 + 2.0 * y2 - 120.0 * j.T)
    u21 = (8.0 * z ** 3 - 8.0 * y * z ** 2 - (4.0 * y ** 2 + 2.0 * y2 + 120.0 * j.T) * z
           + (16.0 * y ** 3 - 2.0 * y1 ** 2 + 4.0 * y * y2 + 240.0 * j.x))
    return mat2(u11, u12, u21, -u11) / 240.0


def lax_U_x(zeta, j):
    """Total x-derivative of U along the jet (y_x stands in for dy/dx, and so on)."""
    z = np.asarray(zeta, dtype=complex)
    y, y1, y2, y3, y4 = j.y, j.y_x, j.y_xx, j.y_xxx, j.y_xxxx
    d11 = -4.0 * y2 * z - (12.0 * y1 ** 2 + 12.0 * y * y2 + y4)
    d12 = 8.0 * y1 * z + 24.0 * y * y1 + 2.0 * y3
    d21 = -8.0 * y1 * z ** 2 - (8.0 * y * y1 + 2.0 * y3) * z + 48.0 * y ** 2 * y1 + 4.0 * y * y3 + 240.0
    return mat2(d11, d12, d21, -d11) / 240.0


def lax_W(zeta, y):
    """Coefficient matrix of the x-equation: [[0, 1], [zeta - 2y, 0]]."""
    z = np.asarray(zeta, dtype=complex)
    return mat2(np.zeros_like(z), np.ones_like(z), z - 2.0 * y, np.zeros_like(z))


_W_ZETA = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


def compatibility_defect(zeta, j):
    """D = U_x - W_zeta + U W - W U, which equals -pi2_residual(j) sigma3."""
    U = lax_U(zeta, j)
    W = lax_W(zeta, j.y)
    return lax_U_x(zeta, j) - _W_ZETA + U @ W - W @ U


def _lower(a):
    return ((1, 0), (a, 1))


def _upper(a):
    return ((1, a), (0, 1))


def _mul(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def stokes_relation_check(s):
    """Product L(s4) U(s5) L(s6) U(s0) L(s1) U(s2) L(s3); arguments in that order.

    The product is formed in the arithmetic of the inputs (exact for integers
    and fractions).  The relation holds iff the result is [[0, 1], [-1, 0]].
    """
    s = list(s)
    if len(s) != 7:
        raise ValueError("expected seven Stokes multipliers (s4, s5, s6, s0, s1, s2, s3)")
    factors = [_lower(s[0]), _upper(s[1]), _lower(s[2]), _upper(s[3]),
               _lower(s[4]), _upper(s[5]), _lower(s[6])]
    out = ((1, 0), (0, 1))
    for f in factors:
        out = _mul(out, f)
    return np.array(out)


STOKES_TARGET = np.array([[0, 1], [-1, 0]])
