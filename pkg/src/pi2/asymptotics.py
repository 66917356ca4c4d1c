"""Phase functions, the g-function, the conformal map and the leading-order law.

Conventions: for ``x != 0`` write ``s = sgn(x)`` and ``tau = |x|^(-2/3) T``.
The rescaled phase is

    theta_hat(zeta) = zeta^(7/2)/105 - tau zeta^(3/2)/3 + s zeta^(1/2)

and ``|x|^(7/6) theta_hat(zeta) = theta(|x|^(1/3) zeta)``.  The g-function

    g(zeta) = c1 (zeta-z0)^(7/2) + c2 (zeta-z0)^(5/2) + c3 (zeta-z0)^(3/2)

agrees with theta_hat up to O(zeta^(-1/2)) at infinity, where z0 is the real
root of ``z^3 - 24 tau z + 48 s = 0`` with sign ``-s``.  All half-integer
powers use the principal branch with the cut on the left of the base point.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import binom

from .core_math.branch import BranchedPower
from .core_math.cubic import cubic_discriminant, cubic_real_roots

Z0_HAT_ABS = 2.0 * 6.0 ** (1.0 / 3.0)
#: angle of the exterior lens rays
LENS_ANGLE = 6.0 * np.pi / 7.0

_P12 = BranchedPower(exponent=Fraction(1, 2))
_P32 = BranchedPower(exponent=Fraction(3, 2))
_P72 = BranchedPower(exponent=Fraction(7, 2))


class Z0BranchError(ValueError):
    """The continuation root of the z0 cubic collides with another root."""

    def __init__(self, roots):
        self.roots = tuple(roots)
        super().__init__(f"z0 branch degenerate: candidate roots {self.roots}")


class ConformalMapError(ValueError):
    pass


def _sgn(x):
    if x == 0:
        raise ValueError("x = 0: rescaling undefined")
    return 1.0 if x > 0 else -1.0


@dataclass(frozen=True)
class GFunction:
    """Data of the g-function for given (x, T)."""
    x: float
    T: float
    z0: float
    z0_hat: float
    c1: float
    c2: float
    c3: float

    @property
    def sgn(self):
        return 1.0 if self.x > 0 else -1.0

    @property
    def tau(self):
        """|x|^(-2/3) T, the tension seen in the rescaled variable."""
        return abs(self.x) ** (-2.0 / 3.0) * self.T

    @property
    def cube_residual(self):
        return self.z0 ** 3 + 48.0 * self.sgn - 24.0 * self.z0 * self.tau


def theta(zeta, x, T, side=None):
    """zeta^(7/2)/105 - T zeta^(3/2)/3 + x zeta^(1/2)."""
    return _P72(zeta, side) / 105.0 - T * _P32(zeta, side) / 3.0 + x * _P12(zeta, side)


def theta_hat(zeta, x, T, side=None):
    """Phase in the rescaled variable zeta -> |x|^(1/3) zeta, divided by |x|^(7/6)."""
    s = _sgn(x)
    tau = abs(x) ** (-2.0 / 3.0) * T
    return _P72(zeta, side) / 105.0 - tau * _P32(zeta, side) / 3.0 + s * _P12(zeta, side)


def solve_z0(x, T):
    """Build the :class:`GFunction` for (x, T).

    The root with sign ``-sgn(x)`` is unique (Descartes' rule applied to the
    cubic at ``-sgn(x) z``), so it is the continuation of the T = 0 root.
    """
    s = _sgn(x)
    tau = abs(x) ** (-2.0 / 3.0) * T
    roots = cubic_real_roots(1.0, 0.0, -24.0 * tau, 48.0 * s)
    cands = [r for r in roots if r * s < 0]
    if len(cands) != 1:
        raise Z0BranchError(roots)
    z0 = cands[0]
    # a double root at z0 means the branch is not locally unique
    if len(roots) > 1 and abs(cubic_discriminant(1.0, 0.0, -24.0 * tau, 48.0 * s)) <= 1e-12 * max(1.0, abs(z0)) ** 6:
        others = [r for r in roots if r != z0]
        if any(abs(r - z0) <= 1e-6 * max(1.0, abs(z0)) for r in others):
            raise Z0BranchError(roots)
    c1 = 1.0 / 105.0
    c2 = z0 / 30.0
    c3 = z0 * z0 / 36.0 - s * 2.0 / (3.0 * z0)
    return GFunction(x=float(x), T=float(T), z0=z0, z0_hat=-s * Z0_HAT_ABS, c1=c1, c2=c2, c3=c3)


def z0_expansion(x, T):
    """Two-term large-|x| approximation of z0."""
    s = _sgn(x)
    return -s * Z0_HAT_ABS - s * (2.0 / 3.0) * 6.0 ** (2.0 / 3.0) * T * abs(x) ** (-2.0 / 3.0)


def _shifted(G):
    return (BranchedPower(G.z0, Fraction(7, 2)), BranchedPower(G.z0, Fraction(5, 2)),
            BranchedPower(G.z0, Fraction(3, 2)))


def g_eval(zeta, G, side=None):
    """g(zeta) with the cut on (-inf, z0]; ``side`` selects a boundary value on the cut."""
    p7, p5, p3 = _shifted(G)
    return G.c1 * p7(zeta, side) + G.c2 * p5(zeta, side) + G.c3 * p3(zeta, side)


def g_tail_coefficients(G, mmax=80):
    """Coefficients a_m of g = sum_m a_m zeta^(7/2-m) for |zeta| > |z0|."""
    m = np.arange(mmax + 1)
    mz = -G.z0
    a = G.c1 * binom(3.5, m) * mz ** m
    a[1:] += G.c2 * binom(2.5, m[1:] - 1) * mz ** (m[1:] - 1)
    a[2:] += G.c3 * binom(1.5, m[2:] - 2) * mz ** (m[2:] - 2)
    return a


def theta_hat_coefficients(G):
    """theta_hat = sum_m b_m zeta^(7/2-m), m = 0..3."""
    return np.array([1.0 / 105.0, 0.0, -G.tau / 3.0, G.sgn])


def g_minus_theta_hat(zeta, G):
    """g - theta_hat, free of the cancellation a direct difference suffers at large |zeta|.

    For ``|zeta| >= 2|z0|`` away from the cut the convergent expansion in
    ``z0/zeta`` is summed from its first nonvanishing term (``m = 4``).
    """
    zeta = np.asarray(zeta, dtype=complex)
    scalar = zeta.ndim == 0
    zeta = np.atleast_1d(zeta)
    out = np.empty_like(zeta)
    far = (np.abs(zeta) >= 2.0 * abs(G.z0)) & (np.abs(np.angle(zeta)) < np.pi - 0.6)
    near = ~far
    if near.any():
        out[near] = g_eval(zeta[near], G) - theta_hat(zeta[near], G.x, G.T)
    if far.any():
        zf = zeta[far]
        a = g_tail_coefficients(G)
        r = 1.0 / zf
        base = _P12(zf) * r    # zeta^(7/2 - 4)
        total = np.zeros_like(zf)
        p = base
        for m in range(4, len(a)):
            term = a[m] * p
            total = total + term
            if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
                break
            p = p * r
        out[far] = total
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------- conformal map

_MIN_INNER = 1e-8


def _inner(zeta, G):
    d = np.asarray(zeta, dtype=complex) - G.z0
    h = 1.5 * (G.c3 + G.c2 * d + G.c1 * d * d)
    return d, h


def conformal_f(zeta, G):
    """f = (3/2 (c3 + c2 d + c1 d^2))^(2/3) d, d = zeta - z0, so that (2/3) f^(3/2) = g."""
    d, h = _inner(zeta, G)
    if np.any(np.abs(h) < _MIN_INNER):
        raise ConformalMapError("f not conformal here")
    if np.any((h.real <= 0) & (np.abs(h.imag) <= 1e-14 * np.abs(h))):
        raise ConformalMapError("f not conformal here")
    out = h ** (2.0 / 3.0) * d
    return complex(out) if out.ndim == 0 else out


def conformal_f_prime(zeta, G):
    d, h = _inner(zeta, G)
    hp = 1.5 * (G.c2 + 2.0 * G.c1 * d)
    out = h ** (2.0 / 3.0) + (2.0 / 3.0) * h ** (-1.0 / 3.0) * hp * d
    return complex(out) if out.ndim == 0 else out


def f_prime_z0(G):
    """f'(z0) = (3 c3 / 2)^(2/3)."""
    return (1.5 * G.c3) ** (2.0 / 3.0)


def f_second_z0(G):
    """f''(z0) = (4/3) (3/2)^(2/3) c2 c3^(-1/3)."""
    return (4.0 / 3.0) * 1.5 ** (2.0 / 3.0) * G.c2 * np.cbrt(G.c3) ** -1


def invert_f(w, G, guess):
    """Solve f(zeta) = w by Newton's method from ``guess``."""
    z = complex(guess)
    for _ in range(60):
        step = (conformal_f(z, G) - w) / conformal_f_prime(z, G)
        z -= step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    return z


# ---------------------------------------------------------------- leading order

def y_leading(x, T):
    """1/2 z0(x, T) |x|^(1/3)."""
    G = solve_z0(x, T)
    return 0.5 * G.z0 * abs(x) ** (1.0 / 3.0)


# ---------------------------------------------------------------- sign of Re g

def _ray_coefficients(G, phi):
    """r^(-7/2) Re g(z0 + r e^(i phi)) = A + B u + C u^2 with u = 1/r."""
    return (G.c1 * math.cos(3.5 * phi), G.c2 * math.cos(2.5 * phi), G.c3 * math.cos(1.5 * phi))


def scaled_re_g(G, r, phi):
    """r^(-7/2) Re g(z0 + r e^(i phi)) for |phi| < pi."""
    a, b, c = _ray_coefficients(G, phi)
    u = 1.0 / np.asarray(r, dtype=float)
    return a + b * u + c * u * u


def ray_minimum(G, phi=0.0):
    """Minimum over r > 0 of r^(-7/2) Re g on the ray at angle phi (numerical)."""
    a, b, c = _ray_coefficients(G, phi)
    hi = max(1.0, 4.0 * abs(b) / max(abs(c), 1e-300))
    res = minimize_scalar(lambda u: a + b * u + c * u * u, bounds=(0.0, hi), method="bounded",
                          options={"xatol": 1e-14})
    vals = [res.fun, a, a + b * hi + c * hi * hi]
    return float(min(vals))


def ray_minimum_exact(G):
    """Closed form of the minimum on the positive ray: c1 - c2^2/(4 c3) when c2 < 0 < c3."""
    if G.c2 < 0 < G.c3:
        return G.c1 - G.c2 ** 2 / (4.0 * G.c3)
    return G.c1


def ray_supremum(G, phi):
    """Supremum over r > 0 of r^(-7/2) Re g on the ray at angle phi."""
    a, b, c = _ray_coefficients(G, phi)
    if c > 0 or (c == 0 and b > 0):
        return math.inf
    if c == 0:
        return a
    u = -b / (2.0 * c)
    return a - b * b / (4.0 * c) if u > 0 else a


def measure_eps0(G, step=np.pi / 140, kmax=20, per_step=16):
    """Largest k*step (k <= kmax) such that Re g < 0 on every ray within k*step of 6 pi/7."""
    eps = 0.0
    for k in range(1, kmax + 1):
        phis = np.concatenate([LENS_ANGLE + np.linspace((k - 1) * step, k * step, per_step + 1),
                               LENS_ANGLE - np.linspace((k - 1) * step, k * step, per_step + 1)])
        if all(ray_supremum(G, p) < 0 for p in phis if abs(p) < np.pi):
            eps = k * step
        else:
            break
    return eps


@dataclass
class ReGBoundsReport:
    c_lower: float
    eps0: float
    x_threshold: float
    samples: list = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["angle", "radius", "scaled_re_g"])
        for phi, r, v in self.samples:
            w.writerow([f"{phi:.17g}", f"{r:.17g}", f"{v:.17g}"])
        return buf.getvalue()


def re_g_scan(G, radii, angles, step=np.pi / 140):
    """Sample r^(-7/2) Re g(z0 + r e^(i phi)) and measure the sign constants.

    ``eps0`` is the largest multiple of ``step`` such that every scanned
    angle within it of 6 pi/7 carries only negative samples; ``c_lower`` is
    the smallest margin, over samples on the positive ray and in that window,
    by which the sign conditions hold.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    samples = []
    by_angle = {}
    for phi in angles:
        vals = scaled_re_g(G, radii, phi)
        by_angle[float(phi)] = vals
        samples.extend((float(phi), float(r), float(v)) for r, v in zip(radii, vals))
    eps = 0.0
    widest = max(abs(p - LENS_ANGLE) for p in by_angle)
    k = 1
    while k * step <= widest + 1e-12:
        inside = [p for p in by_angle if abs(p - LENS_ANGLE) <= k * step + 1e-12]
        if not all(np.all(by_angle[p] < 0) for p in inside):
            break
        eps = k * step
        k += 1
    margins = [np.min(v) for p, v in by_angle.items() if p == 0.0]
    margins += [np.min(-v) for p, v in by_angle.items() if abs(p - LENS_ANGLE) <= eps + 1e-15]
    c_lower = float(min(margins)) if margins else math.nan
    return ReGBoundsReport(c_lower=c_lower, eps0=eps, x_threshold=abs(G.x), samples=samples)


def re_g_grid(G, re_values, im_values):
    """Re g on a rectangular zeta grid (rows: imaginary part), cut values from above."""
    zr, zi = np.meshgrid(np.asarray(re_values, float), np.asarray(im_values, float))
    z = zr + 1j * zi
    on_cut = (zi == 0) & (zr < G.z0)
    vals = np.empty(z.shape)
    vals[~on_cut] = g_eval(z[~on_cut], G).real
    if on_cut.any():
        vals[on_cut] = np.real(g_eval(z[on_cut], G, side=+1))
    return vals
