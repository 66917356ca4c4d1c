"""Airy function Ai and its derivative for complex argument.

Three evaluation regimes, chosen per point:

* ``|z| <= R_SERIES``: Maclaurin series (Taylor expansion of Ai'' = z Ai at 0).
* ``|z| >= R_ASYMPTOTIC``: the Poincare expansion of Ai e^zeta,
  ``zeta = 2/3 z^(3/2)``, optimally truncated.  For ``|arg z| > 2 pi/3`` the
  value is assembled from the two rotated arguments through
  ``Ai(z) + w Ai(w z) + w^2 Ai(w^2 z) = 0``, ``w = exp(2 pi i/3)``.
* in between: Taylor continuation of the ODE along the ray through z, started
  from whichever end makes Ai the dominant solution in the direction of
  travel (inward from the asymptotic circle when ``|arg z| <= pi/3``, outward
  from the series circle otherwise).

The scaled pair ``(Ai e^zeta, Ai' e^zeta)`` is the primary output; it is
bounded by a multiple of ``|z|^(1/4)`` everywhere, so no regime overflows.
"""

from typing import NamedTuple

import numpy as np

from .gamma import gamma

R_SERIES = 2.5
R_ASYMPTOTIC = 9.0
#: maximal step of the Taylor continuation
_STEP = 0.6
_OMEGA = np.exp(2j * np.pi / 3)

AI0 = 3.0 ** (-2.0 / 3.0) / gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / gamma(1.0 / 3.0)


def _asymptotic_coefficients(kmax=80):
    u = np.empty(kmax + 1)
    u[0] = 1.0
    for k in range(1, kmax + 1):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    v = np.array([1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, kmax + 1)])
    return u, v


_U, _V = _asymptotic_coefficients()


class AiryValue(NamedTuple):
    """``Ai = ai * exp(log_scale)``, likewise for Ai'; log_scale is 0 unless
    the unscaled value would overflow or underflow."""
    ai: complex
    aip: complex
    log_scale: complex = 0.0


def zeta_of(z):
    """zeta = 2/3 z^(3/2), principal branch (cut on the negative axis, upper side)."""
    z = np.asarray(z, dtype=complex)
    z = np.where((z.imag == 0) & (z.real < 0), z.real + 0j, z)  # -0.0 imag -> +0.0
    r = np.abs(z)
    return 2.0 / 3.0 * r ** 1.5 * np.exp(1.5j * np.angle(z))


def _taylor_step(a, h, u, up):
    """Advance (Ai, Ai') from a to a+h with the local Taylor series of u'' = z u."""
    c_prev2 = np.zeros_like(u)   # c_{n-1}
    c_prev = u                   # c_n (n = 0)
    c_cur = up                   # c_{n+1}
    total = u + up * h
    dtotal = up.copy()
    hn = h.copy()                # h^(n+1)
    n = 0
    quiet = 0
    for _ in range(400):
        c_next = (a * c_prev + c_prev2) / ((n + 2) * (n + 1))
        # c_{n+2} h^(n+2) and its derivative contribution (n+2) c_{n+2} h^(n+1)
        term_d = (n + 2) * c_next * hn
        hn = hn * h
        term = c_next * hn
        total = total + term
        dtotal = dtotal + term_d
        n += 1
        c_prev2, c_prev, c_cur = c_prev, c_cur, c_next
        small = np.all(np.abs(term) <= 1e-18 * np.abs(total)) and np.all(
            np.abs(term_d) <= 1e-18 * np.abs(dtotal))
        # every third coefficient vanishes at the origin, so wait for a full period
        quiet = quiet + 1 if small else 0
        if quiet >= 3:
            break
    return total, dtotal


def _series(z):
    """Unscaled (Ai, Ai') by the Maclaurin series."""
    z = np.asarray(z, dtype=complex)
    zero = np.zeros_like(z)
    return _taylor_step(zero, z, np.full_like(z, AI0), np.full_like(z, AIP0))


def _asymptotic_sector(z):
    """Scaled (Ai e^zeta, Ai' e^zeta) for |arg z| <= 2 pi/3 and large |z|."""
    zeta = zeta_of(z)
    inv = 1.0 / zeta
    s_u = np.zeros_like(zeta)
    s_v = np.zeros_like(zeta)
    best = np.full(zeta.shape, np.inf)
    active = np.ones(zeta.shape, dtype=bool)
    p = np.ones_like(zeta)
    for k in range(len(_U)):
        tu = _U[k] * p
        tv = _V[k] * p
        mag = np.abs(tu) + np.abs(tv)
        # stop each point once its terms start growing (optimal truncation)
        active &= mag < best
        s_u = np.where(active, s_u + tu, s_u)
        s_v = np.where(active, s_v + tv, s_v)
        best = np.where(active, mag, best)
        if not active.any():
            break
        p = -p * inv
    q = np.exp(-0.25j * np.angle(z)) * np.abs(z) ** -0.25
    pref = 0.5 / np.sqrt(np.pi)
    return pref * q * s_u, -pref / q * s_v


def _asymptotic(z):
    """Scaled pair for |z| >= R_ASYMPTOTIC, any argument."""
    z = np.asarray(z, dtype=complex)
    z = np.where((z.imag == 0) & (z.real < 0), z.real + 0j, z)
    flip = z.imag < 0
    zz = np.where(flip, np.conj(z), z)            # upper half-plane (incl. axis)
    ai = np.empty_like(zz)
    aip = np.empty_like(zz)
    inner = np.angle(zz) <= 2 * np.pi / 3
    if inner.any():
        ai[inner], aip[inner] = _asymptotic_sector(zz[inner])
    outer = ~inner
    if outer.any():
        zo = zz[outer]
        zeta = zeta_of(zo)
        a1, d1 = _asymptotic_sector(_OMEGA * zo)        # zeta(w z) = zeta(z)
        a2, d2 = _asymptotic_sector(_OMEGA ** 2 * zo)   # zeta(w^2 z) = -zeta(z)
        e2 = np.exp(2 * zeta)
        ai[outer] = -_OMEGA * a1 - _OMEGA ** 2 * a2 * e2
        aip[outer] = -_OMEGA ** 2 * d1 - _OMEGA * d2 * e2
    return np.where(flip, np.conj(ai), ai), np.where(flip, np.conj(aip), aip)


def _continued(z):
    """Unscaled pair in the annulus R_SERIES < |z| < R_ASYMPTOTIC."""
    z = np.asarray(z, dtype=complex)
    ang = np.angle(z)
    r = np.abs(z)
    unit = np.exp(1j * ang)
    inward = np.abs(ang) <= np.pi / 3
    start_r = np.where(inward, R_ASYMPTOTIC, R_SERIES)
    start = start_r * unit
    u = np.empty_like(z)
    up = np.empty_like(z)
    if inward.any():
        s_ai, s_aip = _asymptotic(start[inward])
        e = np.exp(-zeta_of(start[inward]))
        u[inward], up[inward] = s_ai * e, s_aip * e
    if (~inward).any():
        u[~inward], up[~inward] = _series(start[~inward])
    nsteps = int(np.ceil(np.max(np.abs(r - start_r)) / _STEP)) if z.size else 0
    nsteps = max(nsteps, 1)
    h = (z - start) / nsteps
    a = start.copy()
    for _ in range(nsteps):
        u, up = _taylor_step(a, h, u, up)
        a = a + h
    return u, up


def airy_scaled(z):
    """(Ai(z) e^zeta, Ai'(z) e^zeta, zeta) with zeta = 2/3 z^(3/2) principal."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    zeta = zeta_of(z)
    r = np.abs(z)
    small = r <= R_SERIES
    large = r >= R_ASYMPTOTIC
    mid = ~(small | large)
    if small.any():
        a, d = _series(z[small])
        e = np.exp(zeta[small])
        ai[small], aip[small] = a * e, d * e
    if mid.any():
        a, d = _continued(z[mid])
        e = np.exp(zeta[mid])
        ai[mid], aip[mid] = a * e, d * e
    if large.any():
        ai[large], aip[large] = _asymptotic(z[large])
    if scalar:
        return complex(ai[0]), complex(aip[0]), complex(zeta[0])
    return ai, aip, zeta


#: |Re zeta| beyond which the unscaled value is returned in scaled form
_EXP_LIMIT = 690.0


def airy_eval(z):
    """Ai(z) and Ai'(z) for a single complex z.

    Returns an :class:`AiryValue`; when ``|Re zeta|`` is too large for
    ``exp(-zeta)`` to be represented the values stay scaled and
    ``log_scale = -zeta`` records the factor.
    """
    ai, aip, zeta = airy_scaled(complex(z))
    if abs(zeta.real) > _EXP_LIMIT:
        return AiryValue(ai, aip, -zeta)
    e = np.exp(-zeta)
    return AiryValue(complex(ai * e), complex(aip * e), 0.0)


def airy(z):
    """Vectorized unscaled (Ai, Ai'); callers must keep |Re zeta| moderate."""
    ai, aip, zeta = airy_scaled(z)
    e = np.exp(-zeta)
    return ai * e, aip * e
