"""The jump contour of the small-norm problem and its quadrature panels.

The contour consists of the circle of radius delta around z0_hat, traversed
clockwise and split at the four points where the model contour crosses it,
the real ray to the right of the disk (oriented outward) and the two lens
rays ``z0_hat + t exp(+-6 pi i/7)``, ``t >= delta``, oriented toward the disk.
Each smooth piece carries Gauss-Legendre panels, refined dyadically toward
the junction points.
"""

from dataclasses import dataclass, field

import numpy as np

from ..asymptotics import LENS_ANGLE, conformal_f, g_eval, invert_f
from ..core_math.mat2 import opnorm
from .parametrix import exterior_jump


class ContourMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Panel:
    """Gauss-Legendre panel on a smooth arc; ``dz`` are the complex weights."""
    component: str
    a: complex
    b: complex
    z: np.ndarray
    dz: np.ndarray


@dataclass(frozen=True)
class ContourSet:
    x: float
    T: float
    delta: float
    sigma: float
    center: complex
    circle_panels: tuple
    leg_panels: tuple
    truncation_radius: dict
    exit_points: tuple
    interior_legs: dict = field(default_factory=dict)

    @property
    def panels(self):
        return self.circle_panels + self.leg_panels

    @property
    def panel_count(self):
        return len(self.panels)

    def nodes(self):
        return np.concatenate([p.z for p in self.panels])

    def weights(self):
        return np.concatenate([p.dz for p in self.panels])

    def components(self):
        return np.concatenate([[p.component] * len(p.z) for p in self.panels])


_GL_CACHE = {}


def gauss_legendre(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _graded_breaks(lo, hi, pieces, levels, left=True, right=True):
    """Uniform breaks on [lo, hi], then dyadic halving toward the requested ends."""
    br = list(np.linspace(lo, hi, pieces + 1))
    h = (hi - lo) / pieces
    for lev in range(1, levels + 1):
        s = h / 2 ** lev
        if left:
            br.append(lo + s)
        if right:
            br.append(hi - s)
    return np.unique(np.array(br))


def _arc_panels(center, radius, phi_from, phi_to, n, pieces, levels, component):
    """Panels on the arc center + radius e^(i phi), phi running from phi_from to phi_to."""
    t, wt = gauss_legendre(n)
    lo, hi = min(phi_from, phi_to), max(phi_from, phi_to)
    br = _graded_breaks(lo, hi, pieces, levels)
    if phi_from > phi_to:
        br = br[::-1]
    out = []
    for p0, p1 in zip(br[:-1], br[1:]):
        phi = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * t
        z = center + radius * np.exp(1j * phi)
        dz = 1j * radius * np.exp(1j * phi) * 0.5 * (p1 - p0) * wt
        out.append(Panel(component, center + radius * np.exp(1j * p0),
                         center + radius * np.exp(1j * p1), z, dz))
    return out


def _ray_panels(start, direction, t_from, t_to, n, max_len, levels, graded_end, component):
    """Panels on start + t direction for t from t_from to t_to (either order)."""
    t, wt = gauss_legendre(n)
    lo, hi = min(t_from, t_to), max(t_from, t_to)
    pieces = max(1, int(np.ceil((hi - lo) / max_len)))
    br = _graded_breaks(lo, hi, pieces, levels, left=graded_end == "lo", right=graded_end == "hi")
    if t_from > t_to:
        br = br[::-1]
    out = []
    for p0, p1 in zip(br[:-1], br[1:]):
        s = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * t
        out.append(Panel(component, start + p0 * direction, start + p1 * direction,
                         start + s * direction, direction * 0.5 * (p1 - p0) * wt))
    return out


def _truncation(G, center, direction, delta, component, tol, t_cap=40.0):
    """Smallest t >= delta beyond which ||v_R - I|| < tol on the ray (scanned outward)."""
    ts = delta * (1.0 + np.concatenate([[0.0], np.geomspace(1e-3, t_cap / delta, 400)]))
    dev = opnorm(exterior_jump(center + ts * direction, G, component))
    big = np.nonzero(dev >= tol)[0]
    if big.size == 0:
        return delta
    k = big[-1]
    if k == len(ts) - 1:
        raise ContourMismatch(f"jump on the {component} ray does not decay within t <= {t_cap}")
    return float(ts[k + 1])


def _check_signs(G, c, delta, t_cap=40.0, samples=400):
    """Re g < 0 on the lens rays and Re g > 0 on the right ray, outside the disk."""
    t = delta * (1.0 + np.concatenate([[0.0], np.geomspace(1e-3, t_cap / delta, samples)]))
    for comp, direction, sign in (("upper", np.exp(1j * LENS_ANGLE), -1.0),
                                  ("right", 1.0 + 0j, 1.0)):
        re = g_eval(c + t * direction, G).real
        if np.any(sign * re <= 0):
            raise ContourMismatch(f"contour mismatch: Re g has the wrong sign on the {comp} ray")


def build_contour(G, delta=1.0, nodes_per_panel=16, panels_per_arc=6, levels=3,
                  trunc_tol=1e-16, eps0=None, leg_samples=0):
    """Contour for the g-function data G (see :func:`pi2.asymptotics.solve_z0`).

    sigma is fixed by the exit condition: the f-preimage of the ray
    arg w = sigma leaves the disk at z0_hat + delta e^(6 pi i/7).  The
    contour is rejected with :class:`ContourMismatch` when sigma leaves
    (pi/3, pi), when Re g has the wrong sign on an exterior leg, or, if
    ``eps0`` is given, when sigma is farther than 2 eps0 from 6 pi/7.
    ``leg_samples > 0`` also records that many points of each interior leg.
    """
    c = G.z0_hat
    exit_up = c + delta * np.exp(1j * LENS_ANGLE)
    exit_dn = np.conj(exit_up)
    sigma = float(np.angle(conformal_f(exit_up, G)))
    if not np.pi / 3 < sigma < np.pi:
        raise ContourMismatch(f"contour mismatch: sigma = {sigma:.6f} outside (pi/3, pi)")
    if eps0 is not None and not abs(sigma - LENS_ANGLE) < 2 * eps0:
        raise ContourMismatch(f"contour mismatch: sigma = {sigma:.6f} is not within "
                              f"2 eps0 = {2 * eps0:.4f} of 6 pi/7")
    _check_signs(G, c, delta)
    n = nodes_per_panel
    circle = []
    for p0, p1 in ((np.pi, LENS_ANGLE), (LENS_ANGLE, 0.0), (0.0, -LENS_ANGLE),
                   (-LENS_ANGLE, -np.pi)):
        circle += _arc_panels(c, delta, p0, p1, n, panels_per_arc, levels, "circle")
    legs = []
    trunc = {}
    for comp, direction in (("right", 1.0 + 0j), ("upper", np.exp(1j * LENS_ANGLE)),
                            ("lower", np.exp(-1j * LENS_ANGLE))):
        t_max = _truncation(G, c, direction, delta, comp, trunc_tol)
        trunc[comp] = t_max
        if t_max <= delta:
            continue
        if comp == "right":
            legs += _ray_panels(c, direction, delta, t_max, n, 0.5, levels, "lo", comp)
        else:
            legs += _ray_panels(c, direction, t_max, delta, n, 0.5, levels, "lo", comp)
    interior = {}
    if leg_samples:
        rmax = abs(conformal_f(exit_up, G))
        r = np.linspace(0.0, rmax, leg_samples + 1)[1:]
        pts, guess = [], exit_up
        for rr in r[::-1]:
            guess = invert_f(rr * np.exp(1j * sigma), G, guess)
            pts.append(guess)
        up = np.array(pts[::-1])
        interior = {"upper": up, "lower": np.conj(up)}
    return ContourSet(x=G.x, T=G.T, delta=delta, sigma=sigma, center=c,
                      circle_panels=tuple(circle), leg_panels=tuple(legs),
                      truncation_radius=trunc, exit_points=(exit_up, exit_dn),
                      interior_legs=interior)
