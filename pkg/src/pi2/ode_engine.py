"""Boundary-value solve of the fourth-order equation on a window [-L, L].

The equation is written as a first-order system for ``Y = (y, y', y'', y''')``
with

    y'''' = 240 (T y - x) - 40 y^3 - 10 (y'^2 + 2 y y''),

discretized by three-stage Gauss-Legendre collocation (sixth order at the
nodes) on a mesh that is graded towards x = 0 and always contains x = 0.  Value and slope of the
leading-order law ``1/2 z0(x, T) |x|^(1/3)`` are imposed at both ends.  The
discrete system is solved by Newton's method with an analytic sparse
Jacobian and step halving whenever the residual grows.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import spsolve

from .asymptotics import solve_z0
from .lax import Jet4, fourth_derivative_from_equation, pi2_residual

log = logging.getLogger(__name__)


class NoConvergence(RuntimeError):
    """Newton failed; ``best`` holds the best iterate as a SolutionGrid."""

    def __init__(self, message, best=None, residual=math.inf):
        super().__init__(message)
        self.best = best
        self.residual = residual


@dataclass(frozen=True)
class BVPConfig:
    L: float = 20.0
    mesh_density: float = 16.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    damping: float = 1.0
    #: refinement factor at x = 0 relative to the far field
    grading: float = 12.0
    #: length scale over which the refinement decays
    grading_width: float = 2.5
    #: re-mesh once from the computed solution, resolving its local wavenumber
    adaptive: bool = True
    #: nodes per unit wavenumber (per unit mesh density) used by the adaptation
    wavenumber_factor: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not (self.mesh_density > 0 and self.newton_tol > 0 and self.newton_max_iter > 0):
            raise ValueError("mesh density, tolerance and iteration cap must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class SolutionGrid:
    """Nodes with (y, y', y'', y''') per node; fourth derivatives follow from the equation."""
    T: float
    nodes: np.ndarray
    values: np.ndarray
    engine_tag: str = "ode"
    residual_norm: float = math.nan
    boundary_L: float = math.nan
    node_residuals: np.ndarray = field(default=None, repr=False)

    @property
    def y(self):
        return self.values[:, 0]

    @property
    def y_xxxx(self):
        v = self.values
        return fourth_derivative_from_equation(v[:, 0], v[:, 1], v[:, 2], self.nodes, self.T)

    @property
    def jets(self):
        y4 = self.y_xxxx
        return [Jet4(v[0], v[1], v[2], v[3], d4, x, self.T)
                for v, d4, x in zip(self.values, y4, self.nodes)]

    def to_csv(self, metadata=None):
        """CSV with header ``x,y,y_x,y_xx,y_xxx,residual``; floats to 17 significant digits."""
        buf = io.StringIO()
        for k, v in (metadata or {}).items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "y_x", "y_xx", "y_xxx", "residual"])
        res = self.node_residuals if self.node_residuals is not None else np.zeros(len(self.nodes))
        for x, v, r in zip(self.nodes, self.values, res):
            w.writerow([f"{x:.17g}"] + [f"{c:.17g}" for c in v] + [f"{r:.17g}"])
        return buf.getvalue()


# ---------------------------------------------------------------- boundary data

def _leading_with_slope(x, T):
    G = solve_z0(x, T)
    s = G.sgn
    ax = abs(x)
    z = G.z0
    gx = 16.0 * z * T * ax ** (-5.0 / 3.0) * s
    gz = 3.0 * z * z - 24.0 * ax ** (-2.0 / 3.0) * T
    dz = -gx / gz
    y = 0.5 * z * ax ** (1.0 / 3.0)
    dy = 0.5 * dz * ax ** (1.0 / 3.0) + z * s / 6.0 * ax ** (-2.0 / 3.0)
    return y, dy


def boundary_values(L, T):
    """(y(-L), y'(-L), y(L), y'(L)) from 1/2 z0(x, T) |x|^(1/3)."""
    ym, dym = _leading_with_slope(-L, T)
    yp, dyp = _leading_with_slope(L, T)
    return ym, dym, yp, dyp


# ---------------------------------------------------------------- mesh

def make_mesh(L, density, grading=12.0, width=2.5):
    """Nodes on [-L, L], symmetric, containing 0, with local density
    ``density * (1 + (grading - 1) exp(-|x|/width))``."""
    g = grading - 1.0

    def cumulative(x):
        return x + g * width * (1.0 - np.exp(-x / width))

    total = cumulative(L)
    n = max(2, int(math.ceil(density * total)))
    targets = np.linspace(0.0, total, n + 1)
    x = targets.copy()
    for _ in range(60):     # Newton on the monotone map
        x = x - (cumulative(x) - targets) / (1.0 + g * np.exp(-x / width))
    x[0], x[-1] = 0.0, L
    return np.concatenate([-x[:0:-1], x])


def _static_profile(x, grading, width):
    return 1.0 + (grading - 1.0) * np.exp(-np.abs(x) / width)


def mesh_from_density(x, rho):
    """Equidistribute the piecewise-linear density ``rho`` sampled at the sorted
    points ``x`` (which span [-L, L] and contain 0); x = 0 stays a node."""
    halves = []
    for sel in (x <= 0, x >= 0):
        xs, rs = x[sel], rho[sel]
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (rs[1:] + rs[:-1]) * np.diff(xs))])
        n = max(2, int(math.ceil(cum[-1])))
        halves.append(np.interp(np.linspace(0.0, cum[-1], n + 1), cum, xs))
    left, right = halves
    left[-1] = 0.0
    right[0] = 0.0
    return np.concatenate([left[:-1], right])


def local_wavenumber(grid, window=0.5):
    """(|y''''| / max(1, |y|))^(1/4), maximized over a sliding window of half-width ``window``."""
    k = (np.abs(grid.y_xxxx) / np.maximum(1.0, np.abs(grid.y))) ** 0.25
    x = grid.nodes
    lo = np.searchsorted(x, x - window, side="left")
    hi = np.searchsorted(x, x + window, side="right")
    return np.array([k[a:b].max() for a, b in zip(lo, hi)])


def adapted_mesh(grid, cfg):
    """Mesh whose density also resolves the local wavenumber of ``grid``."""
    x = grid.nodes
    base = _static_profile(x, cfg.grading, cfg.grading_width)
    rho = cfg.mesh_density * np.maximum(base, cfg.wavenumber_factor * local_wavenumber(grid))
    return mesh_from_density(x, rho)


# ---------------------------------------------------------------- collocation system

def _rhs(x, Y, T):
    y, y1, y2, y3 = Y[:, 0], Y[:, 1], Y[:, 2], Y[:, 3]
    y4 = 240.0 * (T * y - x) - 40.0 * y ** 3 - 10.0 * (y1 * y1 + 2.0 * y * y2)
    return np.stack([y1, y2, y3, y4], axis=1)


def _rhs_jac(Y, T):
    n = len(Y)
    J = np.zeros((n, 4, 4))
    J[:, 0, 1] = J[:, 1, 2] = J[:, 2, 3] = 1.0
    J[:, 3, 0] = 240.0 * T - 120.0 * Y[:, 0] ** 2 - 20.0 * Y[:, 2]
    J[:, 3, 1] = -20.0 * Y[:, 1]
    J[:, 3, 2] = -20.0 * Y[:, 0]
    return J


_SQ15 = math.sqrt(15.0)
#: Butcher tableau of the three-stage Gauss-Legendre collocation method (order 6)
_C = np.array([0.5 - _SQ15 / 10.0, 0.5, 0.5 + _SQ15 / 10.0])
_A = np.array([[5.0 / 36.0, 2.0 / 9.0 - _SQ15 / 15.0, 5.0 / 36.0 - _SQ15 / 30.0],
               [5.0 / 36.0 + _SQ15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - _SQ15 / 24.0],
               [5.0 / 36.0 + _SQ15 / 30.0, 2.0 / 9.0 + _SQ15 / 15.0, 5.0 / 36.0]])
_B = np.array([5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0])


def _stage_points(nodes):
    h = np.diff(nodes)
    return h, nodes[:-1, None] + _C[None, :] * h[:, None]


def _stage_values(Y, K, h):
    # Z[i, j] = Y_i + h_i sum_l A[j, l] K[i, l]
    return Y[:-1, None, :] + h[:, None, None] * np.einsum("jl,ilk->ijk", _A, K)


def _initial_stages(nodes, Y, T):
    h, xs = _stage_points(nodes)
    Z = Y[:-1, None, :] + _C[None, :, None] * (Y[1:] - Y[:-1])[:, None, :]
    return _rhs(xs.ravel(), Z.reshape(-1, 4), T).reshape(-1, 3, 4)


def _residual(nodes, Y, K, T, bc):
    """Stage equations G, step equations E (per unit length) and boundary rows b."""
    h, xs = _stage_points(nodes)
    Z = _stage_values(Y, K, h)
    G = K - _rhs(xs.ravel(), Z.reshape(-1, 4), T).reshape(K.shape)
    E = (Y[1:] - Y[:-1]) / h[:, None] - np.einsum("j,ijk->ik", _B, K)
    b = np.array([Y[0, 0] - bc[0], Y[0, 1] - bc[1], Y[-1, 0] - bc[2], Y[-1, 1] - bc[3]])
    return G, E, b, Z


def _jacobian(nodes, Y, K, Z, T):
    """Sparse Jacobian; unknowns ordered [Y_0, K_0, Y_1, K_1, ..., Y_last]."""
    n = len(nodes)
    m = n - 1
    h = np.diff(nodes)
    I = np.eye(4)
    Jz = _rhs_jac(Z.reshape(-1, 4), T).reshape(m, 3, 4, 4)
    blk = np.zeros((m, 16, 20))
    for j in range(3):
        rows = slice(4 * j, 4 * j + 4)
        blk[:, rows, 0:4] = -Jz[:, j]
        for l in range(3):
            cols = slice(4 + 4 * l, 8 + 4 * l)
            blk[:, rows, cols] = -(h * _A[j, l])[:, None, None] * Jz[:, j]
            if j == l:
                blk[:, rows, cols] += I
    hinv = (1.0 / h)[:, None, None]
    blk[:, 12:16, 0:4] = -hinv * I
    blk[:, 12:16, 16:20] = hinv * I
    for l in range(3):
        blk[:, 12:16, 4 + 4 * l:8 + 4 * l] = -_B[l] * I
    off = 16 * np.arange(m)[:, None, None]
    r = np.broadcast_to(np.arange(16)[None, :, None] + off, blk.shape)
    c = np.broadcast_to(np.arange(20)[None, None, :] + off, blk.shape)
    size = 16 * m + 4
    last = 16 * m
    rr = np.concatenate([r.ravel(), last + np.arange(4)])
    cc = np.concatenate([c.ravel(), np.array([0, 1, last, last + 1])])
    vv = np.concatenate([blk.ravel(), np.ones(4)])
    return sps.csc_matrix((vv, (rr, cc)), shape=(size, size))


def _unpack(v, n):
    m = n - 1
    body = v[:16 * m].reshape(m, 16)
    Y = np.vstack([body[:, :4], v[16 * m:][None, :]])
    return Y, body[:, 4:].reshape(m, 3, 4)


def _norm(G, E, b):
    return max(np.max(np.abs(G)), np.max(np.abs(E)), np.max(np.abs(b)))


def _node_residuals(G, E):
    """Largest collocation defect of the intervals adjacent to each node."""
    per = np.maximum(np.max(np.abs(G), axis=(1, 2)), np.max(np.abs(E), axis=1))
    out = np.zeros(len(per) + 1)
    out[:-1] = per
    out[1:] = np.maximum(out[1:], per)
    return out


def _make_grid(nodes, Y, T, cfg, G, E):
    res = _node_residuals(G, E)
    grid = SolutionGrid(T=float(T), nodes=nodes, values=Y, residual_norm=0.0,
                        boundary_L=float(cfg.L), node_residuals=res)
    pde = max(abs(pi2_residual(j)) for j in grid.jets)
    return replace(grid, residual_norm=float(max(np.max(res), pde)))


# ---------------------------------------------------------------- initial guess

def initial_guess(nodes, T):
    """1/2 z0(x, T) |x|^(1/3) for |x| >= 1, cubic Hermite blend on [-1, 1]."""
    y = np.empty_like(nodes)
    for k, x in enumerate(nodes):
        if abs(x) >= 1.0:
            y[k] = _leading_with_slope(x, T)[0]
    ym, dm = _leading_with_slope(-1.0, T)
    yp, dp = _leading_with_slope(1.0, T)
    inner = np.abs(nodes) < 1.0
    t = (nodes[inner] + 1.0) / 2.0
    h00, h10 = 2 * t ** 3 - 3 * t ** 2 + 1, t ** 3 - 2 * t ** 2 + t
    h01, h11 = -2 * t ** 3 + 3 * t ** 2, t ** 3 - t ** 2
    y[inner] = h00 * ym + h10 * 2.0 * dm + h01 * yp + h11 * 2.0 * dp
    Y = np.zeros((len(nodes), 4))
    Y[:, 0] = y
    for k in range(1, 4):
        Y[:, k] = np.gradient(Y[:, k - 1], nodes)
    return Y


def _guess_on(nodes, grid):
    """Transfer a previous solution onto new nodes by Hermite interpolation."""
    return np.array([[getattr(jet_at(grid, x), f) for f in ("y", "y_x", "y_xx", "y_xxx")]
                     for x in nodes])


# ---------------------------------------------------------------- Newton

#: residual level treated as converged regardless of monotonicity (rounding floor)
_RESIDUAL_FLOOR = 1e-9

def _start_values(nodes, T, guess):
    if guess is None:
        return initial_guess(nodes, T)
    if isinstance(guess, SolutionGrid):
        if len(guess.nodes) == len(nodes) and np.allclose(guess.nodes, nodes, rtol=0, atol=1e-14):
            return guess.values.copy()
        return _guess_on(nodes, guess)
    return np.asarray(guess, dtype=float).copy()


def solve_bvp(cfg=BVPConfig(), T=0.0, initial_guess_grid=None, nodes=None):
    """Solve on [-cfg.L, cfg.L]; raises :class:`NoConvergence` on failure.

    ``initial_guess_grid`` may be a SolutionGrid (interpolated when its nodes
    differ) or an array of (y, y', y'', y''') rows on ``nodes``.  With
    ``cfg.adaptive`` the problem is solved once more on a mesh refined where
    the solution oscillates quickly.
    """
    if nodes is None:
        nodes = make_mesh(cfg.L, cfg.mesh_density, cfg.grading, cfg.grading_width)
    grid = _newton(nodes, _start_values(nodes, T, initial_guess_grid), T, cfg)
    if cfg.adaptive:
        fine = adapted_mesh(grid, cfg)
        if len(fine) > 1.05 * len(nodes):
            grid = _newton(fine, _guess_on(fine, grid), T, cfg)
    return grid


def _newton(nodes, Y, T, cfg):
    bc = boundary_values(cfg.L, T)
    K = _initial_stages(nodes, Y, T)
    G, E, b, Z = _residual(nodes, Y, K, T, bc)
    res = _norm(G, E, b)
    lam = cfg.damping
    small_steps = 0
    for it in range(cfg.newton_max_iter):
        J = _jacobian(nodes, Y, K, Z, T)
        rhs = -np.concatenate([np.concatenate([G.reshape(-1, 12), E], axis=1).ravel(), b])
        step_y, step_k = _unpack(spsolve(J, rhs), len(nodes))
        if not (np.all(np.isfinite(step_y)) and np.all(np.isfinite(step_k))):
            break
        size = np.max(np.abs(step_y))
        if size <= cfg.newton_tol * max(1.0, np.max(np.abs(Y))):
            Y, K = Y + step_y, K + step_k
            G, E, b, Z = _residual(nodes, Y, K, T, bc)
            res = _norm(G, E, b)
            small_steps += 1
            # a tiny step can still leave a sizable residual (the y'''' row scales
            # like 240 y^2), so also require the residual or a stalled rounding floor
            if res <= cfg.newton_tol or small_steps >= 3:
                return _make_grid(nodes, Y, T, cfg, G, E)
            continue
        lam_try = lam
        while True:
            Y_new, K_new = Y + lam_try * step_y, K + lam_try * step_k
            G_new, E_new, b_new, Z_new = _residual(nodes, Y_new, K_new, T, bc)
            res_new = _norm(G_new, E_new, b_new)
            if np.isfinite(res_new) and (res_new < res or res_new <= _RESIDUAL_FLOOR):
                break
            lam_try *= 0.5
            if lam_try < 1e-6:
                raise NoConvergence(f"no convergence at T={T}: damping exhausted",
                                    _make_grid(nodes, Y, T, cfg, G, E), res)
        Y, K, G, E, b, Z, res = Y_new, K_new, G_new, E_new, b_new, Z_new, res_new
        log.debug("newton it=%d res=%.3e step=%.3e damping=%g", it, res, size, lam_try)
        lam = min(1.0, 2.0 * lam_try)
    raise NoConvergence(f"no convergence at T={T} after {cfg.newton_max_iter} iterations",
                        _make_grid(nodes, Y, T, cfg, G, E), res)


def continuation_in_T(cfg, T_targets, min_step=1e-3, max_step=0.5):
    """Solve at T = 0 and walk to each target in T.

    Intermediate steps use the base mesh without adaptation, a secant
    predictor from the two previous solutions, and a step that grows by half
    after each success and halves after a failure.  Each target is finally
    solved with the full configuration.
    """
    targets = [float(t) for t in T_targets]
    nodes = make_mesh(cfg.L, cfg.mesh_density, cfg.grading, cfg.grading_width)
    quick = replace(cfg, adaptive=False, newton_max_iter=min(cfg.newton_max_iter, 12))
    base = _newton(nodes, initial_guess(nodes, 0.0), 0.0, quick)
    results = {}
    for direction in (1.0, -1.0):
        goals = sorted({t for t in targets if t * direction > 0}, key=abs)
        path = [(0.0, base.values)]
        step = min(max_step, abs(goals[0])) if goals else 0.0
        for goal in goals:
            while path[-1][0] != goal:
                cur_T, cur_Y = path[-1]
                nxt = cur_T + direction * min(step, abs(goal - cur_T))
                if len(path) > 1:
                    prev_T, prev_Y = path[-2]
                    guess = cur_Y + (cur_Y - prev_Y) * (nxt - cur_T) / (cur_T - prev_T)
                else:
                    guess = cur_Y
                try:
                    grid = _newton(nodes, guess.copy(), nxt, quick)
                except NoConvergence as exc:
                    step /= 2.0
                    if step < min_step:
                        raise NoConvergence(f"continuation stalled; last good T={cur_T}",
                                            exc.best, exc.residual) from exc
                    continue
                path.append((nxt, grid.values))
                step = min(max_step, 1.5 * step)
            results[goal] = path[-1][1]
    out = []
    for t in targets:
        Y = base.values if t == 0.0 else results[t]
        out.append(solve_bvp(cfg, t, initial_guess_grid=Y, nodes=nodes))
    return out


# ---------------------------------------------------------------- interpolation

def _fifth_derivative(y, y1, y2, y3, T):
    return 240.0 * (T * y1 - 1.0) - 120.0 * y * y * y1 - 40.0 * y1 * y2 - 20.0 * y * y3


def _quintic_hermite(t, h, p0, d0, s0, p1, d1, s1):
    """Value and derivative of the quintic matching value, first and second derivative."""
    t2, t3, t4, t5 = t * t, t ** 3, t ** 4, t ** 5
    H = [1 - 10 * t3 + 15 * t4 - 6 * t5, t - 6 * t3 + 8 * t4 - 3 * t5,
         0.5 * (t2 - 3 * t3 + 3 * t4 - t5), 10 * t3 - 15 * t4 + 6 * t5,
         -4 * t3 + 7 * t4 - 3 * t5, 0.5 * (t3 - 2 * t4 + t5)]
    return (H[0] * p0 + H[1] * h * d0 + H[2] * h * h * s0
            + H[3] * p1 + H[4] * h * d1 + H[5] * h * h * s1)


def jet_at(grid, x):
    """Jet at x by quintic Hermite interpolation of each of y, y', y'', y'''.

    The needed higher derivatives at the nodes come from the equation and its
    x-derivative; the fourth derivative of the result is again taken from the
    equation, so the returned jet has zero residual by construction.
    """
    nodes = grid.nodes
    if not nodes[0] <= x <= nodes[-1]:
        raise ValueError(f"x={x} outside the window [{nodes[0]}, {nodes[-1]}]")
    k = int(np.searchsorted(nodes, x, side="right")) - 1
    k = min(max(k, 0), len(nodes) - 2)
    x0, x1 = nodes[k], nodes[k + 1]
    h = x1 - x0
    t = (x - x0) / h
    T = grid.T

    def chain(v, xn):
        y, y1, y2, y3 = v
        y4 = fourth_derivative_from_equation(y, y1, y2, xn, T)
        y5 = _fifth_derivative(y, y1, y2, y3, T)
        return [y, y1, y2, y3, y4, y5]

    a = chain(grid.values[k], x0)
    b = chain(grid.values[k + 1], x1)
    vals = [_quintic_hermite(t, h, a[i], a[i + 1], a[i + 2], b[i], b[i + 1], b[i + 2])
            for i in range(4)]
    if t == 0.0:
        vals = list(grid.values[k])
    y4 = fourth_derivative_from_equation(vals[0], vals[1], vals[2], x, T)
    return Jet4(vals[0], vals[1], vals[2], vals[3], y4, float(x), T)
