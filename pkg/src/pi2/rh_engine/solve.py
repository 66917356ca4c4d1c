"""Solution of the small-norm problem for R and extraction of y.

R = I + C(R_- (v_R - I)) on the contour; the boundary values satisfy

    mu = I + C_-(mu (v_R - I)),   mu = R_-,

solved either by Neumann iteration (mu_0 = I) or densely.  The first moment
is ``R_1 = -1/(2 pi i) int mu (v_R - I) ds`` and

    y = 1/2 z0 |x|^(1/3) + 2 |x|^(1/3) R_1[0, 0] - |x|^(2/3) R_1[0, 1]^2.
"""

import json
import logging
from dataclasses import dataclass

import numpy as np

from ..asymptotics import solve_z0
from ..core_math.mat2 import opnorm
from .cauchy import cauchy_minus_matrix
from .contour import build_contour
from .parametrix import circle_jump, exterior_jump

log = logging.getLogger(__name__)


class IllConditioned(RuntimeError):
    pass


class NonrealExtraction(ValueError):
    pass


@dataclass(frozen=True)
class RHConfig:
    delta: float = 1.0
    neumann_order: int = 2
    dense: bool = False
    x_min: float = 10.0
    nodes_per_panel: int = 16
    panels_per_arc: int = 6
    levels: int = 3
    trunc_tol: float = 1e-16
    #: evaluation of the Airy model on the circle: "auto", "exact" or "series"
    model: str = "auto"
    max_condition: float = 1e12

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.neumann_order < 0:
            raise ValueError("neumann_order must be >= 0")
        if self.x_min <= 0:
            raise ValueError("x_min must be positive")
        if self.model not in ("auto", "exact", "series"):
            raise ValueError(f"unknown model evaluation {self.model!r}")


@dataclass(frozen=True)
class RMoments:
    R1: np.ndarray
    x: float
    T: float
    neumann_order: int
    est_error: float


@dataclass(frozen=True)
class RHResult:
    """Everything one evaluation produces."""
    x: float
    T: float
    y: float
    moments: RMoments
    contour: object
    max_jump_deviation: float

    def to_json(self):
        R1 = self.moments.R1
        rec = {
            "x": self.x, "T": self.T, "sigma": self.contour.sigma,
            "delta": self.contour.delta, "panel_count": self.contour.panel_count,
            "max_jump_deviation": self.max_jump_deviation,
            "R1": [[[float(R1[i, j].real), float(R1[i, j].imag)] for j in range(2)]
                   for i in range(2)],
            "y": self.y, "est_error": self.moments.est_error,
        }
        return json.dumps(rec, sort_keys=True)


def jump_deviation(contour, G, model="auto"):
    """v_R - I at every node of the contour, shape (N, 2, 2)."""
    out = []
    for p in contour.panels:
        if p.component == "circle":
            out.append(circle_jump(p.z, G, contour.sigma, model))
        else:
            out.append(exterior_jump(p.z, G, p.component))
    return np.concatenate(out)


def _moment(mu, D, dz):
    return -np.einsum("j,jab,jbc->ac", dz, mu, D) / (2j * np.pi)


def _neumann(K, D, dz, order):
    """Moments of the Neumann iterates mu_0 .. mu_(order+1)."""
    n = D.shape[0]
    mu = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    moments = [_moment(mu, D, dz)]
    for _ in range(order + 1):
        mu = np.eye(2) + np.einsum("ij,jab->iab", K, mu @ D)
        moments.append(_moment(mu, D, dz))
    return moments


def _dense(K, D, max_condition):
    """Solve mu - C_-(mu D) = I; rows of mu decouple."""
    n = D.shape[0]
    # A[(i, b), (j, a)] = delta_ij delta_ab - K_ij D_j[a, b]
    A = np.eye(2 * n, dtype=complex) - np.einsum("ij,jab->ibja", K, D).reshape(2 * n, 2 * n)
    cond = np.linalg.cond(A)
    if not cond <= max_condition:
        raise IllConditioned(f"discretized operator ill-conditioned (cond = {cond:.3e})")
    rhs = np.zeros((2 * n, 2), dtype=complex)
    rhs[0::2, 0] = 1.0
    rhs[1::2, 1] = 1.0
    sol = np.linalg.solve(A, rhs)           # column r holds row r of mu
    return np.stack([sol[0::2].T, sol[1::2].T], axis=-1).transpose(1, 0, 2)


def solve_R(x, T, cfg=RHConfig(), G=None, contour=None):
    """First moment of R for (x, T); returns (RMoments, contour, max ||v_R - I||)."""
    if abs(x) < cfg.x_min:
        raise ValueError(f"|x| = {abs(x)} is below x_min = {cfg.x_min}")
    if G is None:
        G = solve_z0(x, T)
    if contour is None:
        contour = build_contour(G, cfg.delta, cfg.nodes_per_panel, cfg.panels_per_arc,
                                cfg.levels, cfg.trunc_tol)
    D = jump_deviation(contour, G, cfg.model)
    dz = contour.weights()
    K = cauchy_minus_matrix(contour.panels)
    if cfg.dense:
        mu = _dense(K, D, cfg.max_condition)
        R1 = _moment(mu, D, dz)
        # one more fixed-point sweep measures how well mu solves the discrete equation
        mu2 = np.eye(2) + np.einsum("ij,jab->iab", K, mu @ D)
        est = float(np.max(np.abs(_moment(mu2, D, dz) - R1)))
        order = -1
    else:
        m = _neumann(K, D, dz, cfg.neumann_order)
        R1 = m[cfg.neumann_order]
        nxt = np.max(np.abs(m[-1] - m[-2]))
        prev = np.max(np.abs(m[-2] - m[-3])) if len(m) > 2 else np.inf
        q = min(nxt / prev, 0.5) if prev > 0 else 0.5
        est = float(nxt / (1.0 - q))
        order = cfg.neumann_order
    dev = float(np.max(opnorm(D)))
    log.debug("solve_R x=%g T=%g nodes=%d max|v-I|=%.3e est=%.3e", x, T, D.shape[0], dev, est)
    return RMoments(R1=R1, x=float(x), T=float(T), neumann_order=order, est_error=est), contour, dev


def extract_y(m, G, tol=1e-8):
    """y from the first moment of R; raises NonrealExtraction if y is not real."""
    ax = abs(G.x)
    y = 0.5 * G.z0 * ax ** (1.0 / 3.0) + 2.0 * ax ** (1.0 / 3.0) * m.R1[0, 0] \
        - ax ** (2.0 / 3.0) * m.R1[0, 1] ** 2
    y = complex(y)
    if abs(y.imag) > tol * max(1.0, abs(y.real)):
        raise NonrealExtraction(f"nonreal extraction: Im y = {y.imag:.3e}")
    return y.real


def rh_evaluate(x, T, cfg=RHConfig()):
    """Full evaluation: contour, R-solve and y."""
    G = solve_z0(x, T)
    m, contour, dev = solve_R(x, T, cfg, G=G)
    return RHResult(x=float(x), T=float(T), y=extract_y(m, G), moments=m,
                    contour=contour, max_jump_deviation=dev)
