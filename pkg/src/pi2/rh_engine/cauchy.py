"""Boundary values of the Cauchy transform on a panelled contour.

``cauchy_minus_matrix`` returns K with ``(C_- u)(z_i) ~ sum_j K_ij u_j`` where

    (C_- u)(z) = lim_{z' -> z from the right} 1/(2 pi i) int u(s) ds / (s - z').

Far panels use the plain Gauss rule.  For targets near a panel or on it the
weights come from product integration (Helsing and Ojala): the density is
interpolated by a polynomial in the panel's affine coordinate tau, and the
integrals of tau^k / (tau - tau0) follow from a recurrence started at
p_0 = log((1 - tau0)/(-1 - tau0)).  On the panel itself p_0 is the principal
value minus i pi, which selects the right-hand boundary value.
"""

import numpy as np

#: |tau| below which a target counts as near a panel
NEAR = 2.0


def _p0_offpanel(tau0):
    return np.log((1.0 - tau0) / (-1.0 - tau0))


def _p0_onpanel(tau0, tangent):
    """Principal value of int dtau/(tau - tau0) along the panel through tau0, minus i pi."""
    mod = np.log(np.abs((1.0 - tau0) / (1.0 + tau0)))
    ang = np.angle((1.0 - tau0) / tangent) + np.angle(-tangent / (-1.0 - tau0))
    return mod + 1j * ang - 1j * np.pi


def _moments(tau0, p0, n):
    p = np.empty((n, tau0.size), dtype=complex)
    p[0] = p0
    for k in range(n - 1):
        p[k + 1] = tau0 * p[k] + (1.0 - (-1.0) ** (k + 1)) / (k + 1)
    return p


def cauchy_minus_matrix(panels):
    """Dense Nystrom matrix of C_- on the nodes of ``panels`` (in order)."""
    z = np.concatenate([p.z for p in panels])
    dz = np.concatenate([p.dz for p in panels])
    N = z.size
    with np.errstate(divide="ignore", invalid="ignore"):
        K = dz[None, :] / (z[None, :] - z[:, None])
    start = 0
    for p in panels:
        n = p.z.size
        cols = slice(start, start + n)
        half = 0.5 * (p.b - p.a)
        mid = 0.5 * (p.a + p.b)
        tau_nodes = (p.z - mid) / half
        tau = (z - mid) / half
        near = np.abs(tau) < NEAR
        near[cols] = True
        idx = np.nonzero(near)[0]
        own = (idx >= start) & (idx < start + n)
        p0 = np.empty(idx.size, dtype=complex)
        p0[~own] = _p0_offpanel(tau[idx[~own]])
        tangent = p.dz / half
        tangent = tangent / np.abs(tangent)
        p0[own] = _p0_onpanel(tau[idx[own]], tangent[idx[own] - start])
        P = _moments(tau[idx], p0, n)
        V = np.vander(tau_nodes, n, increasing=True)     # V[j, k] = tau_j^k
        lam = np.linalg.solve(V.T, P)                     # (n, len(idx))
        K[idx, cols] = lam.T
        start += n
    return K / (2j * np.pi)
