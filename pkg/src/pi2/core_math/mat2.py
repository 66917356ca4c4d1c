"""2x2 complex matrices stored as numpy arrays of shape (..., 2, 2)."""

import numpy as np

I2 = np.eye(2, dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
#: The jump on the negative axis shared by Psi, Phi, M and P^(inf).
J_CUT = np.array([[0, 1], [-1, 0]], dtype=complex)
#: N = 2^(-1/2) [[1, 1], [-1, 1]] exp(-i pi sigma3 / 4)
N_MATRIX = np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2) @ np.diag(
    [np.exp(-0.25j * np.pi), np.exp(0.25j * np.pi)])
N_INV = np.linalg.inv(N_MATRIX)


def mat2(a11, a12, a21, a22):
    """Stack entries (scalars or broadcastable arrays) into (..., 2, 2)."""
    a11, a12, a21, a22 = np.broadcast_arrays(*(np.asarray(a, dtype=complex)
                                               for a in (a11, a12, a21, a22)))
    out = np.empty(a11.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a11
    out[..., 0, 1] = a12
    out[..., 1, 0] = a21
    out[..., 1, 1] = a22
    return out


def mat2_mul(A, B):
    return np.matmul(A, B)


def det2(A):
    A = np.asarray(A)
    return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]


def inv2(A):
    """Inverse through the adjugate; exact in structure for unimodular input."""
    A = np.asarray(A, dtype=complex)
    d = det2(A)
    return mat2(A[..., 1, 1], -A[..., 0, 1], -A[..., 1, 0], A[..., 0, 0]) / d[..., None, None]


def diag_power(d1, d2):
    """diag(d1, d2) for broadcastable arrays; the carrier of a^(sigma3 * p)."""
    z = np.zeros(np.broadcast(np.asarray(d1), np.asarray(d2)).shape)
    return mat2(d1, z, z, d2)


def upper(a):
    """[[1, a], [0, 1]]"""
    a = np.asarray(a, dtype=complex)
    return mat2(1.0, a, 0.0, 1.0)


def lower(a):
    """[[1, 0], [a, 1]]"""
    a = np.asarray(a, dtype=complex)
    return mat2(1.0, 0.0, a, 1.0)


def opnorm(A):
    """Spectral norm of each matrix in a stack."""
    return np.linalg.norm(np.asarray(A), ord=2, axis=(-2, -1))


def is_finite(A):
    return bool(np.all(np.isfinite(np.asarray(A))))
