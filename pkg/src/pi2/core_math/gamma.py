"""Gamma function and the Airy asymptotic coefficients s_k, t_k."""

import math
from dataclasses import dataclass
from fractions import Fraction

# Lanczos coefficients, g = 7, n = 9 (Godfrey's set)
_LANCZOS_G = 7
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x):
    """Gamma function for real x (reflection below 1/2)."""
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1 - x))
    x -= 1
    a = _LANCZOS_C[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, _LANCZOS_G + 2):
        a += _LANCZOS_C[i] / (x + i)
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


def log_gamma(x):
    if x < 0.5:
        return math.log(math.pi / abs(math.sin(math.pi * x))) - log_gamma(1 - x)
    x -= 1
    a = _LANCZOS_C[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, _LANCZOS_G + 2):
        a += _LANCZOS_C[i] / (x + i)
    return 0.5 * math.log(2 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(a)


@dataclass(frozen=True)
class AiryCoeffs:
    k: int
    s_k: float
    t_k: float


def airy_coeffs(k):
    """s_k = Gamma(3k+1/2) / (36^k k! Gamma(k+1/2)),  t_k = -(6k+1)/(6k-1) s_k."""
    if int(k) != k or k < 1:
        raise ValueError("airy_coeffs requires an integer k >= 1")
    k = int(k)
    if k <= 40:
        s = gamma(3 * k + 0.5) / (36.0 ** k * math.factorial(k) * gamma(k + 0.5))
    else:
        s = math.exp(log_gamma(3 * k + 0.5) - k * math.log(36.0)
                     - log_gamma(k + 1.0) - log_gamma(k + 0.5))
    return AiryCoeffs(k, s, -(6 * k + 1) / (6 * k - 1) * s)


def airy_coeffs_exact(k):
    """(s_k, t_k) as Fractions.

    Gamma(3k+1/2)/Gamma(k+1/2) = prod_{j=k}^{3k-1} (j + 1/2).
    """
    if int(k) != k or k < 1:
        raise ValueError("airy_coeffs requires an integer k >= 1")
    ratio = Fraction(1)
    for j in range(k, 3 * k):
        ratio *= Fraction(2 * j + 1, 2)
    s = ratio / (36 ** k * math.factorial(k))
    return s, -Fraction(6 * k + 1, 6 * k - 1) * s
