"""Real roots of a real cubic: Cardano/trigonometric classification, Newton polish."""

import math


def _polish(coeffs, r, steps=2):
    a3, a2, a1, a0 = coeffs
    for _ in range(steps):
        f = ((a3 * r + a2) * r + a1) * r + a0
        df = (3 * a3 * r + 2 * a2) * r + a1
        if df == 0:
            break
        step = f / df
        if not math.isfinite(step):
            break
        r_new = r - step
        f_new = ((a3 * r_new + a2) * r_new + a1) * r_new + a0
        if abs(f_new) > abs(f):
            break
        r = r_new
    return r


def cubic_discriminant(a3, a2, a1, a0):
    """Positive: three distinct real roots; negative: one real root."""
    return (18 * a3 * a2 * a1 * a0 - 4 * a2 ** 3 * a0 + a2 ** 2 * a1 ** 2
            - 4 * a3 * a1 ** 3 - 27 * a3 ** 2 * a0 ** 2)


def cubic_real_roots(a3, a2, a1, a0):
    """All real roots of a3 r^3 + a2 r^2 + a1 r + a0, increasing.

    Repeated roots are reported once per multiplicity that survives
    rounding; complex-conjugate pairs are omitted.
    """
    if a3 == 0 or not math.isfinite(a3):
        raise ValueError("not a cubic")
    b, c, d = a2 / a3, a1 / a3, a0 / a3
    shift = -b / 3
    # depressed cubic t^3 + p t + q, r = t + shift
    p = c - b * b / 3
    q = 2 * b ** 3 / 27 - b * c / 3 + d
    scale = max(abs(p) ** 0.5, abs(q) ** (1 / 3), 1e-300)
    disc = -(4 * p ** 3 + 27 * q * q)
    if p == 0 and q == 0:
        roots = [0.0, 0.0, 0.0]
    elif disc > 1e-12 * scale ** 6:
        m = 2 * math.sqrt(-p / 3)
        arg = max(-1.0, min(1.0, 3 * q / (p * m)))
        theta = math.acos(arg) / 3
        roots = [m * math.cos(theta - 2 * math.pi * k / 3) for k in range(3)]
    elif disc < -1e-12 * scale ** 6 or p == 0:
        s = math.sqrt(max(q * q / 4 + p ** 3 / 27, 0.0))
        u = math.copysign(abs(-q / 2 - math.copysign(s, q)) ** (1 / 3), -q / 2 - math.copysign(s, q))
        roots = [u - p / (3 * u) if u != 0 else 0.0]
    else:
        # double root: t = 3q/p (simple) and -3q/(2p) (double)
        roots = [3 * q / p, -3 * q / (2 * p), -3 * q / (2 * p)]
    coeffs = (a3, a2, a1, a0)
    return sorted(_polish(coeffs, t + shift) for t in roots)


def cubic_residual(a3, a2, a1, a0, r):
    return abs(((a3 * r + a2) * r + a1) * r + a0)
