"""Fractional powers with an explicit branch cut.

Every fractional power in the package goes through :class:`BranchedPower`
so that the cut placement is visible at the call site.  The cut is the ray
``base_point + t * exp(i * cut_direction)``, ``t >= 0``; arguments of
``zeta - base_point`` are measured in ``(cut_direction - 2 pi, cut_direction]``.
With ``cut_direction = pi`` this is the principal branch.

On the cut itself a *side* must be given.  ``side=+1`` is the limit taken
from arguments just below ``cut_direction`` (for the principal branch: from
the upper half-plane), ``side=-1`` the limit from the other side.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class BranchCutError(ValueError):
    pass


#: Relative distance to the cut below which evaluation needs an explicit side.
CUT_TOL = 1e-14


@dataclass(frozen=True)
class BranchedPower:
    base_point: complex = 0.0
    exponent: Fraction = Fraction(1, 2)
    cut_direction: float = np.pi

    def __post_init__(self):
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if not -np.pi < self.cut_direction <= np.pi:
            raise ValueError("cut_direction must lie in (-pi, pi]")

    def __call__(self, zeta, side=None):
        return self.eval(zeta, side)

    def eval(self, zeta, side=None):
        d = np.asarray(zeta, dtype=complex) - self.base_point
        r = np.abs(d)
        # rotate so the cut lies on the positive real axis
        w = d * np.exp(-1j * self.cut_direction)
        phi = np.angle(w)
        on_cut = (w.real > 0) & (np.abs(w.imag) <= CUT_TOL * r)
        psi = np.where(phi > 0, phi - 2 * np.pi, phi)
        if np.any(on_cut):
            if side is None:
                raise BranchCutError("on branch cut")
            psi = np.where(on_cut, 0.0 if side > 0 else -2 * np.pi, psi)
        arg = psi + self.cut_direction
        e = float(self.exponent)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, r ** e * np.exp(1j * e * arg), 0.0 if e > 0 else np.inf)
        return out if out.ndim else complex(out)

    def jump_factor(self):
        """Ratio (value on + side)/(value on - side) across the cut."""
        return np.exp(2j * np.pi * float(self.exponent))


def principal_power(zeta, exponent, base_point=0.0, side=None):
    """Shorthand for the principal-branch power (cut along (-inf, base_point])."""
    return BranchedPower(base_point, Fraction(exponent), np.pi).eval(zeta, side)
