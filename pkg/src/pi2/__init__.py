"""Numerical solver for the real pole-free solution of the P_I^2 equation.

    x = T*y - (y**3/6 + (y_x**2 + 2*y*y_xx)/24 + y_xxxx/240)

Two independent engines compute y(x, T):

* :mod:`pi2.ode_engine` solves the fourth-order ODE as a two-point boundary
  value problem with asymptotic boundary data;
* :mod:`pi2.rh_engine` solves the small-norm Riemann-Hilbert problem left over
  after steepest descent and extracts y from its first moment.

:mod:`pi2.asymptotics` holds the phase functions and the leading-order law
``y ~ z0 |x|^(1/3) / 2``; :mod:`pi2.lax` holds the Lax pair and the
compatibility oracle.
"""

__version__ = "0.1.0"
