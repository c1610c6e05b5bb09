"""Heat-equation counterpart: Gaussian convolution of the same initial data.

f(x,t) = (4 pi t)^{-1/2} int f0(y) exp(-(x-y)^2/4t) dy.  Shares the
stabilized quadrature with the Burgers evaluator (the phase is the pure
Gaussian one), and provides the continuous long-time profile
(kappa/sqrt(4 pi)) int |y|^-alpha exp(-(z-y)^2/4) dy for comparison with
the discontinuous Burgers profile.
"""
from __future__ import annotations

import math


import numpy as np
from numpy.polynomial.hermite import hermval
from scipy.special import gamma

from .initial_data import FamilySpec, InitialData, make_family, UnsupportedOrderError
from .quadrature import PhysicalPhase, adaptive_quadrature, ratio_moment
from .burgers import SupNormResult, heat_quotient_batch, scan_max

_ZERO = make_family(FamilySpec("Zero"))


def heat_eval(data: InitialData, x: float, t: float, rel_tol: float = 1e-9) -> float:
    """Heat solution at (x, t); t = 0 returns f0(x)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return float(data.value(x))
    phase = PhysicalPhase(_ZERO, float(x), float(t))
    return ratio_moment(lambda y: data.value(y), phase, rel_tol)


def heat_eval_batch(data: InitialData, xs, t: float, rel_tol: float = 1e-9):
    if t == 0:
        return data.value(np.asarray(xs, dtype=float))
    return heat_quotient_batch(data, _ZERO, xs, t, rel_tol)


def heat_derivative(data: InitialData, x: float, t: float, n: int, k: int,
                    rel_tol: float = 1e-9) -> float:
    """d_t^n d_x^k of the heat solution, n + k <= 3.

    Every t derivative is two x derivatives of the kernel, so the integrand
    weight is a Hermite-polynomial factor of degree 2n + k."""
    if n < 0 or k < 0:
        raise ValueError("orders must be nonnegative")
    if n + k > 3:
        raise UnsupportedOrderError(f"n + k = {n + k} > 3 not supported")
    m = 2 * n + k
    if m == 0:
        return heat_eval(data, x, t, rel_tol)
    coeffs = [0.0] * m + [1.0]
    root_t2 = 2.0 * math.sqrt(t)

    def weight(y):
        return hermval((x - y) / root_t2, coeffs) * data.value(y)

    phase = PhysicalPhase(_ZERO, float(x), float(t))
    r = ratio_moment(weight, phase, rel_tol)
    return (-1.0 / root_t2) ** m * r


def heat_limit_profile(z: float, kappa: float, alpha: float,
                       rel_tol: float = 1e-9) -> float:
    """(kappa / sqrt(4 pi)) int |y|^-alpha exp(-(z-y)^2/4) dy.

    The integrable singularity at y = 0 is flattened exactly by the
    substitution u = |y|^{1-alpha} on the panels touching 0."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    z = float(z)
    reach = abs(z) + 14.0
    q = 1.0 / (1.0 - alpha)

    def outer(y):
        return np.abs(y) ** (-alpha) * np.exp(-((z - y) ** 2) / 4.0)

    def sing_pos(u):
        y = u ** q
        return np.exp(-((z - y) ** 2) / 4.0) * q

    def sing_neg(u):
        y = -(u ** q)
        return np.exp(-((z - y) ** 2) / 4.0) * q

    def edges_between(a, b):
        pts = {a, b}
        if a < z < b:
            pts.update([max(a, z - 2.0), min(b, z + 2.0), z])
        return sorted(pts)

    total = 0.0
    err = 0.0
    for fn, edges in (
        (sing_pos, np.linspace(0.0, 1.0, 5)),
        (sing_neg, np.linspace(0.0, 1.0, 5)),
        (outer, edges_between(1.0, reach)),
        (outer, edges_between(-reach, -1.0)),
    ):
        v, e, _ = adaptive_quadrature(fn, np.asarray(edges, dtype=float), rel_tol)
        total += v
        err += e
    # beyond the truncation |y|^-alpha <= reach^-alpha, leaving a pure
    # Gaussian tail; it is far below the tolerance and only checked here
    tail = reach ** (-alpha) * math.sqrt(math.pi) * math.erfc((reach - abs(z)) / 2.0)
    assert tail <= rel_tol * max(total, 1e-300) + 1e-300
    return kappa / math.sqrt(4.0 * math.pi) * total


def heat_profile_center_exact(kappa: float, alpha: float) -> float:
    """Closed form of the profile at z = 0 via the Gamma function."""
    return kappa * 2.0 ** (-alpha) * gamma((1.0 - alpha) / 2.0) / math.sqrt(math.pi)


def heat_sup_norm(data: InitialData, t: float, Z: float = 10.0,
                  n_coarse: int = 129, rel_tol: float = 1e-9,
                  threads: int = 1) -> SupNormResult:
    """sup over |x| <= Z sqrt(t) of |heat solution|."""
    if n_coarse < 64:
        raise ValueError("n_coarse must be at least 64")
    m = math.sqrt(t)
    v, ax = scan_max(lambda x: abs(heat_eval(data, x, t, rel_tol)),
                     -Z * m, Z * m, n_coarse, threads)
    return SupNormResult(value=v, argmax_x=ax, t=t, search_window=(Z, n_coarse))
