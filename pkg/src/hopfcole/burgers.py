"""The viscous Burgers field f(x, t) through the Hopf-Cole quotient.

f(x,t) = int f0(y) e^{H(y)} dy / int e^{H(y)} dy with
H(y) = -(x-y)^2/(4t) - (1/2) int_0^y f0.  Space and time derivatives are
exact quotient-rule expansions over the weight algebra, so the PDE residual
d_t f - d_x^2 f + f d_x f is a strong end-to-end self test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.optimize import minimize_scalar

from .initial_data import InitialData, UnsupportedOrderError
from .quadrature import (
    MomentWeight,
    PhysicalPhase,
    derive_x,
    derive_t,
    ratio_moment,
    ratio_moments,
)

_U = MomentWeight.unit()
_F0 = MomentWeight.f0()
_DX_F0 = derive_x(_F0)
_DT_F0 = derive_t(_F0)
_DX_U = derive_x(_U)
_DT_U = derive_t(_U)
_DX2_F0 = derive_x(_DX_F0)
_DX2_U = derive_x(_DX_U)


def eval(data: InitialData, x: float, t: float, rel_tol: float = 1e-9) -> float:
    """Solution value f(x, t); t = 0 returns f0(x) directly."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return float(data.value(x))
    return ratio_moments([_F0], PhysicalPhase(data, float(x), float(t)), rel_tol)[0]


def derivative_fields(data: InitialData, x: float, t: float,
                      rel_tol: float = 1e-10) -> dict:
    """f, f_x, f_t, f_xx at one point from a single shared quadrature.

    Uses d(A_g/A_1) = (A_{Dg} - (A_g/A_1) A_{D1}) / A_1 recursively with the
    x/t derivation maps of the weight algebra."""
    phase = PhysicalPhase(data, float(x), float(t))
    r = ratio_moments(
        [_F0, _DX_F0, _DT_F0, _DX_U, _DT_U, _DX2_F0, _DX2_U], phase, rel_tol
    )
    f = r[0]
    fx = r[1] - f * r[3]
    ft = r[2] - f * r[4]
    fxx = r[5] - r[1] * r[3] - fx * r[3] - f * (r[6] - r[3] ** 2)
    return {"f": f, "f_x": fx, "f_t": ft, "f_xx": fxx}


def _richardson_1(fn, v, h):
    def d(hh):
        return (fn(v + hh) - fn(v - hh)) / (2.0 * hh)

    return (4.0 * d(0.5 * h) - d(h)) / 3.0


def _richardson_2(fn, v, h):
    f0 = fn(v)

    def s(hh):
        return (fn(v + hh) - 2.0 * f0 + fn(v - hh)) / (hh * hh)

    return (4.0 * s(0.5 * h) - s(h)) / 3.0


def eval_derivative(data: InitialData, x: float, t: float, n: int, k: int,
                    rel_tol: float = 1e-10) -> float:
    """d_t^n d_x^k f(x, t).

    Orders 2n + k <= 2 are exact (weight algebra); 2n + k in {3, 4} fall
    back to Richardson finite differences of the exact lower fields."""
    if n < 0 or k < 0:
        raise ValueError("orders must be nonnegative")
    order = 2 * n + k
    if order > 4:
        raise UnsupportedOrderError(f"2n + k = {order} > 4 not supported")
    if order <= 2:
        fields = derivative_fields(data, x, t, rel_tol)
        return fields[{(0, 0): "f", (0, 1): "f_x", (1, 0): "f_t", (0, 2): "f_xx"}[(n, k)]]
    hx = 0.05 * max(1.0, math.sqrt(t))
    ht = 0.02 * t
    if (n, k) == (0, 3):
        return _richardson_1(lambda v: derivative_fields(data, v, t, rel_tol)["f_xx"], x, hx)
    if (n, k) == (0, 4):
        return _richardson_2(lambda v: derivative_fields(data, v, t, rel_tol)["f_xx"], x, hx)
    if (n, k) == (1, 1):
        return _richardson_1(lambda v: derivative_fields(data, x, v, rel_tol)["f_x"], t, ht)
    if (n, k) == (1, 2):
        return _richardson_1(lambda v: derivative_fields(data, x, v, rel_tol)["f_xx"], t, ht)
    if (n, k) == (2, 0):
        return _richardson_1(lambda v: derivative_fields(data, x, v, rel_tol)["f_t"], t, ht)
    raise UnsupportedOrderError(f"(n, k) = ({n}, {k}) not supported")


def pde_residual(data: InitialData, x: float, t: float,
                 rel_tol: float = 1e-10) -> float:
    """d_t f - d_x^2 f + f d_x f with exact-mode derivatives.

    Analytically zero; numerically bounded by the quadrature budget."""
    fields = derivative_fields(data, x, t, rel_tol)
    return fields["f_t"] - fields["f_xx"] + fields["f"] * fields["f_x"]


# ---------------------------------------------------------------------------
# batch evaluation (single-peak fast path)


def eval_batch(data: InitialData, xs, t: float, rel_tol: float = 1e-9):
    """f(x, t) for an array of x at one t.

    When 1 + t min(f0') > 0 the phase has a unique maximum for every x and
    the whole batch is handled by vectorized bisection plus fixed peak-local
    panels; otherwise (or where the error estimate misses the target) each
    point falls back to the adaptive path."""
    xs = np.asarray(xs, dtype=float)
    if t == 0:
        return data.value(xs)
    single_peak = 1.0 + t * data.derivative_min() > 0.05
    if not single_peak:
        return np.asarray([eval(data, float(x), t, rel_tol) for x in xs])

    out = np.empty_like(xs)
    for lo in range(0, xs.size, 1024):
        blk = xs[lo:lo + 1024]
        vals, ok = _batch_single_peak(data, data, blk, t, rel_tol)
        bad = ~ok
        if np.any(bad):
            vals[bad] = [eval(data, float(x), t, rel_tol) for x in blk[bad]]
        out[lo:lo + 1024] = vals
    return out


def heat_quotient_batch(weight_data: InitialData, zero_data: InitialData,
                        xs, t: float, rel_tol: float = 1e-9):
    """Batched int w e^G / int e^G for the pure Gaussian phase."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty_like(xs)
    for lo in range(0, xs.size, 1024):
        blk = xs[lo:lo + 1024]
        vals, ok = _batch_single_peak(zero_data, weight_data, blk, t, rel_tol)
        if np.any(~ok):
            for j in np.nonzero(~ok)[0]:
                ph = PhysicalPhase(zero_data, float(blk[j]), t)
                vals[j] = ratio_moment(lambda y: weight_data.value(y), ph, rel_tol)
        out[lo:lo + 1024] = vals
    return out


_S_EDGES = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 2.75, 3.5, 4.5, 5.5, 7.0, 8.5, 10.5])
_GLB = np.polynomial.legendre.leggauss(21)
_GLB_LOW = np.polynomial.legendre.leggauss(10)


def _batch_single_peak(phase_data, weight_data, xs, t, rel_tol):
    """Vectorized quotient over x: unique-peak phases only."""
    n = xs.size
    lo = xs - t * phase_data.sup_abs - 1.0
    hi = xs + t * phase_data.sup_abs + 1.0

    def hprime2t(y):
        # 2t H'(y) = x - y - t f0(y); strictly decreasing in y here
        return xs - y - t * phase_data.value(y)

    for _ in range(90):
        mid = 0.5 * (lo + hi)
        pos = hprime2t(mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    y0 = 0.5 * (lo + hi)
    d2 = -0.5 / t - 0.5 * phase_data.derivative(y0, 1)
    width = 1.0 / np.sqrt(np.maximum(-d2, 1e-300))

    def phase_at(y):
        return -((xs[:, None] - y) ** 2) / (4.0 * t) - 0.5 * np.asarray(
            phase_data.primitive(y.reshape(-1)), dtype=float
        ).reshape(y.shape)

    h0 = (-((xs - y0) ** 2) / (4.0 * t)
          - 0.5 * np.asarray(phase_data.primitive(y0), dtype=float))

    edges = np.concatenate([-_S_EDGES[::-1], _S_EDGES[1:]])
    # extend the stencil until the phase has dropped 45 e-folds at both ends
    left = y0 + edges[0] * width
    right = y0 + edges[-1] * width
    extra_l, extra_r = [], []
    for _ in range(40):
        dl = (-((xs - left) ** 2) / (4.0 * t)
              - 0.5 * np.asarray(phase_data.primitive(left), dtype=float)) - h0
        dr = (-((xs - right) ** 2) / (4.0 * t)
              - 0.5 * np.asarray(phase_data.primitive(right), dtype=float)) - h0
        need_l = dl > -45.0
        need_r = dr > -45.0
        if not (np.any(need_l) or np.any(need_r)):
            break
        step = 3.0 * width
        left = np.where(need_l, left - step, left)
        right = np.where(need_r, right + step, right)
        extra_l.append(left.copy())
        extra_r.append(right.copy())

    cols = [y0 + s * width for s in edges]
    node_cols = [left] + extra_l[::-1] + cols + extra_r + [right]
    ys = np.stack(node_cols, axis=1)
    ys.sort(axis=1)

    x21, w21 = _GLB
    x10, w10 = _GLB_LOW
    num = np.zeros(n)
    den = np.zeros(n)
    num_lo = np.zeros(n)
    den_lo = np.zeros(n)
    for j in range(ys.shape[1] - 1):
        a, b = ys[:, j], ys[:, j + 1]
        midp = 0.5 * (a + b)
        half = 0.5 * (b - a)
        pts = midp[:, None] + half[:, None] * x21[None, :]
        ex = np.exp(phase_at(pts) - h0[:, None])
        wv = np.asarray(weight_data.value(pts.reshape(-1))).reshape(pts.shape)
        num += half * ((wv * ex) @ w21)
        den += half * (ex @ w21)
        pts = midp[:, None] + half[:, None] * x10[None, :]
        ex = np.exp(phase_at(pts) - h0[:, None])
        wv = np.asarray(weight_data.value(pts.reshape(-1))).reshape(pts.shape)
        num_lo += half * ((wv * ex) @ w10)
        den_lo += half * (ex @ w10)

    vals = num / den
    err = np.abs(num - num_lo) / np.maximum(np.abs(den), 1e-300) + np.abs(
        vals
    ) * np.abs(den - den_lo) / np.maximum(np.abs(den), 1e-300)
    ok = err <= np.maximum(10.0 * rel_tol * np.abs(vals), 1e-12)
    return vals, ok


# ---------------------------------------------------------------------------
# sup norm


@dataclass(frozen=True)
class SupNormResult:
    value: float
    argmax_x: float
    t: float
    search_window: tuple  # (Z, n_coarse)


def scan_max(fn, lo: float, hi: float, n_coarse: int, threads: int = 1,
             n_refine: int = 3):
    """Max of fn on [lo, hi]: coarse grid, then bounded golden refinement
    around the best brackets.  Deterministic for any thread count."""
    grid = np.linspace(lo, hi, n_coarse)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            vals = np.asarray(list(ex.map(fn, grid)))
    else:
        vals = np.asarray([fn(g) for g in grid])
    order = np.argsort(vals)[::-1]
    picked = []
    for i in order:
        if all(abs(i - j) > 1 for j in picked):
            picked.append(int(i))
        if len(picked) == n_refine:
            break
    best_v = float(np.max(vals))
    best_x = float(grid[int(np.argmax(vals))])
    for i in picked:
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, n_coarse - 1)]
        if b <= a:
            continue
        res = minimize_scalar(lambda v: -fn(v), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-6 * (b - a) + 1e-12})
        if -res.fun > best_v:
            best_v = float(-res.fun)
            best_x = float(res.x)
    return best_v, best_x


def sup_norm(data: InitialData, t: float, Z: float = 10.0, n_coarse: int = 129,
             rel_tol: float = 1e-9, threads: int = 1) -> SupNormResult:
    """sup over |x| <= Z * scale(t) of |f(x, t)|.

    scale(t) is t^{1/(1+alpha)} for the power-tail families (the maximum
    lives at x of that order) and sqrt(t) otherwise."""
    if n_coarse < 64:
        raise ValueError("n_coarse must be at least 64")
    if Z <= 0:
        raise ValueError("Z must be positive")
    alpha = data.alpha
    m = t ** (1.0 / (1.0 + alpha)) if alpha is not None else math.sqrt(t)
    v, ax = scan_max(lambda x: abs(eval(data, x, t, rel_tol)), -Z * m, Z * m,
                     n_coarse, threads)
    return SupNormResult(value=v, argmax_x=ax, t=t, search_window=(Z, n_coarse))
