"""Stabilized evaluation of exponential integrals int g(y) exp(Phi(y)) dy.

The phase Phi is the Hopf-Cole exponent in physical or rescaled variables;
its maximum can reach magnitude ~1e4, so every integral is computed in
max-subtracted form and stored as (log_scale, mantissa).  The work flow is
the classical Laplace-point one: locate all zeros of Phi', integrate
adaptively on peak-scaled panels between computable truncation points, and
bound the remaining tails by the Gaussian domination of the phase.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .initial_data import InitialData, UnsupportedOrderError

DROP = 40.0  # e-folds below the peak at which the integrand is truncated

KIND_MAX = "local_max"
KIND_MIN = "local_min"
KIND_DEGENERATE = "degenerate"

_GL10 = np.polynomial.legendre.leggauss(10)
_GL21 = np.polynomial.legendre.leggauss(21)


class NotConvergedError(RuntimeError):
    """Adaptive refinement exhausted its budget before reaching tolerance."""


class InternalConsistencyError(RuntimeError):
    """No critical point found for a phase that must have one."""


# ---------------------------------------------------------------------------
# weight algebra


class MomentWeight:
    """Weight of a moment integral: polynomial in (f0, f0', f0'') with
    coefficients polynomial in 1/t.

    The algebra is closed under the two derivation maps
        derive_x: g -> g' - g f0 / 2
        derive_t: g -> g/(2t) + g'' - g' f0 - g f0'/2 + g f0^2/4
    which express d/dx and d/dt of int g e^Phi as new moment integrals.
    Terms are keyed by (a, b, c, p) meaning f0^a (f0')^b (f0'')^c t^-p.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: float(v) for k, v in (terms or {}).items() if v != 0.0}

    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def unit(cls):
        return cls.constant(1.0)

    @classmethod
    def f0(cls):
        return cls({(1, 0, 0, 0): 1.0})

    def _combine(self, other, sign):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + sign * v
        return MomentWeight(out)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return MomentWeight({k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, MomentWeight):
            out = {}
            for (a1, b1, c1, p1), v1 in self.terms.items():
                for (a2, b2, c2, p2), v2 in other.terms.items():
                    k = (a1 + a2, b1 + b2, c1 + c2, p1 + p2)
                    out[k] = out.get(k, 0.0) + v1 * v2
            return MomentWeight(out)
        return MomentWeight({k: other * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, MomentWeight) and self.terms == other.terms

    def __repr__(self):
        return f"MomentWeight({self.terms!r})"

    def shift_inv_t(self, n=1):
        return MomentWeight({(a, b, c, p + n): v for (a, b, c, p), v in self.terms.items()})

    def max_derivative_order(self):
        order = 0
        for (a, b, c, _p) in self.terms:
            if c:
                order = max(order, 2)
            elif b:
                order = max(order, 1)
        return order

    def diff_y(self):
        out = {}
        for (a, b, c, p), v in self.terms.items():
            if c:
                raise UnsupportedOrderError(
                    "differentiating this weight would require f0'''"
                )
            if a:
                k = (a - 1, b + 1, c, p)
                out[k] = out.get(k, 0.0) + v * a
            if b:
                k = (a, b - 1, c + 1, p)
                out[k] = out.get(k, 0.0) + v * b
        return MomentWeight(out)

    def evaluate(self, data: InitialData, y, t):
        y = np.asarray(y, dtype=float)
        order = self.max_derivative_order()
        f = [data.value(y)]
        if order >= 1:
            f.append(data.derivative(y, 1))
        if order >= 2:
            f.append(data.derivative(y, 2))
        out = np.zeros_like(np.atleast_1d(y), dtype=float)
        for (a, b, c, p), v in self.terms.items():
            term = np.full_like(out, v * t ** (-p))
            if a:
                term = term * np.atleast_1d(f[0]) ** a
            if b:
                term = term * np.atleast_1d(f[1]) ** b
            if c:
                term = term * np.atleast_1d(f[2]) ** c
            out += term
        return out


def derive_x(g: MomentWeight) -> MomentWeight:
    """Weight of d/dx [int g e^H]: g' - g f0 / 2."""
    return g.diff_y() + (-0.5) * (g * MomentWeight.f0())


def derive_t(g: MomentWeight) -> MomentWeight:
    """Weight of d/dt [int g e^H]: g/(2t) + g'' - g' f0 - g f0'/2 + g f0^2/4.

    Algebraically this equals g/(2t) + derive_x(derive_x(g))."""
    return 0.5 * g.shift_inv_t() + derive_x(derive_x(g))


# ---------------------------------------------------------------------------
# phases


@dataclass(frozen=True)
class PhysicalPhase:
    """H(y) = -(x-y)^2/(4t) - P(y)/2 with P the primitive of f0."""

    data: InitialData
    x: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")

    def total(self, y):
        y = np.asarray(y, dtype=float)
        return -((self.x - y) ** 2) / (4.0 * self.t) - 0.5 * self.data.primitive(y)

    def dtotal(self, y):
        y = np.asarray(y, dtype=float)
        return (self.x - y) / (2.0 * self.t) - 0.5 * self.data.value(y)

    def d2total(self, y):
        return -0.5 / self.t - 0.5 * self.data.derivative(y, 1)

    # residuals of critical points are measured on this function
    def reduced_dphase(self, y):
        return self.dtotal(y)

    def weight_arg(self, y):
        return y

    @property
    def amplitude(self):
        return 1.0

    @property
    def d2_ref(self):
        return 0.5 / self.t

    @property
    def char_width(self):
        return math.sqrt(2.0 * self.t)

    def scan_grid(self):
        t, x = self.t, self.x
        reach = t * self.data.sup_abs + math.sqrt(8.0 * (DROP + 10.0) * t) + 10.0
        r_min = 1e-3 * min(1.0, math.sqrt(t))
        logs = np.geomspace(r_min, reach, 240)
        pieces = [x + logs, x - logs, logs, -logs, np.array([x, 0.0])]
        lo, hi = x - reach, x + reach
        pieces.append(np.linspace(lo, hi, 201))
        dense_half = min(t ** 0.1, hi)
        pieces.append(np.linspace(-dense_half, dense_half, 201))
        grid = np.concatenate(pieces)
        grid = grid[(grid >= lo) & (grid <= hi)]
        return np.unique(grid)

    def gaussian_domination(self):
        """(quad, center, threshold): Phi(y) <= -quad*(y-center)^2 for
        |y - center| beyond threshold (and |y| beyond it), from the primitive
        growth bound |P| <= K (1+|y|)^p."""
        k_growth, p = self.data.primitive_growth()
        quad = 1.0 / (8.0 * self.t)
        if k_growth == 0.0:
            thr = 1.0
        else:
            thr = (32.0 * self.t * k_growth) ** (1.0 / (2.0 - p)) * 2.0
        thr = max(thr, 2.0 * abs(self.x) + 1.0, 1.0)
        return quad, self.x, thr


@dataclass(frozen=True)
class RescaledPhase:
    """Total phase amp * Ht(y, z) with amp = m^2/t and

        Ht(y, z) = -(z-y)^2/4 - (t / (2 m^2)) P(m y),

    m the spatial scale (default t^{1/(1+alpha)}; pass mu(t) for the
    log-corrected families)."""

    data: InitialData
    z: float
    t: float
    space_scale: float | None = None

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")
        alpha = self.data.alpha
        if self.space_scale is not None:
            m = float(self.space_scale)
        elif alpha is not None:
            m = self.t ** (1.0 / (1.0 + alpha))
        else:
            m = math.sqrt(self.t)
        object.__setattr__(self, "_m", m)
        object.__setattr__(self, "_amp", m * m / self.t)

    @property
    def m(self):
        return self._m

    @property
    def amplitude(self):
        return self._amp

    def reduced(self, y):
        y = np.asarray(y, dtype=float)
        m = self._m
        return -((self.z - y) ** 2) / 4.0 - (self.t / (2.0 * m * m)) * self.data.primitive(m * y)

    def total(self, y):
        return self._amp * self.reduced(y)

    def reduced_dphase(self, y):
        y = np.asarray(y, dtype=float)
        m = self._m
        return 0.5 * (self.z - y - (self.t / m) * self.data.value(m * y))

    def dtotal(self, y):
        return self._amp * self.reduced_dphase(y)

    def d2total(self, y):
        y = np.asarray(y, dtype=float)
        return self._amp * 0.5 * (-1.0 - self.t * self.data.derivative(self._m * y, 1))

    def weight_arg(self, y):
        return self._m * np.asarray(y, dtype=float)

    @property
    def d2_ref(self):
        return 0.5 * self._amp

    @property
    def char_width(self):
        return 1.0

    def scan_grid(self):
        m, t, z = self._m, self.t, self.z
        drift = (t / m) * self.data.sup_abs
        reach = abs(z) + drift + math.sqrt(8.0 * (DROP + 10.0) / self._amp) + 2.0
        r_min = 1e-3 / m
        logs = np.geomspace(r_min, reach, 360)
        pieces = [logs, -logs, z + np.geomspace(r_min, reach, 120),
                  z - np.geomspace(r_min, reach, 120), np.array([0.0, z])]
        pieces.append(np.linspace(-reach, reach, 301))
        alpha = self.data.alpha
        if alpha is not None:
            dense_half = min(t ** (-1.0 / (1.0 + alpha) + 0.1), reach)
        else:
            dense_half = min(max(1.0 / m, 1e-3), reach)
        pieces.append(np.linspace(-dense_half, dense_half, 201))
        grid = np.concatenate(pieces)
        grid = grid[(grid >= -reach) & (grid <= reach)]
        return np.unique(grid)

    def gaussian_domination(self):
        k_growth, p = self.data.primitive_growth()
        m = self._m
        quad = self._amp / 8.0
        if k_growth == 0.0:
            thr = 1.0
        else:
            thr = (16.0 * self.t * k_growth * 2.0 ** p * m ** (p - 2.0)) ** (1.0 / (2.0 - p)) * 2.0
        thr = max(thr, 2.0 * abs(self.z) + 1.0, 1.0, 1.0 / m)
        return quad, self.z, thr


# ---------------------------------------------------------------------------
# critical points


@dataclass(frozen=True)
class CriticalPoint:
    y: float
    phase_value: float  # total phase minus the global max (<= 0)
    kind: str
    residual: float
    is_global_max: bool = False


def locate_critical_points(phase) -> list:
    """All sign changes of the phase derivative on a composite scan grid,
    polished by Brent and classified by the second derivative.

    The list is sorted by y and the global maximum is flagged.  A local
    maximum can be missed only if its peak lies far below the found global
    maximum (the scan grid is built to cover every phase scale)."""
    grid = phase.scan_grid()
    d = np.asarray(phase.reduced_dphase(grid))
    roots = []
    kinds_hint = []
    sign = np.sign(d)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    fn = lambda y: float(phase.reduced_dphase(y))
    for i in idx:
        a, b = float(grid[i]), float(grid[i + 1])
        r = brentq(fn, a, b, xtol=1e-13 * (1.0 + abs(a) + abs(b)), rtol=1e-15)
        roots.append(r)
        kinds_hint.append(KIND_MAX if d[i] > 0 else KIND_MIN)
    for i in np.nonzero(sign == 0)[0]:
        roots.append(float(grid[i]))
        kinds_hint.append(None)
    if not roots:
        raise InternalConsistencyError(
            "no critical point found; the phase or data is inconsistent"
        )

    order = np.argsort(roots)
    uniq, hints = [], []
    for j in order:
        if uniq and abs(roots[j] - uniq[-1]) <= 1e-12 * (1.0 + abs(roots[j])):
            continue
        uniq.append(roots[j])
        hints.append(kinds_hint[j])

    ys = np.asarray(uniq)
    # Newton polish on the reduced derivative
    for _ in range(2):
        d1 = np.asarray(phase.reduced_dphase(ys))
        d2 = np.asarray(phase.d2total(ys)) / (
            phase.amplitude if isinstance(phase, RescaledPhase) else 1.0
        )
        step = np.where(np.abs(d2) > 0, d1 / np.where(d2 == 0, 1.0, d2), 0.0)
        step = np.clip(step, -1e-2 * (1.0 + np.abs(ys)), 1e-2 * (1.0 + np.abs(ys)))
        ys = ys - step
    res = np.abs(np.asarray(phase.reduced_dphase(ys)))
    tots = np.asarray(phase.total(ys))
    d2s = np.asarray(phase.d2total(ys))
    top = float(np.max(tots))
    imax = int(np.argmax(tots))

    pts = []
    for j, y in enumerate(ys):
        if abs(d2s[j]) <= 1e-6 * phase.d2_ref:
            kind = KIND_DEGENERATE
        elif d2s[j] < 0:
            kind = KIND_MAX
        else:
            kind = KIND_MIN
        if hints[j] is not None and kind != KIND_DEGENERATE:
            kind = hints[j]
        pts.append(CriticalPoint(float(y), float(tots[j] - top), kind,
                                 float(res[j]), j == imax))
    return pts


# ---------------------------------------------------------------------------
# adaptive panel machinery


@dataclass(frozen=True)
class StabilizedIntegral:
    """Value = mantissa * exp(log_scale), never materialized."""

    log_scale: float
    mantissa: float
    abs_error: float
    truncation: tuple
    converged: bool = True


def _log_gauss_tail(quad, dist):
    """log of int_{dist}^inf exp(-quad * s^2) ds (one tail)."""
    if quad <= 0:
        return math.inf
    xi = dist * math.sqrt(quad)
    if xi < 25.0:
        from scipy.special import erfc
        val = 0.5 * math.sqrt(math.pi / quad) * erfc(xi)
        return math.log(val) if val > 0 else -math.inf
    # asymptotic erfc
    return -xi * xi - math.log(xi * math.sqrt(math.pi)) - 0.5 * math.log(quad) + math.log(0.5) + 0.5 * math.log(math.pi)


def _as_weight_fn(g, phase):
    if g is None:
        return lambda y: np.ones_like(np.asarray(y, dtype=float))
    if isinstance(g, MomentWeight):
        data, t = phase.data, phase.t
        return lambda y: g.evaluate(data, y, t)
    if np.isscalar(g):
        c = float(g)
        return lambda y: np.full_like(np.asarray(y, dtype=float), c)
    return g


def _panel_eval(phase, weight_fns, log_scale, a, b):
    """(I10[w], I21[w]) for one panel of the max-subtracted integrand."""
    x10, w10 = _GL10
    x21, w21 = _GL21
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    ys = np.concatenate([mid + half * x10, mid + half * x21])
    ex = np.exp(np.asarray(phase.total(ys)) - log_scale)
    warg = phase.weight_arg(ys)
    i10, i21 = [], []
    for fn in weight_fns:
        gv = np.asarray(fn(warg), dtype=float) * ex
        i10.append(half * float(w10 @ gv[:10]))
        i21.append(half * float(w21 @ gv[10:]))
    return np.asarray(i10), np.asarray(i21)


def _refine(phase, weight_fns, log_scale, edges, rel_tol, max_panels):
    """Global adaptive refinement over the initial edge partition."""
    nw = len(weight_fns)
    panels = {}
    heap = []
    counter = 0
    total = np.zeros(nw)
    err = np.zeros(nw)
    l1 = np.zeros(nw)

    def push(a, b):
        nonlocal counter, total, err, l1
        i10, i21 = _panel_eval(phase, weight_fns, log_scale, a, b)
        e = np.abs(i21 - i10)
        panels[counter] = (a, b, i21, e)
        total += i21
        err += e
        l1 += np.abs(i21)
        heapq.heappush(heap, (-float(np.max(e)), counter))
        counter += 1

    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            push(a, b)

    def targets():
        return np.maximum(rel_tol * np.abs(total), 1e-3 * rel_tol * l1 + 1e-300)

    while counter < max_panels:
        if np.all(err <= targets()):
            break
        while heap:
            neg_e, pid = heapq.heappop(heap)
            if pid in panels:
                break
        else:
            break
        a, b, i21, e = panels.pop(pid)
        total -= i21
        err -= e
        l1 -= np.abs(i21)
        m = 0.5 * (a + b)
        push(a, m)
        push(m, b)

    converged = bool(np.all(err <= targets()))
    return total, err, converged


def _truncation(phase, cps, log_scale, weight_fns):
    """[a, b] with the phase dropped DROP e-folds below its max at both ends
    and beyond the Gaussian-domination threshold; returns the log of the
    tail bound as well."""
    maxima = [c for c in cps if c.kind != KIND_MIN]
    anchor = maxima if maxima else cps
    y_lo = min(c.y for c in anchor)
    y_hi = max(c.y for c in anchor)

    def width_at(y):
        d2 = float(phase.d2total(y))
        if d2 < 0:
            return min(phase.char_width, 1.0 / math.sqrt(-d2))
        return phase.char_width

    def weight_mag(y):
        m = 0.0
        for fn in weight_fns:
            m = max(m, float(np.max(np.abs(fn(phase.weight_arg(np.asarray([y])))))))
        return m

    def expand(y0, direction):
        w = max(width_at(y0), 1e-12 * (1.0 + abs(y0)))
        for k in range(200):
            cand = y0 + direction * w * (2.0 ** k)
            drop = float(phase.total(cand)) - log_scale
            if drop <= -(DROP + 5.0 + math.log1p(weight_mag(cand))):
                return cand
        return y0 + direction * w * (2.0 ** 60)

    a = expand(y_lo, -1.0)
    b = expand(y_hi, +1.0)

    quad, center, thr = phase.gaussian_domination()
    a = min(a, center - thr)
    b = max(b, center + thr)

    def tail_log(a_, b_):
        gmax = max(weight_mag(a_), weight_mag(b_), 1e-300)
        one_sided = max(
            _log_gauss_tail(quad, b_ - center),
            _log_gauss_tail(quad, center - a_),
        )
        return one_sided + math.log(8.0 * gmax) - log_scale

    log_tail = tail_log(a, b)
    # when the phase maximum is deeply negative the unnormalized Gaussian
    # domination needs a wider window before its tail drops below the peak
    for _ in range(16):
        if log_tail <= -0.5 * DROP:
            break
        a = center - 2.0 * (center - a)
        b = center + 2.0 * (b - center)
        log_tail = tail_log(a, b)
    return a, b, log_tail


def _initial_edges(cps, a, b, phase):
    edges = {a, b}
    maxima = [c for c in cps if c.kind != KIND_MIN]
    for c in cps:
        if a < c.y < b:
            edges.add(c.y)
    for c in maxima:
        d2 = float(phase.d2total(c.y))
        w = 1.0 / math.sqrt(-d2) if d2 < 0 else phase.char_width
        w = min(w, phase.char_width)
        for s in (1.0, 3.0, 8.0):
            for q in (c.y - s * w, c.y + s * w):
                if a < q < b:
                    edges.add(q)
    return np.asarray(sorted(edges))


def integrate_moments(gs, phase, rel_tol=1e-8, cps=None, interval=None,
                      max_panels=4000):
    """Stabilized integrals of several weights over one shared partition.

    With interval=(a, b) the integration is restricted to that window (its
    own max subtraction, no tail bound) -- used for concentration ratios.
    """
    if cps is None:
        cps = locate_critical_points(phase)
    weight_fns = [_as_weight_fn(g, phase) for g in gs]

    if interval is not None:
        a, b = float(interval[0]), float(interval[1])
        cands = [c.y for c in cps if a < c.y < b] + [a, b]
        log_scale = float(np.max(phase.total(np.asarray(cands))))
        log_tail = -math.inf
        inner = [c for c in cps if a < c.y < b]
        edges = _initial_edges(inner, a, b, phase) if inner else np.linspace(a, b, 9)
    else:
        log_scale = max(float(np.max(phase.total(np.asarray([c.y])))) for c in cps)
        a, b, log_tail = _truncation(phase, cps, log_scale, weight_fns)
        edges = _initial_edges(cps, a, b, phase)

    totals, errs, converged = _refine(phase, weight_fns, log_scale, edges,
                                      rel_tol, max_panels)
    tail = math.exp(log_tail) if log_tail < 700 else math.inf
    out = []
    for i in range(len(gs)):
        out.append(StabilizedIntegral(
            log_scale=log_scale,
            mantissa=float(totals[i]),
            abs_error=float(errs[i] + tail),
            truncation=(a, b),
            converged=converged and math.isfinite(tail),
        ))
    return out


def integrate_moment(g, phase, rel_tol=1e-8, cps=None, interval=None,
                     max_panels=4000) -> StabilizedIntegral:
    """int g(y) exp(Phi(y)) dy as (log_scale, mantissa)."""
    return integrate_moments([g], phase, rel_tol, cps, interval, max_panels)[0]


def ratio_moments(gs, phase, rel_tol=1e-9, cps=None, max_panels=4000):
    """[int g e^Phi / int e^Phi for g in gs], one shared critical-point
    analysis and panel partition; the log scales cancel exactly."""
    res = integrate_moments(list(gs) + [None], phase, rel_tol, cps,
                            max_panels=max_panels)
    den = res[-1]
    if not den.converged or den.mantissa == 0.0:
        raise NotConvergedError("denominator integral did not converge")
    return [r.mantissa / den.mantissa for r in res[:-1]]


def ratio_moment(g, phase, rel_tol=1e-9, cps=None) -> float:
    """int g e^Phi / int e^Phi (the general solution-type quotient)."""
    return ratio_moments([g], phase, rel_tol, cps)[0]


def adaptive_quadrature(fn, edges, rel_tol=1e-9, max_panels=2000):
    """Plain global-adaptive Gauss-Legendre over a fixed edge list.

    Returns (value, abs_error, converged)."""
    x10, w10 = _GL10
    x21, w21 = _GL21

    def panel(a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        v10 = half * float(w10 @ np.asarray(fn(mid + half * x10), dtype=float))
        v21 = half * float(w21 @ np.asarray(fn(mid + half * x21), dtype=float))
        return v21, abs(v21 - v10)

    panels = {}
    heap = []
    counter = 0
    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        v, e = panel(a, b)
        panels[counter] = (a, b, v, e)
        heapq.heappush(heap, (-e, counter))
        total += v
        err += e
        counter += 1
    while counter < max_panels and err > rel_tol * abs(total) + 1e-300:
        while heap:
            _, pid = heapq.heappop(heap)
            if pid in panels:
                break
        else:
            break
        a, b, v, e = panels.pop(pid)
        total -= v
        err -= e
        m = 0.5 * (a + b)
        for lo, hi in ((a, m), (m, b)):
            v2, e2 = panel(lo, hi)
            panels[counter] = (lo, hi, v2, e2)
            heapq.heappush(heap, (-e2, counter))
            total += v2
            err += e2
            counter += 1
    return total, err, err <= rel_tol * abs(total) + 1e-300
