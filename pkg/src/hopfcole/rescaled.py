"""Finite-time analysis of the rescaled Hopf-Cole phase.

Everything here works on the reduced phase

    Ht(y, z) = -(z-y)^2/4 - (t / (2 m^2)) int_0^{m y} f0,

whose stationary points solve z = g_t(y) with the finite-time critical
curve g_t(y) = y + (t/m) f0(m y).  As t grows, g_t converges to the limit
curve of the profiles module away from y = 0, the three monotone branches
converge to their limit branches, and the z at which the global maximum
switches branch converges to the profile discontinuity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .initial_data import InitialData, negate_reflect
from .quadrature import (
    CriticalPoint,
    KIND_MIN,
    PhysicalPhase,
    RescaledPhase,
    integrate_moments,
    locate_critical_points,
)
from . import profiles
from .profiles import (
    BRANCH_MIDDLE,
    BRANCH_MINUS,
    BRANCH_PLUS,
    BranchSolution,
    CASE_ASYMMETRIC,
    CASE_LOG_CORRECTED,
    CASE_SIGN_FLIPPED,
    CASE_SYMMETRIC,
    ProfileCase,
    invert_branch,
    log_corrected_scale,
)


class TieWindowError(RuntimeError):
    """No sign change of the branch phase difference on the search window."""


def case_for_data(data: InitialData) -> ProfileCase | None:
    """The asymptotic class of a data family, if it has one."""
    spec = data.spec
    if spec.family in ("PowerC0", "PowerC1") and spec.sign_at_plus > 0:
        return ProfileCase(CASE_SYMMETRIC, spec.kappa, spec.alpha)
    if spec.family == "PowerLog" and spec.sign_at_plus > 0:
        return ProfileCase(CASE_LOG_CORRECTED, spec.kappa, spec.alpha, spec.beta)
    if spec.family == "SignFlipped" and spec.sign_at_plus < 0:
        return ProfileCase(CASE_SIGN_FLIPPED, spec.kappa, spec.alpha)
    if spec.family == "Asymmetric" and spec.sign_at_plus > 0:
        return ProfileCase(CASE_ASYMMETRIC, spec.kappa, spec.alpha, spec.beta)
    return None


def default_space_scale(data: InitialData, t: float) -> float:
    """t^{1/(1+alpha)}, or the anomalous mu(t) for the log-corrected family."""
    spec = data.spec
    if spec.family == "PowerLog":
        return log_corrected_scale(spec.alpha, spec.beta, t)
    if data.alpha is not None:
        return t ** (1.0 / (1.0 + data.alpha))
    return math.sqrt(t)


def rescaled_phase(data: InitialData, y, z: float, t: float, dy_order: int = 0,
                   space_scale: float | None = None):
    """Ht(y, z) and its first two y derivatives (exact formulas).

    dy_order 0: -(z-y)^2/4 - (t/(2 m^2)) int_0^{m y} f0
    dy_order 1: (z - y - (t/m) f0(m y)) / 2
    dy_order 2: (-1 - t f0'(m y)) / 2
    """
    m = space_scale if space_scale is not None else default_space_scale(data, t)
    y = np.asarray(y, dtype=float)
    if dy_order == 0:
        out = -((z - y) ** 2) / 4.0 - (t / (2.0 * m * m)) * data.primitive(m * y)
    elif dy_order == 1:
        out = 0.5 * (z - y - (t / m) * data.value(m * y))
    elif dy_order == 2:
        out = 0.5 * (-1.0 - t * data.derivative(m * y, 1))
    else:
        raise ValueError("dy_order must be 0, 1 or 2")
    return float(out) if np.ndim(out) == 0 else out


def critical_curve_finite(data: InitialData, y, t: float,
                          space_scale: float | None = None):
    """g_t(y) = y + (t/m) f0(m y); its zeros of z - g_t are the stationary
    points of the rescaled phase."""
    m = space_scale if space_scale is not None else default_space_scale(data, t)
    y = np.asarray(y, dtype=float)
    out = y + (t / m) * data.value(m * y)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class BranchSet:
    minus: BranchSolution | None = None
    plus: BranchSolution | None = None
    middle: BranchSolution | None = None
    extras: list = field(default_factory=list)

    def get(self, branch: str):
        return {BRANCH_MINUS: self.minus, BRANCH_PLUS: self.plus,
                BRANCH_MIDDLE: self.middle}[branch]


def _near_origin_halfwidth(data: InitialData, t: float) -> float:
    alpha = data.alpha
    if alpha is None:
        return math.sqrt(1.0 / t)
    return t ** (-1.0 / (1.0 + alpha) + 0.1)


def finite_branches(data: InitialData, z: float, t: float,
                    margin: float | None = None,
                    space_scale: float | None = None) -> BranchSet:
    """Stationary points of the rescaled phase sorted into the monotone
    branch windows; everything else (near y = 0 or near the cusp) lands in
    extras.

    A branch is reported only when a critical point falls inside its window
    and g_t is monotone there (sampled); the windows are anchored at the
    limit branches, so at moderate t a branch can legitimately be absent.
    """
    case = case_for_data(data)
    m = space_scale if space_scale is not None else default_space_scale(data, t)
    phase = RescaledPhase(data, float(z), float(t), space_scale=m)
    cps = locate_critical_points(phase)
    out = BranchSet()
    if case is None:
        out.extras = list(cps)
        return out

    strip = _near_origin_halfwidth(data, t)
    y0 = case.y0
    nu = margin if margin is not None else 0.05 * (y0 if y0 is not None
                                                   else case.kappa ** (1.0 / (1.0 + case.alpha)))

    def limit_y(branch):
        try:
            return invert_branch(case, branch, z).y
        except ValueError:
            return None

    def windows():
        wins = {}
        ym = limit_y(BRANCH_MINUS)
        edge = -max(2.0 * strip, min(nu, abs(ym) / 2.0) if ym is not None else nu)
        wins[BRANCH_MINUS] = (-math.inf, edge, +1)
        if case.case == CASE_SIGN_FLIPPED:
            yp = limit_y(BRANCH_PLUS)
            edge = max(2.0 * strip, min(nu, yp / 2.0) if yp is not None else nu)
            wins[BRANCH_PLUS] = (edge, math.inf, +1)
            return wins
        wins[BRANCH_PLUS] = (y0 + nu, math.inf, +1)
        wins[BRANCH_MIDDLE] = (max(2.0 * strip, 1e-3 * y0), y0 - nu, -1)
        return wins

    wins = windows()
    assigned = {}
    leftovers = []
    for cp in cps:
        target = None
        for name, (lo, hi, _sgn) in wins.items():
            if lo <= cp.y <= hi:
                target = name
                break
        if target is None:
            leftovers.append(cp)
            continue
        # keep the candidate closest to the limit branch if several fall in
        prev = assigned.get(target)
        ref = limit_y(target)
        if prev is None:
            assigned[target] = cp
        else:
            if ref is not None and abs(cp.y - ref) < abs(prev.y - ref):
                leftovers.append(prev)
                assigned[target] = cp
            else:
                leftovers.append(cp)

    gt = lambda y: critical_curve_finite(data, y, t, space_scale=m)
    for name, cp in assigned.items():
        lo, hi, sgn = wins[name]
        probes = np.linspace(max(lo, cp.y - 1.0), min(hi, cp.y + 1.0), 9)
        slopes = np.diff(gt(probes))
        if np.all(sgn * slopes > 0):
            sol = BranchSolution(y=cp.y, branch=name,
                                 residual=abs(gt(cp.y) - z))
            setattr(out, name, sol)
        else:
            leftovers.append(cp)
    out.extras = sorted(leftovers, key=lambda c: c.y)
    return out


def branch_phase(data: InitialData, z: float, t: float, branch: str,
                 space_scale: float | None = None) -> float:
    """Reduced phase value Ht at the requested finite-time branch point."""
    bs = finite_branches(data, z, t, space_scale=space_scale)
    sol = bs.get(branch)
    if sol is None:
        raise ValueError(f"branch {branch!r} absent at z = {z}, t = {t}")
    return rescaled_phase(data, sol.y, z, t, space_scale=space_scale)


def phase_tie_point(data: InitialData, t: float, window: tuple | None = None,
                    space_scale: float | None = None) -> float:
    """The z at which the two competing phase maxima have equal height at
    finite t (the finite-time location of the profile jump).

    Bisection on the difference of the branch phase values, which is
    strictly monotone in z; the window is widened once before giving up."""
    case = case_for_data(data)
    if case is None:
        raise ValueError("data family has no asymptotic profile case")
    m = space_scale if space_scale is not None else default_space_scale(data, t)

    def diff(z):
        bs = finite_branches(data, z, t, space_scale=m)
        plus = bs.plus
        left = bs.get(BRANCH_MINUS)
        if plus is None or left is None:
            return None
        hp = rescaled_phase(data, plus.y, z, t, space_scale=m)
        hm = rescaled_phase(data, left.y, z, t, space_scale=m)
        return hp - hm

    def diff_strict(z):
        v = diff(z)
        if v is None:
            raise TieWindowError(
                f"branches unavailable at z = {z}, t = {t}"
            )
        return v

    if window is not None:
        zs = np.linspace(window[0], window[1], 17)
    elif case.case == CASE_SIGN_FLIPPED:
        zs = np.linspace(-8.0, 8.0, 33)
    else:
        zs = case.g_y0 + np.concatenate([[0.02], np.geomspace(0.05, 12.0, 24)])
    prev = None
    for z in zs:
        v = diff(float(z))
        if v is None:
            continue
        if v == 0.0:
            return float(z)
        if prev is not None and prev[1] * v < 0:
            return float(brentq(diff_strict, prev[0], float(z),
                                xtol=1e-10, rtol=1e-14))
        prev = (float(z), v)
    raise TieWindowError(
        f"no sign change of the branch phase difference at t = {t} "
        f"(scanned z in [{zs[0]:.4g}, {zs[-1]:.4g}])"
    )


# ---------------------------------------------------------------------------
# property report


@dataclass
class PropertyReport:
    t: float
    degenerate: bool
    properties: dict

    def to_json(self) -> dict:
        out = {}
        for i in range(1, 10):
            key = f"property_{i}"
            entry = self.properties[key]
            out[key] = {"pass": bool(entry["pass"]),
                        "margin": float(entry["margin"]),
                        "details": entry["details"]}
        if self.degenerate:
            out["degenerate"] = True
        return out

    def all_pass(self) -> bool:
        return all(self.properties[f"property_{i}"]["pass"] for i in range(1, 10))


_DEFAULT_TOL = {
    "branch_sup": 0.05,     # property 2
    "deriv_conv": 0.05,     # property 4
    "window_mu": 0.1,       # z-window parameter
    "eps_y": 0.2,           # |y| cutoff away from the origin strip
    "delta": 0.2,           # property 9 box margin
    "cusp_ball": 0.5,       # property 6 tolerance ball around the cusp
    "branch_near": 0.1,     # membership distance in properties 6-8
}


def check_properties(data: InitialData, t: float, tol: dict | None = None) -> PropertyReport:
    """Numeric verification, on probe grids, of the nine structural
    properties of the rescaled phase (curve convergence, branch convergence,
    derivative bounds and sign partition, branch membership per z regime,
    uniform concavity near the branches)."""
    tols = dict(_DEFAULT_TOL)
    if tol:
        tols.update(tol)
    case = case_for_data(data)
    props = {}

    if case is None:
        for i in range(1, 10):
            props[f"property_{i}"] = {
                "pass": True, "margin": 0.0,
                "details": {"note": "degenerate data"},
            }
        return PropertyReport(t=t, degenerate=True, properties=props)

    m = default_space_scale(data, t)
    eps = tols["eps_y"]
    mu_w = tols["window_mu"]
    y0 = case.y0 if case.y0 is not None else case.kappa ** (1.0 / (1.0 + case.alpha))
    g_y0 = case.g_y0 if case.g_y0 is not None else 0.0
    strip = _near_origin_halfwidth(data, t)
    glim = lambda y: profiles.critical_curve_limit(case, y)
    gt = lambda y: critical_curve_finite(data, y, t, space_scale=m)

    # 1: located critical points sit near the limit curve (reported only)
    w_max = 0.0
    w_arg = None
    z_grid = np.linspace(-5.0, 5.0, 21)
    all_cps = {}
    for z in z_grid:
        cps = locate_critical_points(RescaledPhase(data, float(z), t, space_scale=m))
        all_cps[float(z)] = cps
        for cp in cps:
            if abs(cp.y) >= eps:
                slope = profiles._curve_slope(case, cp.y)
                w = abs(float(z) - glim(cp.y)) / (1.0 + abs(float(slope)))
                if w > w_max:
                    w_max, w_arg = w, (float(z), cp.y)
    props["property_1"] = {
        "pass": True, "margin": -w_max,
        "details": {"max_distance": w_max, "at": w_arg, "thresholded": False},
    }

    # 2: branch sup-errors against the limit branches
    sups = {}
    grids = {BRANCH_MINUS: np.linspace(-5.0, 5.0, 21)}
    if case.case == CASE_SIGN_FLIPPED:
        grids[BRANCH_PLUS] = np.linspace(-5.0, 5.0, 21)
    else:
        grids[BRANCH_PLUS] = g_y0 + mu_w / 2.0 + np.linspace(0.0, 1.0 / mu_w, 21)
        grids[BRANCH_MIDDLE] = g_y0 + mu_w / 2.0 + np.linspace(0.0, 1.0 / mu_w - g_y0, 15)
    worst = 0.0
    for branch, zg in grids.items():
        if case.case == CASE_ASYMMETRIC and branch == BRANCH_MINUS:
            zg = zg[zg < 0]
        errs = []
        for z in zg:
            bs = finite_branches(data, float(z), t, space_scale=m)
            sol = bs.get(branch)
            if sol is None:
                continue
            try:
                ref = invert_branch(case, branch, float(z)).y
            except ValueError:
                continue
            errs.append(abs(sol.y - ref))
        sups[branch] = max(errs) if errs else None
        if errs:
            worst = max(worst, max(errs))
    props["property_2"] = {
        "pass": worst <= tols["branch_sup"],
        "margin": tols["branch_sup"] - worst,
        "details": {"sup_errors": sups},
    }

    # 3: derivative bound on the near-origin strip
    bound_margin = math.inf
    tpow = (t / m) * data.sup_abs
    ys = np.linspace(-strip, strip, 31)
    for z in np.linspace(-5.0, 5.0, 11):
        dh = np.abs(rescaled_phase(data, ys, float(z), t, dy_order=1, space_scale=m))
        bound = 1.0 + abs(float(z)) + tpow
        bound_margin = min(bound_margin, float(bound - np.max(dh)))
    props["property_3"] = {
        "pass": bound_margin >= 0.0, "margin": bound_margin,
        "details": {"strip_halfwidth": strip},
    }

    # 4: dHt converges to (z - g(y))/2 locally uniformly away from the strip
    box_y = np.concatenate([np.linspace(-1.0 / eps, -eps, 25),
                            np.linspace(eps, 1.0 / eps, 25)])
    conv = 0.0
    for z in np.linspace(-1.0 / eps, 1.0 / eps, 11):
        dh = rescaled_phase(data, box_y, float(z), t, dy_order=1, space_scale=m)
        conv = max(conv, float(np.max(np.abs(dh - 0.5 * (float(z) - glim(box_y))))))
    props["property_4"] = {
        "pass": conv <= tols["deriv_conv"],
        "margin": tols["deriv_conv"] - conv,
        "details": {"sup_error": conv},
    }

    # 5: the sign of dHt is sign(z - g_t(y)) on either side of the curve
    rng = np.random.default_rng(20240817)
    ptsy = rng.uniform(-3.0, 3.0, 200)
    ptsz = rng.uniform(-5.0, 5.0, 200)
    dh = np.asarray([rescaled_phase(data, yy, float(zz), t, dy_order=1, space_scale=m)
                     for yy, zz in zip(ptsy, ptsz)])
    side = ptsz - gt(ptsy)
    mism = int(np.sum(np.sign(dh) * np.sign(side) < 0))
    props["property_5"] = {
        "pass": mism == 0, "margin": float(-mism),
        "details": {"mismatches": mism, "probes": len(ptsy)},
    }

    # 6-8: membership of critical points per z regime
    def membership(z, cp, branches_allowed, also_unit_ball=False):
        if abs(cp.y) <= max(2.0 * strip, 1e-3):
            return True
        if also_unit_ball and abs(cp.y) <= 1.0:
            return True
        for br in branches_allowed:
            try:
                ref = invert_branch(case, br, float(z)).y
            except ValueError:
                continue
            if abs(cp.y - ref) <= tols["branch_near"]:
                return True
        if case.case not in (CASE_SIGN_FLIPPED,):
            da = math.hypot(float(z) - g_y0, cp.y - y0)
            if da <= tols["cusp_ball"]:
                return True
        return False

    def regime_check(zs, branches_allowed, also_unit_ball=False):
        strays = []
        for z in zs:
            key = float(z)
            cps = all_cps.get(key) or locate_critical_points(
                RescaledPhase(data, key, t, space_scale=m))
            for cp in cps:
                if not membership(key, cp, branches_allowed, also_unit_ball):
                    strays.append((key, cp.y))
        return strays

    if case.case == CASE_SIGN_FLIPPED:
        s6 = regime_check(np.linspace(-5.0, -1.0, 5), [BRANCH_MINUS, BRANCH_PLUS])
        s7 = regime_check(np.linspace(10.0, 12.0, 3), [BRANCH_MINUS, BRANCH_PLUS], True)
        s8 = regime_check(np.linspace(-1.0, 1.0, 5), [BRANCH_MINUS, BRANCH_PLUS])
    else:
        s6 = regime_check(np.linspace(-5.0, g_y0 + mu_w, 7), [BRANCH_MINUS])
        s7 = regime_check(np.linspace(1.0 / mu_w, 1.0 / mu_w + 2.0, 3),
                          [BRANCH_PLUS], also_unit_ball=True)
        s8 = regime_check(np.linspace(g_y0 + mu_w, 1.0 / mu_w, 7),
                          [BRANCH_MINUS, BRANCH_PLUS, BRANCH_MIDDLE])
    for i, strays in ((6, s6), (7, s7), (8, s8)):
        props[f"property_{i}"] = {
            "pass": len(strays) == 0, "margin": float(-len(strays)),
            "details": {"stray_points": strays},
        }

    # 9: uniform concavity near the branches between the two z thresholds
    delta = tols["delta"]
    ybox = np.concatenate([np.linspace(-1.0 / delta, -delta, 40),
                           np.linspace(y0 + delta, 1.0 / delta, 40)])
    d2 = rescaled_phase(data, ybox, 0.0, t, dy_order=2, space_scale=m)
    c1 = float(np.min(-d2))
    c2 = float(np.max(-d2))
    props["property_9"] = {
        "pass": c1 > 0.0, "margin": c1,
        "details": {"C1": c1, "C2": c2, "delta": delta},
    }

    return PropertyReport(t=t, degenerate=False, properties=props)


# ---------------------------------------------------------------------------
# concentration diagnostic


@dataclass(frozen=True)
class ConcentrationResult:
    x: float
    t: float
    mu1: float
    mu2: float
    ratio: float
    log_ratio: float
    c0: float


def concentration_ratio(data: InitialData, x: float, t: float,
                        mu1: float, mu2: float,
                        rel_tol: float = 1e-9) -> ConcentrationResult:
    """Mass fraction of int e^H over the strip (mu1 T, mu2 T), T = t^{1/(1+alpha)}.

    The analysis orientation has negative data (mass escaping to y > 0);
    positive families are reflected internally, which mirrors the strip.
    c0 is the scaled maximum t^{-(1-alpha)/(1+alpha)} max H, bounded in t.
    """
    if not mu1 < 0.0 < mu2:
        raise ValueError("need mu1 < 0 < mu2")
    wdata, wx = data, float(x)
    if data.spec.sign_at_plus > 0 and data.spec.family != "Zero":
        wdata, wx = negate_reflect(data), -float(x)
    alpha = wdata.alpha
    T = t ** (1.0 / (1.0 + alpha)) if alpha is not None else math.sqrt(t)
    phase = PhysicalPhase(wdata, wx, float(t))
    cps = locate_critical_points(phase)
    full = integrate_moments([None], phase, rel_tol=rel_tol, cps=cps)[0]
    strip = integrate_moments([None], phase, rel_tol=rel_tol, cps=cps,
                              interval=(mu1 * T, mu2 * T))[0]
    log_ratio = (strip.log_scale - full.log_scale
                 + math.log(max(strip.mantissa, 1e-300))
                 - math.log(max(full.mantissa, 1e-300)))
    ratio = min(max(math.exp(log_ratio) if log_ratio < 0 else 1.0, 0.0), 1.0)
    expo = (1.0 - alpha) / (1.0 + alpha) if alpha is not None else 0.0
    c0 = full.log_scale * t ** (-expo)
    return ConcentrationResult(x=float(x), t=float(t), mu1=float(mu1),
                               mu2=float(mu2), ratio=ratio,
                               log_ratio=log_ratio, c0=float(c0))
