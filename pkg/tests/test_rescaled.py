import json
import math

import numpy as np
import pytest
from scipy.special import erf

from hopfcole.initial_data import FamilySpec, make_family, negate_reflect
from hopfcole.profiles import BRANCH_MIDDLE, BRANCH_MINUS, BRANCH_PLUS, invert_branch
from hopfcole.rescaled import (
    TieWindowError,
    case_for_data,
    check_properties,
    concentration_ratio,
    critical_curve_finite,
    finite_branches,
    phase_tie_point,
    rescaled_phase,
)


# -- rescaled phase ----------------------------------------------------------


def test_phase_zero_data(zero_data):
    assert rescaled_phase(zero_data, 1.0, 3.0, 10.0, 0) == pytest.approx(-1.0)
    assert rescaled_phase(zero_data, 1.0, 3.0, 10.0, 1) == pytest.approx(1.0)
    assert rescaled_phase(zero_data, 1.0, 3.0, 10.0, 2) == pytest.approx(-0.5)
    assert rescaled_phase(zero_data, 2.0, 2.0, 10.0, 0) == 0.0


def test_phase_derivative_convergence(power_c1_third):
    # dHt(-1, 0) -> (0 - g(-1))/2 = (0 - (-1 + 1))/2 = 0
    v = rescaled_phase(power_c1_third, -1.0, 0.0, 1e8, 1)
    assert abs(v) <= 1e-2


def test_phase_orders(zero_data):
    with pytest.raises(ValueError):
        rescaled_phase(zero_data, 1.0, 0.0, 1.0, 3)


def test_finite_curve(zero_data, constant_07, power_c1_third):
    assert critical_curve_finite(zero_data, 1.3, 9.0) == pytest.approx(1.3)
    # y + c t^{alpha/(1+alpha)} with the default sqrt scaling: y + c sqrt(t)
    got = critical_curve_finite(constant_07, 1.0, 16.0)
    assert got == pytest.approx(1.0 + 0.7 * 4.0)
    assert critical_curve_finite(power_c1_third, 1.0, 1e8) == pytest.approx(2.0, abs=1e-2)


def test_phase_identity_with_physical(power_c1_third):
    # exact change of variables between the physical and rescaled phases
    from hopfcole.quadrature import PhysicalPhase, RescaledPhase
    t, z = 1e4, 1.7
    m = t ** 0.75
    ph = PhysicalPhase(power_c1_third, z * m, t)
    rp = RescaledPhase(power_c1_third, z, t)
    ys = np.linspace(-2, 2, 11)
    lhs = ph.total(ys * m)
    rhs = rp.amplitude * np.asarray([rescaled_phase(power_c1_third, float(y), z, t) for y in ys])
    assert np.allclose(lhs, rhs, rtol=1e-12)


# -- finite branches ---------------------------------------------------------


def test_zero_data_goes_to_extras(zero_data):
    bs = finite_branches(zero_data, 2.0, 10.0)
    assert bs.minus is None and bs.plus is None and bs.middle is None
    assert len(bs.extras) == 1
    assert bs.extras[0].y == pytest.approx(2.0, abs=1e-10)


def test_branches_near_limits(power_c1_third):
    case = case_for_data(power_c1_third)
    z = case.g_y0 + 1.0
    bs = finite_branches(power_c1_third, z, 1e8)
    for branch in (BRANCH_MINUS, BRANCH_PLUS, BRANCH_MIDDLE):
        sol = bs.get(branch)
        assert sol is not None
        assert sol.residual <= 1e-10
        assert abs(sol.y - invert_branch(case, branch, z).y) <= 1e-2
    assert bs.minus.y < 0


def test_branches_below_cusp(power_c1_third):
    case = case_for_data(power_c1_third)
    bs = finite_branches(power_c1_third, case.g_y0 - 0.5, 1e8)
    assert bs.minus is not None
    assert bs.plus is None and bs.middle is None


def test_branch_set_invariants(power_c1_third):
    for z in (-3.0, 0.0, 2.5, 4.0):
        bs = finite_branches(power_c1_third, z, 1e6)
        for branch in (BRANCH_MINUS, BRANCH_PLUS, BRANCH_MIDDLE):
            sol = bs.get(branch)
            if sol is not None:
                assert abs(critical_curve_finite(power_c1_third, sol.y, 1e6) - z) <= 1e-10


# -- tie point ---------------------------------------------------------------


def test_tie_point_window_and_convergence(power_c1_third):
    case = case_for_data(power_c1_third)
    z4 = phase_tie_point(power_c1_third, 1e4)
    z6 = phase_tie_point(power_c1_third, 1e6)
    assert case.g_y0 < z6 < 10.0
    # Cauchy behavior: the dyadic increments shrink toward the limit
    assert abs(z6 - case.discontinuity_z) < abs(z4 - case.discontinuity_z)
    assert abs(z6 - case.discontinuity_z) <= 0.05


def test_tie_difference_sign_structure(power_c1_third):
    # the branch phase difference changes sign across the tie and is
    # strictly monotone (increasing) on the window
    t = 1e6
    zc = phase_tie_point(power_c1_third, t)
    case = case_for_data(power_c1_third)

    def diff(z):
        bs = finite_branches(power_c1_third, z, t)
        return (rescaled_phase(power_c1_third, bs.plus.y, z, t)
                - rescaled_phase(power_c1_third, bs.minus.y, z, t))

    zs = np.linspace(case.g_y0 + 0.15, 6.0, 12)
    vals = [diff(float(z)) for z in zs]
    assert np.all(np.diff(vals) > 0)
    assert diff(zc - 0.1) < 0 < diff(zc + 0.1)


def test_branch_phase_derivative_identity(power_c1_third):
    # d/dz of the branch phase value equals -(z - y_branch)/2
    t = 1e6
    h = 1e-4
    for z in (2.5, 3.5):
        for branch in (BRANCH_MINUS, BRANCH_PLUS):
            def hval(zz):
                bs = finite_branches(power_c1_third, zz, t)
                return rescaled_phase(power_c1_third, bs.get(branch).y, zz, t)

            fd = (hval(z + h) - hval(z - h)) / (2 * h)
            yb = finite_branches(power_c1_third, z, t).get(branch).y
            assert fd == pytest.approx(-0.5 * (z - yb), abs=1e-6)


def test_tie_error_for_family_without_case(zero_data):
    with pytest.raises(ValueError):
        phase_tie_point(zero_data, 100.0)


# -- property report ---------------------------------------------------------


def test_properties_degenerate(zero_data):
    rep = check_properties(zero_data, 10.0)
    assert rep.degenerate
    assert rep.all_pass()
    blob = rep.to_json()
    assert set(blob) == {f"property_{i}" for i in range(1, 10)} | {"degenerate"}


def test_properties_power_c1(power_c1_third):
    rep = check_properties(power_c1_third, 1e6)
    assert not rep.degenerate
    assert rep.all_pass(), {k: v for k, v in rep.properties.items() if not v["pass"]}
    # property 9 measures a positive concavity floor
    assert rep.properties["property_9"]["details"]["C1"] > 0
    # property 3 bound holds with nonnegative margin
    assert rep.properties["property_3"]["margin"] >= 0
    blob = json.dumps(rep.to_json())
    assert "property_1" in blob


def test_properties_json_keys_fixed(power_c1_third):
    rep = check_properties(power_c1_third, 1e4)
    blob = rep.to_json()
    for i in range(1, 10):
        entry = blob[f"property_{i}"]
        assert set(entry) == {"pass", "margin", "details"}


# -- concentration -----------------------------------------------------------


def test_concentration_zero_data_closed_form(zero_data):
    # pure Gaussian: the strip mass is erf(mu / (2 sqrt(t)) ...) exactly
    r = concentration_ratio(zero_data, 0.0, 1.0, -1.0, 1.0)
    assert r.ratio == pytest.approx(float(erf(0.5)), abs=1e-8)
    r2 = concentration_ratio(zero_data, 0.0, 4.0, -1.0, 1.0)
    # T = sqrt(t) = 2, kernel variance 2t = 8: erf(2 / sqrt(8) / sqrt(2))
    assert r2.ratio == pytest.approx(float(erf(2.0 / (2.0 * 2.0))), abs=1e-8)


def test_concentration_bounds_and_monotonicity(power_c0):
    reflected = negate_reflect(power_c0)
    ratios = []
    c0s = []
    for t in (1e2, 1e3, 1e4, 1e5, 1e6):
        r = concentration_ratio(reflected, 0.0, t, -0.1, 0.1)
        assert 0.0 <= r.ratio <= 1.0
        ratios.append(r.ratio)
        c0s.append(r.c0)
    assert all(a > b for a, b in zip(ratios[:-1], ratios[1:]))
    # scaled maximum stays bounded in time
    assert max(map(abs, c0s)) < 10.0


def test_concentration_reflects_positive_data(power_c0):
    # positive families are reflected internally; both orientations give
    # the same ratio at x = 0 by symmetry
    a = concentration_ratio(power_c0, 0.0, 100.0, -0.1, 0.1)
    b = concentration_ratio(negate_reflect(power_c0), 0.0, 100.0, -0.1, 0.1)
    assert a.ratio == pytest.approx(b.ratio, rel=1e-9)


def test_concentration_validation(zero_data):
    with pytest.raises(ValueError):
        concentration_ratio(zero_data, 0.0, 1.0, 0.1, 0.2)


def test_concentration_decay_law(power_c0):
    reflected = negate_reflect(power_c0)
    ts = 10.0 ** np.arange(2.0, 5.01, 0.5)
    logs = []
    for t in ts:
        logs.append(concentration_ratio(reflected, 0.0, float(t), -0.1, 0.1).log_ratio)
    xvar = ts ** ((1 - 0.5) / (1 + 0.5))
    corr = np.corrcoef(xvar, logs)[0, 1]
    assert corr <= -0.99


def test_tie_point_dyadic_cauchy(power_c1_third):
    # |tie(4t) - tie(t)| shrinks along a dyadic sweep
    ties = [phase_tie_point(power_c1_third, t) for t in (1e4, 4e4, 1.6e5, 6.4e5)]
    incs = [abs(b - a) for a, b in zip(ties[:-1], ties[1:])]
    assert incs[0] > incs[1] > incs[2]


def test_concentration_four_x_regimes(power_c0):
    # probe x in all four analysis regimes; the quadrature is regime
    # agnostic and the ratio stays a proper fraction
    reflected = negate_reflect(power_c0)
    t = 1e4
    T = t ** (2.0 / 3.0)
    eps = 0.05
    for x in (0.5 * eps * T, 2.0 * eps * T, -3.0 * eps * T, -T / eps):
        r = concentration_ratio(reflected, float(x), t, -0.1, 0.1)
        assert 0.0 <= r.ratio <= 1.0
        assert math.isfinite(r.c0)
