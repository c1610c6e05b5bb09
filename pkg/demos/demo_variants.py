#!/usr/bin/env python3
# Profile variants beyond the symmetric positive tail:
#   - sign-flipped tails (-kappa at +inf, +kappa at -inf): same construction
#     with a different critical curve; equal amplitudes put the jump at 0;
#   - log-corrected tails kappa/(|y|^alpha ln^beta |y|): same profile, but on
#     the anomalous scale mu(t) solving mu^{1+alpha} ln^beta(mu) = t;
#   - asymmetric exponents (alpha right, beta left): piecewise profile
#     0 | z | kappa |y_plus(z)|^-alpha with a jump at z_e and a corner at 0.
#
# Usage: python demos/demo_variants.py
import csv
from pathlib import Path

import numpy as np

from hopfcole import burgers
from hopfcole.initial_data import FamilySpec, make_family
from hopfcole.profiles import DiscontinuityError, log_corrected_scale, profile_value
from hopfcole.rescaled import case_for_data

out = Path("demo_out")
out.mkdir(exist_ok=True)
t = 1e8

print("sign-flipped tails")
sf = make_family(FamilySpec("SignFlipped", kappa=1.0, alpha=1.0 / 3.0))
sfc = case_for_data(sf)
print(f"  jump at z_d = {sfc.discontinuity_z:.3g} "
      "(equal tail amplitudes force the tie to the origin)")
m, amp = t ** 0.75, t ** 0.25
rows = []
for z in np.linspace(-4.0, 4.0, 81):
    v = amp * burgers.eval(sf, float(z) * m, t)
    try:
        p = profile_value(sfc, float(z))
    except DiscontinuityError:
        p = float("nan")
    rows.append(("sign_flipped", float(z), v, p))
print(f"  p(-2) = {profile_value(sfc, -2.0):+.5f}   p(+2) = {profile_value(sfc, 2.0):+.5f}")

print("log-corrected tails")
pl = make_family(FamilySpec("PowerLog", kappa=1.0, alpha=1.0 / 3.0, beta=1.0))
plc = case_for_data(pl)
target = profile_value(plc, -1.0)
for tt in (1e6, 1e8, 1e10):
    mu = log_corrected_scale(1.0 / 3.0, 1.0, tt)
    v = (tt / mu) * burgers.eval(pl, -mu, tt)
    print(f"  t = {tt:8.0e}: mu(t) = {mu:12.5g}   (t/mu) f(-mu, t) = {v:.5f}   "
          f"profile = {target:.5f}")

print("asymmetric tails")
asym = make_family(FamilySpec("Asymmetric", kappa=1.0, alpha=1.0 / 3.0, beta=2.0 / 3.0))
ac = case_for_data(asym)
ze = ac.discontinuity_z
print(f"  jump at z_e = {ze:.6f} (distinct from the symmetric z_c)")
for z in (-2.0, 0.5 * ze, ze + 0.5):
    v = amp * burgers.eval(asym, float(z) * m, t)
    p = profile_value(ac, float(z))
    rows.append(("asymmetric", float(z), v, p))
    print(f"  z = {z:+.4f}: rescaled f = {v:+.5f}   profile = {p:+.5f}")

with open(out / "variant_profiles.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["case", "z", "rescaled_f", "profile"])
    w.writerows(rows)
print(f"wrote {out / 'variant_profiles.csv'}")
