#!/usr/bin/env python3
# Concentration of the Hopf-Cole denominator: for (reflected) negative data
# the mass of int e^H escapes the central strip at the stretched-exponential
# rate exp(-nu t^{(1-alpha)/(1+alpha)}).  The log mass fraction against
# t^{(1-alpha)/(1+alpha)} is a straight line.
#
# Usage: python demos/demo_concentration.py
import csv
from pathlib import Path

import numpy as np

from hopfcole.initial_data import FamilySpec, make_family, negate_reflect
from hopfcole.rescaled import concentration_ratio

alpha = 0.5
data = negate_reflect(make_family(FamilySpec("PowerC0", kappa=1.0, alpha=alpha)))
ts = 10.0 ** np.arange(2.0, 5.001, 0.5)

rows = []
for t in ts:
    r = concentration_ratio(data, 0.0, float(t), -0.1, 0.1)
    rows.append((float(t), r.ratio, r.log_ratio, r.c0))
    print(f"t = {t:10.3g}   strip mass fraction = {r.ratio:.3e}   "
          f"log = {r.log_ratio:9.4f}   scaled max C0 = {r.c0:.4f}")

x = ts ** ((1.0 - alpha) / (1.0 + alpha))
logs = np.asarray([r[2] for r in rows])
slope, icept = np.polyfit(x, logs, 1)
corr = np.corrcoef(x, logs)[0, 1]
print(f"\nfitted law: log(ratio) = {slope:.4f} * t^(1/3) + {icept:.4f}")
print(f"fitted decay constant nu = {-slope:.4f}, correlation = {corr:.5f}")

out = Path("demo_out")
out.mkdir(exist_ok=True)
with open(out / "concentration.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["t", "ratio", "log_ratio", "c0"])
    w.writerows(rows)
print(f"wrote {out / 'concentration.csv'}")
