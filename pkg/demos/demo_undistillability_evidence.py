"""Numerical evidence for 1-undistillability at the reference point x = 1/7.

The case-v state there is NPT with a single negative direction of full
Schmidt rank, its kernel has no product vector, and every compression
family probed stays positive semidefinite.
"""

import numpy as np

from qutritdistill import build_family, npt_check, witness_search
from qutritdistill.distill import precondition_report
from qutritdistill.minors import (
    MinorScanSpec,
    psd_scan_form1,
    refine_minimum,
    scan,
)

st = build_family("v", 1 / 7)

rep = npt_check(st)
print(f"x = 1/7: NPT = {rep.is_npt}, inertia {tuple(rep.inertia)}, "
      f"min eig of PT = {rep.min_eig_gamma:.6f}")

pre = precondition_report(st)
print("preconditions:")
for key, val in pre.items():
    print(f"  {key}: {val}")

# the structured witness families come up empty
rep = witness_search(st, strategy="ab", budget=2000)
print(f"witness search (a+b, budget 2000): witness {rep.witness}, "
      f"best value {rep.best_value:+.6f}")

# one-parameter compression family: positive semidefinite on the whole grid
entries, all_psd = psd_scan_form1()
worst = min(e["min_eigenvalue"] for e in entries)
print(f"one-parameter compressions: {len(entries)} grid points, "
      f"all PSD = {all_psd}, worst min eigenvalue {worst:.3e}")

# two-parameter compression minors over the standard window
panels = (0j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j)
res4 = scan(MinorScanSpec(which="alpha2_minor4", c_values=panels))
ref4 = refine_minimum(res4)
print(f"fourth minor: grid min {res4.min_value:.6e} at b={res4.argmin[0]}, "
      f"c={res4.argmin[1]}; refined {ref4['value']:.6e}")

for which in ("F", "G"):
    res = scan(MinorScanSpec(which=which))
    print(f"{which}: grid min {res.min_value:.6f} "
          f"(window check 1 <= min <= 10: {res.passed()})")
