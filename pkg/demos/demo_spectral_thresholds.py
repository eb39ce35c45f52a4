"""Locate the PPT boundaries of the rank-five family by bisection.

The one-parameter branches change character where eigenvalues of the
partial transpose cross zero. Case v has a PPT window between two
crossings; case i is PPT on [1/7, 1/4].
"""

import numpy as np

from qutritdistill import build_family, find_threshold
from qutritdistill.linalg import partial_transpose

# coarse sweep first, to see the sign structure
xs = np.linspace(0.05, 0.95, 19)
print("case v sweep:")
print(f"{'x':>8} {'min eig':>12} {'2nd eig':>12} {'negatives':>10}")
for x in xs:
    lam = np.linalg.eigvalsh(partial_transpose(build_family("v", float(x)).rho, 3, 3))
    neg = int(np.sum(lam < -1e-10))
    print(f"{x:8.3f} {lam[0]:12.3e} {lam[1]:12.3e} {neg:10d}")

# the crossings, to 1e-9
r1 = find_threshold("v", "min_eig", (0.1, 0.2))
r2 = find_threshold("v", "second_eig", (0.2, 0.4))
print()
print(f"case v: min eig crosses at x = {r1.x_star:.9f}  ({r1.iterations} bisections)")
print(f"        reference (33-12*sqrt(6))/25 = {(33 - 12 * np.sqrt(6)) / 25:.9f}")
print(f"case v: 2nd eig crosses at x = {r2.x_star:.9f}")
print(f"        reference 3/11 = {3 / 11:.9f}")

r3 = find_threshold("i", "min_eig", (0.1, 0.2))
r4 = find_threshold("i", "min_eig", (0.2, 0.3))
print(f"case i: crossings at x = {r3.x_star:.9f} and {r4.x_star:.9f}")
print(f"        references 1/7 = {1 / 7:.9f} and 1/4 = 0.25")
