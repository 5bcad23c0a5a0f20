"""Frechet derivatives of matrix functions from divided differences.

Run: python3 demos/derivatives.py
"""

import numpy as np

from moikit import ScalarFunction, divided_difference, finite_difference, frechet_derivative

rng = np.random.default_rng(11)
g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
A = (g + g.conj().T) / 4
g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
B = (g + g.conj().T) / 4

for spec in ("exp:1", "power:4", "poly:1,0,-2,0.5"):
    f = ScalarFunction.parse(spec)
    for order in (1, 2):
        d = frechet_derivative(f, A, B, order)
        fd = finite_difference(f, A, B, order)
        rel = np.linalg.norm(d - fd) / (1 + np.linalg.norm(d))
        print(f"{spec:16s} order {order}: relative gap to finite differences {rel:.1e}")

# Divided differences stay accurate when nodes nearly coincide.
f = ScalarFunction.exp(1.0)
for gap in (1e-2, 1e-8, 1e-15, 0.0):
    z = divided_difference(f, [0.3, 0.3 + gap, 0.3 + 2 * gap])
    print(f"exp[0.3, 0.3+h, 0.3+2h] with h={gap:.0e}: {z.real:.15f}  (limit e^0.3/2 = {np.exp(0.3) / 2:.15f})")
