"""Norm inequalities: Minkowski, frames and operator-integral estimates.

Run: python3 demos/inequalities.py
"""

import math

import numpy as np

from moikit import (
    MOIProblem,
    TraceFunctional,
    eig_hermitian,
    frame_sum,
    ipd_monomial_dd,
    lp_norm,
    moi_schatten_check,
    pvm_from_spectral,
    schatten_norm,
)
from moikit.numkit import singular_frames

rng = np.random.default_rng(9)
a = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
b = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
for p in (1, 1.5, 2, 3, math.inf):
    print(f"S_{p}: ||a+b|| = {schatten_norm(a + b, p):.4f} <= "
          f"{schatten_norm(a, p) + schatten_norm(b, p):.4f}")

tau = TraceFunctional((2, 3), (0.5, 2.0))
blk = np.zeros((5, 5), dtype=complex)
blk[:2, :2] = rng.standard_normal((2, 2))
blk[2:, 2:] = rng.standard_normal((3, 3))
print("block-trace L^3 norm:", lp_norm(blk, tau, 3))

# Sum |<a f_i, e_i>| never exceeds the trace norm; singular vectors attain it.
e, f = singular_frames(a)
print(f"trace norm {schatten_norm(a, 1):.6f}, attained by singular frames {frame_sum(a, e, f):.6f}")

# Holder-type estimate for a double operator integral of x^3.
g = rng.standard_normal((4, 4))
Ps = [pvm_from_spectral(eig_hermitian((g + g.T) / 8)) for _ in range(3)]
prob = MOIProblem(Ps, [rng.standard_normal((4, 4)) for _ in range(2)])
rep = moi_schatten_check(prob, ipd_monomial_dd(3, 2), 1, [2, 2])
print(f"||I[b1,b2]||_1 = {rep.lhs:.4f} <= {rep.rhs:.4f} (margin {rep.margin:.4f})")
