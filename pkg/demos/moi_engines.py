"""Two ways to evaluate a multiple operator integral.

The spectral engine sums the symbol over all atom tuples.  The decomposition
engine writes the symbol as an integral of products of one-variable factors
and sums operator products instead.  Both must agree.

Run: python3 demos/moi_engines.py
"""

import numpy as np

from moikit import (
    MOIProblem,
    ScalarFunction,
    dd_table,
    eig_hermitian,
    ipd_exp_dd,
    ipd_monomial_dd,
    moi_ipd,
    moi_spectral,
    pvm_from_spectral,
)


def herm(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = g + g.conj().T
    return h / np.linalg.norm(h, 2)


rng = np.random.default_rng(3)
k = 2
Ps = [pvm_from_spectral(eig_hermitian(herm(rng, 5))) for _ in range(k + 1)]
bs = [rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)) for _ in range(k)]
prob = MOIProblem(Ps, bs)

# Monomial symbol: second divided difference of x^5.
table = dd_table(ScalarFunction.power(5), [P.values for P in Ps])
a = moi_spectral(prob, table)
b = moi_ipd(prob, ipd_monomial_dd(5, k))
print("x^5, k=2: engine gap / scale =", np.linalg.norm(a - b) / prob.scale(table))

# Exponential symbol: simplex quadrature converges quickly as nodes are added.
table = dd_table(ScalarFunction.exp(0.8), [P.values for P in Ps])
a = moi_spectral(prob, table)
for nodes in (2, 4, 8, 12):
    b = moi_ipd(prob, ipd_exp_dd(k, 0.8, nodes))
    print(f"exp(0.8 x), {nodes:2d} nodes per axis: gap / scale = "
          f"{np.linalg.norm(a - b) / prob.scale(table):.2e}")
