"""Spectral measures of Hermitian matrices and their tensor products.

Run: python3 demos/spectral_measures.py
"""

import numpy as np

from moikit import eig_hermitian, pvm_from_spectral, pvm_integrate, pvm_linf_norm, pvm_tensor

rng = np.random.default_rng(7)

# A Hermitian matrix with a repeated eigenvalue: the measure merges the cluster
# into a single rank-2 atom.
q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
A = q @ np.diag([-1.0, 0.5, 0.5, 2.0]) @ q.conj().T
P = pvm_from_spectral(eig_hermitian(A))
print("atoms:", [float(v) for v in P.values])
print("ranks:", [int(round(np.trace(p).real)) for p in P.projections])

# Integrating the identity function gives back A; any other function gives f(A).
print("||int x dP - A||_F =", np.linalg.norm(pvm_integrate(P, lambda x: x) - A))
expA = pvm_integrate(P, np.exp)
w, v = np.linalg.eigh(A)
print("||int exp dP - expm(A)||_F =", np.linalg.norm(expA - (v * np.exp(w)) @ v.conj().T))

# The sup norm only sees atoms that carry a nonzero projection.
print("L-inf norm of x^2 over the spectrum:", pvm_linf_norm(P, lambda x: x * x))

# Tensor product measure: atoms are pairs, projections are Kronecker products.
B = np.diag([1.0, -1.0])
T = pvm_tensor([P, pvm_from_spectral(eig_hermitian(B))])
print("tensor atoms:", len(T), "of dimension", T.dim)
total = sum(T.projections)
print("resolution of identity error:", np.linalg.norm(total - np.eye(T.dim)))
