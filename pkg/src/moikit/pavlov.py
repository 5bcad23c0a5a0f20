"""Pavlov's vector measure and the Birman-Solomyak superoperator.

For measures ``P_1..P_{k+1}`` and operators ``b_1..b_k`` the vector measure
``P#b`` assigns to the atom ``w`` the matrix ``p_1(w_1) b_1 ... b_k p_{k+1}(w_{k+1})``
and extends to label sets by finite additivity.

Vectorization convention
------------------------
``vec`` is row-major: ``vec(c)[i * m + j] = c[i, j]`` for an ``n x m`` matrix
``c`` (``numpy.ravel`` with ``order="C"``).  With this convention

    vec(a @ c @ b) == kron(a, b.T) @ vec(c)

holds exactly (up to rounding) for ``a`` of shape ``n x n`` and ``b`` of shape
``m x m``; left multiplication by ``A`` is ``kron(A, I)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .decomp import target_array
from .errors import LatticeTooLarge, ShapeMismatch
from .moi import MAX_LATTICE, MOIProblem
from .numkit import fsum_stack, schatten_norm
from .pvm import FinitePVM, rectangle_labels
from .rng import as_generator


@dataclass(frozen=True, eq=False)
class VectorMeasureS2:
    """Finitely additive S_2-valued measure on the atom lattice of ``pvms``.

    ``atoms[i]`` is the value on the i-th lattice point, with lattice points
    ordered as ``labels`` (integer index tuples, C order).
    """

    pvms: tuple
    labels: tuple
    atoms: np.ndarray

    def __post_init__(self):
        self.atoms.setflags(write=False)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.atoms.shape[1:]

    def value(self, subset: Sequence[tuple]) -> np.ndarray:
        """Value on a set of lattice points (index tuples)."""
        idx = sorted({self._index[tuple(s)] for s in subset})
        if not idx:
            return np.zeros(self.shape, dtype=complex)
        return fsum_stack(self.atoms[idx])

    def rectangle(self, subsets: Sequence[Sequence]) -> np.ndarray:
        """Value on ``G_1 x ... x G_{k+1}`` with each ``G_j`` a list of atom labels of ``P_j``."""
        return self.value(rectangle_labels(self.pvms, subsets))

    def total(self) -> np.ndarray:
        return fsum_stack(self.atoms)


def pavlov_build(prob: MOIProblem) -> VectorMeasureS2:
    """Atom values ``p_1(w_1) b_1 ... b_k p_{k+1}(w_{k+1})`` on the full lattice."""
    if prob.lattice_size() > MAX_LATTICE:
        raise LatticeTooLarge(f"atom lattice has {prob.lattice_size()} points (cap {MAX_LATTICE})")
    stacks = [P.stack() for P in prob.pvms]
    k = prob.k
    labels, values = [], []

    def walk(level, prefix, idx):
        for i in range(len(prob.pvms[level])):
            cur = prefix @ stacks[level][i]
            if level == k:
                labels.append(idx + (i,))
                values.append(cur)
            else:
                walk(level + 1, cur @ prob.b[level], idx + (i,))

    walk(0, np.eye(prob.pvms[0].dim, dtype=complex), ())
    return VectorMeasureS2(prob.pvms, tuple(labels), np.array(values))


def pavlov_integrate(vm: VectorMeasureS2, phi) -> np.ndarray:
    """``sum_w phi(w) (P#b)({w})``."""
    t = target_array(phi, vm.pvms).reshape(-1)
    return fsum_stack(t[:, None, None] * vm.atoms)


def semivariation_sums(vm: VectorMeasureS2, tests: np.ndarray) -> np.ndarray:
    """``sum_w |Tr((P#b)({w}) c)|`` for each test operator ``c`` in ``tests``."""
    tr = np.abs(np.einsum("nab,tba->tn", vm.atoms, tests))
    return np.array([math.fsum(row) for row in tr.tolist()])


def semivariation_bounds(vm: VectorMeasureS2, b: Sequence[np.ndarray], samples: int,
                         rng=0) -> tuple[float, float]:
    """Sampled lower bound and certified upper bound for the semivariation.

    ``upper = prod_j ||b_j||_{S_2}``.  ``lower`` is the largest total variation
    ``sum_w |Tr((P#b)({w}) c)|`` over ``samples`` random test operators ``c``
    of unit S_2 norm, plus the polar witness ``c = total^* / ||total||_2``.

    ``rng`` is a seed or a generator with ``standard_normal``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    upper = math.prod(schatten_norm(bj, 2) for bj in b)
    gen = as_generator(rng)
    d1, dl = vm.shape
    z = gen.standard_normal((2, samples, dl, d1))
    tests = z[0] + 1j * z[1]
    tests /= np.linalg.norm(tests, axis=(1, 2))[:, None, None]
    total = vm.total()
    nt = np.linalg.norm(total)
    if nt > 0:
        tests = np.concatenate([tests, (total.conj().T / nt)[None]])
    lower = float(semivariation_sums(vm, tests).max())
    return lower, upper


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on ``n x m`` matrices, stored as an ``(n m) x (n m)`` matrix
    acting on row-major vectorizations."""

    matrix: np.ndarray
    shape: tuple

    def apply(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=complex)
        if b.shape != tuple(self.shape):
            raise ShapeMismatch(f"operand shape {b.shape} != {tuple(self.shape)}")
        return unvec(self.matrix @ vec(b), self.shape)


def vec(c) -> np.ndarray:
    return np.asarray(c).reshape(-1)


def unvec(v, shape) -> np.ndarray:
    return np.asarray(v).reshape(shape)


def bs_superoperator(P: FinitePVM, Q: FinitePVM, phi) -> Superoperator:
    """``sum_{i,j} phi(l_i, m_j) kron(p_i, q_j.T)``: the double operator integral
    ``b -> sum phi p_i b q_j`` on ``dim P x dim Q`` matrices."""
    t = target_array(phi, [P, Q])
    n, m = P.dim, Q.dim
    terms = [t[i, j] * np.kron(p, q.T)
             for i, p in enumerate(P.projections) for j, q in enumerate(Q.projections)]
    return Superoperator(fsum_stack(np.array(terms)).reshape(n * m, n * m), (n, m))
