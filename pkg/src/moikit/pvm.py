"""Finite projection-valued measures.

A :class:`FinitePVM` is a resolution of the identity indexed by atom labels.
Subsets of the label set are passed as explicit label lists; integration of
a scalar table ``phi`` is ``sum_atoms phi(label) * projection``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DuplicateLabels, EmptyList, InvalidPVM, MissingLabel
from .numkit import SpectralResolution, fro, fsum_stack, hermitian_part

PVM_TOL = 1e-10
ZERO_TOL = 1e-12


def _hashable(label):
    if isinstance(label, list):
        return tuple(_hashable(x) for x in label)
    if isinstance(label, np.generic):
        return label.item()
    return label


@dataclass(frozen=True, eq=False)
class FinitePVM:
    """Finite projection-valued measure.

    Parameters
    ----------
    labels : sequence
        Distinct, hashable atom labels (reals, ints, strings or tuples).
    projections : sequence of ndarray
        Orthogonal projections, one per atom, summing to the identity.
    values : sequence, optional
        Real coordinates attached to each atom (the eigenvalue for spectral
        measures, the tuple of factor eigenvalues for tensor products).
        Defaults to the labels themselves.
    keep_zero_atoms : bool
        If False, atoms whose projection vanishes are dropped on construction.
    """

    labels: tuple
    projections: tuple
    values: tuple = None
    keep_zero_atoms: bool = True
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        labels = tuple(_hashable(lab) for lab in self.labels)
        projs = tuple(np.array(p, dtype=complex) for p in self.projections)
        values = tuple(self.values) if self.values is not None else labels
        if not labels:
            raise InvalidPVM("a PVM needs at least one atom")
        if not (len(labels) == len(projs) == len(values)):
            raise InvalidPVM("labels, projections and values must have equal length")
        if len(set(labels)) != len(labels):
            raise DuplicateLabels("atom labels must be distinct")
        dim = projs[0].shape[0]
        if any(p.shape != (dim, dim) for p in projs):
            raise InvalidPVM("projections must be square of a common size")
        if not self.keep_zero_atoms:
            keep = [i for i, p in enumerate(projs) if fro(p) > ZERO_TOL]
            labels = tuple(labels[i] for i in keep)
            projs = tuple(projs[i] for i in keep)
            values = tuple(values[i] for i in keep)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "projections", projs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @property
    def dim(self) -> int:
        return self.projections[0].shape[0]

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._index[_hashable(label)]
        except KeyError:
            raise MissingLabel(f"label {label!r} is not an atom of this PVM") from None

    def stack(self) -> np.ndarray:
        """Projections stacked into an array of shape ``(atoms, dim, dim)``."""
        return np.array(self.projections)

    def nonzero(self) -> np.ndarray:
        """Boolean mask of atoms with a nonzero projection."""
        return np.array([fro(p) > ZERO_TOL for p in self.projections])

    def measure(self, subset: Sequence) -> np.ndarray:
        """``P(G)`` for a subset ``G`` given as a list of labels (empty list gives 0)."""
        idx = sorted({self.index(lab) for lab in subset})
        if not idx:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return fsum_stack(self.stack()[idx])

    def invariant_residual(self) -> float:
        """Largest violation of idempotence, self-adjointness, orthogonality and ``P(Omega) = 1``."""
        ps = self.projections
        worst = 0.0
        for i, p in enumerate(ps):
            worst = max(worst, fro(p @ p - p), fro(p - p.conj().T))
            for q in ps[i + 1:]:
                worst = max(worst, fro(p @ q))
        return max(worst, fro(fsum_stack(self.stack()) - np.eye(self.dim)))

    def validate(self, tol: float = PVM_TOL) -> "FinitePVM":
        r = self.invariant_residual()
        if r > tol:
            raise InvalidPVM(f"projection invariants violated (residual {r:.3e})")
        return self


def table_values(P: FinitePVM, phi) -> np.ndarray:
    """Values of a scalar table on the atoms of ``P``, in atom order.

    ``phi`` may be a mapping from labels to scalars, a callable applied to
    each atom's value (eigenvalue) or an array already in atom order.
    """
    if isinstance(phi, Mapping):
        norm = {_hashable(k): v for k, v in phi.items()}
        try:
            vals = [norm[lab] for lab in P.labels]
        except KeyError as exc:
            raise MissingLabel(f"no table entry for label {exc.args[0]!r}") from None
        return np.array(vals, dtype=complex)
    if callable(phi):
        return np.array([phi(v) for v in P.values], dtype=complex)
    vals = np.asarray(phi, dtype=complex).reshape(-1)
    if vals.shape[0] != len(P):
        raise MissingLabel(f"table has {vals.shape[0]} entries for {len(P)} atoms")
    return vals


def pvm_from_spectral(S: SpectralResolution, keep_zero_atoms: bool = True) -> FinitePVM:
    """Spectral measure of a Hermitian matrix, labelled by its eigenvalues."""
    return FinitePVM(tuple(S.eigenvalues), tuple(S.projections), keep_zero_atoms=keep_zero_atoms)


def pvm_counting(labels: Sequence) -> FinitePVM:
    """Projection-valued counting measure: atom ``i`` carries ``e_i e_i^*`` on C^n."""
    labels = [_hashable(lab) for lab in labels]
    if not labels:
        raise EmptyList("counting measure needs at least one label")
    if len(set(labels)) != len(labels):
        raise DuplicateLabels("counting-measure labels must be distinct")
    n = len(labels)
    projs = []
    for i in range(n):
        p = np.zeros((n, n), dtype=complex)
        p[i, i] = 1.0
        projs.append(p)
    return FinitePVM(tuple(labels), tuple(projs))


def pvm_integrate(P: FinitePVM, phi) -> np.ndarray:
    """``P(phi) = sum_atoms phi(label) * projection``."""
    vals = table_values(P, phi)
    return fsum_stack(vals[:, None, None] * P.stack())


def pvm_linf_norm(P: FinitePVM, phi) -> float:
    """Essential supremum of ``|phi|``: the max over atoms with nonzero projection."""
    vals = np.abs(table_values(P, phi))[P.nonzero()]
    return float(vals.max()) if vals.size else 0.0


def pvm_tensor(Ps: Sequence[FinitePVM]) -> FinitePVM:
    """Tensor product measure on the product of the label sets.

    Atom labels are integer tuples of factor atom indices; ``values`` holds
    the matching tuples of factor values.  The projection of atom
    ``(i1, ..., im)`` is ``kron(p1[i1], ..., pm[im])``.
    """
    Ps = list(Ps)
    if not Ps:
        raise EmptyList("tensor product of an empty list")
    labels, values, projs = [], [], []
    for idx in itertools.product(*(range(len(P)) for P in Ps)):
        mat = np.ones((1, 1), dtype=complex)
        for P, i in zip(Ps, idx):
            mat = np.kron(mat, P.projections[i])
        labels.append(idx)
        values.append(tuple(P.values[i] for P, i in zip(Ps, idx)))
        projs.append(hermitian_part(mat))
    return FinitePVM(tuple(labels), tuple(projs), tuple(values))


def rectangle(Ps: Sequence[FinitePVM], subsets: Sequence[Sequence]) -> np.ndarray:
    """``P1(G1) (x) ... (x) Pm(Gm)`` computed factorwise."""
    out = np.ones((1, 1), dtype=complex)
    for P, G in zip(Ps, subsets):
        out = np.kron(out, P.measure(G))
    return out


def rectangle_labels(Ps: Sequence[FinitePVM], subsets: Sequence[Sequence]) -> list[tuple]:
    """Tensor-product atom labels of the rectangle ``G1 x ... x Gm``."""
    return [tuple(t) for t in itertools.product(*(sorted(P.index(g) for g in G)
                                                 for P, G in zip(Ps, subsets)))]

