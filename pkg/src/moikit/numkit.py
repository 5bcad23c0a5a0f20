"""Dense complex linear algebra kernel.

Hermitian eigendecomposition by cyclic Jacobi rotations, Schatten norms,
block-trace noncommutative L^p norms, Kronecker products and the
orthonormal-frame functional that characterizes the trace norm.

Matrices are plain complex ``numpy.ndarray`` objects.  Reductions that feed
reported numbers go through :func:`math.fsum` (exactly rounded, hence
independent of accumulation order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BlockMismatch,
    ConvergenceFailure,
    FrameLengthMismatch,
    InvalidExponent,
    InvalidMatrix,
    NonHermitianInput,
    NonOrthonormalFrame,
)

DEFAULT_CLUSTER_TOL = 1e-9
MAX_SWEEPS = 30
PROJECTION_TOL = 1e-10


# ---------------------------------------------------------------------------
# validation and summation helpers

def as_matrix(a, square: bool = False) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array, raising InvalidMatrix otherwise."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidMatrix(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {m.shape}")
    return m


def fro(a) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def opnorm(a) -> float:
    """Operator (spectral) norm."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def fsum_stack(stack) -> np.ndarray:
    """Exactly rounded sum of ``stack`` along its first axis."""
    stack = np.asarray(stack)
    shape = stack.shape[1:]
    if stack.shape[0] == 0:
        return np.zeros(shape, dtype=stack.dtype)
    flat = stack.reshape(stack.shape[0], -1)
    if np.iscomplexobj(flat):
        re = [math.fsum(col) for col in flat.real.T.tolist()]
        im = [math.fsum(col) for col in flat.imag.T.tolist()]
        out = np.array(re) + 1j * np.array(im)
    else:
        out = np.array([math.fsum(col) for col in flat.T.tolist()])
    return out.reshape(shape)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    # bitwise Hermitian: entry (i,j) and (j,i) are computed from the same pair
    return 0.5 * (a + a.conj().T)


def check_hermitian(a, rtol: float = 1e-10) -> np.ndarray:
    a = as_matrix(a, square=True)
    if fro(a - a.conj().T) > rtol * (1.0 + fro(a)):
        raise NonHermitianInput("matrix is not Hermitian within tolerance")
    return a


# ---------------------------------------------------------------------------
# eigendecomposition

def jacobi_eigh(a, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi.

    Each rotation annihilates one off-diagonal pair (p, q) with the unitary
    ``[[c, s e], [-s conj(e), c]]`` where ``e`` is the phase of ``a[p, q]``.

    Returns
    -------
    w : ndarray
        Eigenvalues, ascending.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    a = hermitian_part(a)
    v = np.eye(n, dtype=complex)
    scale = fro(a)
    if n == 1 or scale == 0.0:
        w = a.diagonal().real.copy()
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order]
    skip = 1e-17 * scale
    target = 1e-14 * scale
    for _ in range(max_sweeps):
        off = fro(a - np.diag(a.diagonal()))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g <= skip:
                    continue
                e = apq / g
                theta = (a[q, q].real - a[p, p].real) / (2.0 * g)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s * e], [-s * e.conjugate(), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ rot
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        off = fro(a - np.diag(a.diagonal()))
        if off > target:
            raise ConvergenceFailure(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps (off={off:.3e})"
            )
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True, eq=False)
class SpectralResolution:
    """Clustered spectral resolution ``A = sum_i eigenvalues[i] * projections[i]``."""

    dim: int
    eigenvalues: tuple
    projections: tuple

    def reconstruct(self) -> np.ndarray:
        return fsum_stack(np.array([lam * p for lam, p in zip(self.eigenvalues, self.projections)]))

    def check(self, tol: float = PROJECTION_TOL) -> float:
        """Largest violation of the projection invariants (idempotent, self-adjoint,
        orthogonal, summing to the identity)."""
        worst = 0.0
        ps = self.projections
        for i, p in enumerate(ps):
            worst = max(worst, fro(p @ p - p), fro(p - p.conj().T))
            for q in ps[i + 1:]:
                worst = max(worst, fro(p @ q))
        worst = max(worst, fro(fsum_stack(np.array(ps)) - np.eye(self.dim)))
        return worst


def eig_hermitian(a, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectralResolution:
    """Spectral resolution of a Hermitian matrix.

    Eigenvalues closer than ``cluster_tol * (1 + max|lambda|)`` (chained between
    neighbours) are merged into one atom whose projection is the sum of the
    rank-one eigenprojections; the atom's eigenvalue is the cluster mean.
    """
    if cluster_tol < 0:
        raise ValueError("cluster_tol must be nonnegative")
    a = as_matrix(a, square=True)
    if fro(a - a.conj().T) > 1e-10 * (1.0 + fro(a)):
        raise NonHermitianInput("matrix is not Hermitian within tolerance")
    w, v = jacobi_eigh(a)
    n = a.shape[0]
    gap = cluster_tol * (1.0 + float(np.max(np.abs(w))))
    groups = [[0]]
    for i in range(1, n):
        if w[i] - w[i - 1] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = []
    projections = []
    for g in groups:
        vg = v[:, g]
        eigenvalues.append(math.fsum(w[g].tolist()) / len(g))
        projections.append(hermitian_part(vg @ vg.conj().T))
    return SpectralResolution(n, tuple(eigenvalues), tuple(projections))


# ---------------------------------------------------------------------------
# norms

def _check_exponent(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"exponent must lie in [1, inf], got {p}")
    return p


def _power_sum_norm(values: np.ndarray, weights: np.ndarray | None, p: float) -> float:
    # (sum_i w_i v_i^p)^(1/p), rescaled by max(v) against overflow
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    top = float(values.max())
    if top == 0.0:
        return 0.0
    terms = (values / top) ** p
    if weights is not None:
        terms = terms * weights
    return top * math.fsum(terms.tolist()) ** (1.0 / p)


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)


def schatten_norm(a, p) -> float:
    """Schatten p-norm from singular values; ``p = inf`` is the operator norm."""
    p = _check_exponent(p)
    s = singular_values(as_matrix(a))
    if math.isinf(p):
        return float(s.max())
    return _power_sum_norm(s, None, p)


def polar(a) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``a = u @ h`` with ``u`` a partial isometry and ``h = |a|``.

    ``u`` is zero on ``ker a``; singular values below ``1e-14 * max`` count as zero.
    """
    a = as_matrix(a)
    w, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = s > 1e-14 * (s.max() if s.size else 0.0)
    u = w[:, keep] @ vh[keep, :]
    h = vh.conj().T @ np.diag(s) @ vh
    return u, hermitian_part(h)


@dataclass(frozen=True)
class TraceFunctional:
    """Weighted block trace ``tau(a) = sum_i weights[i] * Tr(a_i)``.

    ``a_i`` is the i-th diagonal block of ``a`` in the block structure given by
    ``block_sizes``.  All weights must be strictly positive so that ``tau`` is
    faithful.
    """

    block_sizes: tuple
    weights: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        weights = tuple(float(c) for c in self.weights)
        if not sizes or len(sizes) != len(weights):
            raise BlockMismatch("block_sizes and weights must be non-empty and of equal length")
        if any(s < 1 for s in sizes):
            raise BlockMismatch("block sizes must be positive")
        if any(not (c > 0.0) or math.isinf(c) for c in weights):
            raise BlockMismatch("weights must be finite and strictly positive")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def trace(cls, dim: int) -> "TraceFunctional":
        """The ordinary trace on ``dim x dim`` matrices."""
        return cls((dim,), (1.0,))

    @property
    def dim(self) -> int:
        return sum(self.block_sizes)

    def offsets(self) -> list[tuple[int, int]]:
        out, start = [], 0
        for s in self.block_sizes:
            out.append((start, start + s))
            start += s
        return out

    def off_block_mass(self, a) -> float:
        a = np.asarray(a)
        mask = np.ones(a.shape, dtype=bool)
        for lo, hi in self.offsets():
            mask[lo:hi, lo:hi] = False
        return fro(a[mask])

    def blocks(self, a, tol: float = 1e-10) -> list[np.ndarray]:
        """Diagonal blocks of ``a``; BlockMismatch if ``a`` is not block diagonal."""
        a = as_matrix(a, square=True)
        if a.shape[0] != self.dim:
            raise BlockMismatch(f"matrix dimension {a.shape[0]} != block total {self.dim}")
        if self.off_block_mass(a) > tol * (1.0 + fro(a)):
            raise BlockMismatch("matrix has mass outside the diagonal blocks")
        return [a[lo:hi, lo:hi] for lo, hi in self.offsets()]

    def __call__(self, a) -> complex:
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.dim, self.dim):
            raise BlockMismatch(f"matrix shape {a.shape} does not match dimension {self.dim}")
        diag = a.diagonal()
        re, im = [], []
        for (lo, hi), c in zip(self.offsets(), self.weights):
            re.extend((c * diag[lo:hi].real).tolist())
            im.extend((c * diag[lo:hi].imag).tolist())
        return complex(math.fsum(re), math.fsum(im))


def lp_norm(a, tau: TraceFunctional, p) -> float:
    """Noncommutative L^p norm ``tau(|a|^p)^(1/p)`` of a block-diagonal matrix."""
    p = _check_exponent(p)
    blocks = tau.blocks(a)
    svals = [singular_values(b) for b in blocks]
    if math.isinf(p):
        return float(max(s.max() for s in svals))
    values = np.concatenate(svals)
    weights = np.concatenate([np.full(len(s), c) for s, c in zip(svals, tau.weights)])
    return _power_sum_norm(values, weights, p)


# ---------------------------------------------------------------------------
# frames and tensor products

def is_orthonormal(vectors, tol: float = 1e-10) -> bool:
    vectors = np.asarray(vectors, dtype=complex)
    r = vectors.shape[1]
    return fro(vectors.conj().T @ vectors - np.eye(r)) <= tol


def frame_sum(a, e, f) -> float:
    """``sum_j |<a e_j, f_j>|`` for orthonormal frames given as matrix columns.

    ``e`` has shape ``(a.shape[1], r)`` (domain frame) and ``f`` has shape
    ``(a.shape[0], r)`` (codomain frame); ``r = 0`` gives the empty sum 0.
    """
    a = as_matrix(a)
    n, m = a.shape
    e = np.asarray(e, dtype=complex).reshape(m, -1)
    f = np.asarray(f, dtype=complex).reshape(n, -1)
    r = e.shape[1]
    if f.shape[1] != r or r > min(n, m):
        raise FrameLengthMismatch(
            f"frames of lengths {r} and {f.shape[1]} for a {n}x{m} matrix"
        )
    if r == 0:
        return 0.0
    if not (is_orthonormal(e) and is_orthonormal(f)):
        raise NonOrthonormalFrame("frame vectors are not orthonormal")
    inner = np.einsum("ij,ij->j", f.conj(), a @ e)
    return math.fsum(np.abs(inner).tolist())


def singular_frames(a) -> tuple[np.ndarray, np.ndarray]:
    """Right and left singular-vector frames (domain, codomain) of the nonzero part of ``a``."""
    a = as_matrix(a)
    w, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = s > 1e-14 * (s.max() if s.size else 0.0)
    return vh[keep, :].conj().T, w[:, keep]


def kron(a, b) -> np.ndarray:
    """Kronecker product; row index of the result is ``i1 * b.shape[0] + i2``."""
    return np.kron(as_matrix(a), as_matrix(b))
