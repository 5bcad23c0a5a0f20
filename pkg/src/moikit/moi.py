"""Multiple operator integrals at finite dimension.

Two independent engines evaluate

    (I^P phi)[b_1, ..., b_k] = sum_w phi(w) p_1(w_1) b_1 p_2(w_2) ... b_k p_{k+1}(w_{k+1})

* :func:`moi_spectral` sums over the full product lattice of atoms;
* :func:`moi_ipd` integrates ``P_1(f_1(., s)) b_1 ... b_k P_{k+1}(f_{k+1}(., s))``
  against the measure of an integral projective decomposition of ``phi``.

Both accept rectangular chains: ``b_j`` has shape ``(dim P_j, dim P_{j+1})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .decomp import (
    IPD,
    IntegralProjectiveDecomposition,
    ipd_from_table,
    ipd_norm_bound,
    target_array,
)
from .errors import (
    ArityMismatch,
    EmptyList,
    ExponentMismatch,
    LatticeTooLarge,
    ShapeMismatch,
    SplitOutOfRange,
)
from .numkit import TraceFunctional, as_matrix, fro, fsum_stack, lp_norm, opnorm, schatten_norm
from .pvm import FinitePVM, pvm_integrate

MAX_LATTICE = 10**6


@dataclass(frozen=True, eq=False)
class MOIProblem:
    """Measures ``P_1..P_{k+1}`` and operators ``b_1..b_k`` forming a shape chain."""

    pvms: tuple
    b: tuple

    def __post_init__(self):
        pvms = tuple(self.pvms)
        b = tuple(as_matrix(x) for x in self.b)
        if not pvms:
            raise EmptyList("an MOI needs at least one measure")
        if len(b) != len(pvms) - 1:
            raise ShapeMismatch(f"{len(pvms)} measures need {len(pvms) - 1} operators, got {len(b)}")
        for j, bj in enumerate(b):
            want = (pvms[j].dim, pvms[j + 1].dim)
            if bj.shape != want:
                raise ShapeMismatch(f"b_{j + 1} has shape {bj.shape}, expected {want}")
        object.__setattr__(self, "pvms", pvms)
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return len(self.b)

    def lattice_size(self) -> int:
        return math.prod(len(P) for P in self.pvms)

    def scale(self, phi=None) -> float:
        """``prod_j (1 + ||b_j||_F) * (1 + max|phi|)``: the reference size for equality tolerances."""
        s = math.prod(1.0 + fro(bj) for bj in self.b)
        if phi is not None:
            t = target_array(phi, self.pvms)
            s *= 1.0 + (float(np.abs(t).max()) if t.size else 0.0)
        return s

    def sub(self, start: int, stop: int) -> "MOIProblem":
        """Sub-problem on measures ``start..stop-1`` (0-based) with the operators between them."""
        return MOIProblem(self.pvms[start:stop], self.b[start:stop - 1])


def moi_spectral(prob: MOIProblem, phi) -> np.ndarray:
    """Spectral-sum engine: enumerate every tuple of atoms.

    Prefix products ``p_1 b_1 ... p_k b_k`` are built depth first; the last
    measure is integrated against the remaining row of the symbol table.
    """
    if prob.lattice_size() > MAX_LATTICE:
        raise LatticeTooLarge(f"atom lattice has {prob.lattice_size()} tuples (cap {MAX_LATTICE})")
    table = target_array(phi, prob.pvms)
    k = prob.k
    if k == 0:
        return pvm_integrate(prob.pvms[0], table)
    stacks = [P.stack() for P in prob.pvms]
    terms = []

    def walk(level, prefix, idx):
        if level == k:
            row = table[idx]
            terms.append(prefix @ np.tensordot(row, stacks[k], axes=1))
            return
        for i in range(len(prob.pvms[level])):
            walk(level + 1, prefix @ stacks[level][i] @ prob.b[level], idx + (i,))

    d1 = prob.pvms[0].dim
    walk(0, np.eye(d1, dtype=complex), ())
    return fsum_stack(np.array(terms))


def moi_ipd(prob: MOIProblem, ipd: IntegralProjectiveDecomposition) -> np.ndarray:
    """Decomposition engine: ``sum_s w_s P_1(f_1(., s)) b_1 ... b_k P_{k+1}(f_{k+1}(., s))``."""
    if ipd.arity != prob.k + 1:
        raise ArityMismatch(f"decomposition arity {ipd.arity} != k+1 = {prob.k + 1}")
    tabs = ipd.tables(prob.pvms)
    n = len(ipd.measure)
    d_first, d_last = prob.pvms[0].dim, prob.pvms[-1].dim
    if n == 0:
        return np.zeros((d_first, d_last), dtype=complex)
    ops = [np.einsum("is,iab->sab", tab, P.stack()) for tab, P in zip(tabs, prob.pvms)]
    acc = ops[0]
    for bj, op in zip(prob.b, ops[1:]):
        acc = (acc @ bj) @ op
    acc = np.asarray(ipd.weights)[:, None, None] * acc
    return fsum_stack(acc)


def moi_operator_bound_gap(prob: MOIProblem, ipd: IPD) -> float:
    """``||I[b]|| - ||phi||_witness * prod ||b_j||``; nonpositive up to rounding."""
    lhs = opnorm(moi_ipd(prob, ipd))
    rhs = ipd_norm_bound(ipd, prob.pvms) * math.prod(opnorm(bj) for bj in prob.b)
    return lhs - rhs


# ---------------------------------------------------------------------------
# algebraic operations

def tensor_table(psi1, psi2) -> np.ndarray:
    """``(psi1 (x) psi2)(w) = psi1(w_1..w_m) psi2(w_{m+1}..)`` as a dense table."""
    return np.multiply.outer(np.asarray(psi1, dtype=complex), np.asarray(psi2, dtype=complex))


def _split_check(prob: MOIProblem, m: int) -> None:
    if not 1 <= m <= prob.k:
        raise SplitOutOfRange(f"split m={m} outside 1..{prob.k}")


def moi_compose_outer(prob: MOIProblem, m: int, psi1, psi2) -> np.ndarray:
    """``(I psi1)[b_1..b_{m-1}] b_m (I psi2)[b_{m+1}..b_k]`` with ``psi1`` on the
    first ``m`` measures and ``psi2`` on the remaining ones."""
    _split_check(prob, m)
    left = moi_spectral(prob.sub(0, m), target_array(psi1, prob.pvms[:m]))
    right = moi_spectral(prob.sub(m, prob.k + 1), target_array(psi2, prob.pvms[m:]))
    return left @ prob.b[m - 1] @ right


def inner_table(phi, psi, m: int, Ps: Sequence[FinitePVM]) -> np.ndarray:
    """``phi(w) * psi(w_m, w_{m+1})`` on the full lattice (``m`` is 1-based)."""
    phi = target_array(phi, Ps)
    psi = target_array(psi, Ps[m - 1:m + 1])
    shape = [1] * phi.ndim
    shape[m - 1], shape[m] = psi.shape
    return phi * psi.reshape(shape)


def moi_compose_inner(prob: MOIProblem, m: int, phi, psi) -> np.ndarray:
    """``(I phi)[b_1, .., (I^{P_m, P_{m+1}} psi)[b_m], .., b_k]``."""
    _split_check(prob, m)
    inner = moi_spectral(prob.sub(m - 1, m + 1), target_array(psi, prob.pvms[m - 1:m + 1]))
    b = list(prob.b)
    b[m - 1] = inner
    return moi_spectral(MOIProblem(prob.pvms, b), phi)


def permute_ipd(ipd: IPD, order: Sequence[int]) -> IPD:
    return IntegralProjectiveDecomposition(ipd.measure, [ipd.factors[i] for i in order],
                                           name=ipd.name)


def rotate(prob: MOIProblem, ipd: IPD, closing, shift: int):
    """Cyclic relabelling ``j -> j + shift (mod k+1)`` of measures, factors and
    operators, where ``closing`` plays the role of ``b_{k+1}``.

    Returns ``(prob', ipd', closing')`` with
    ``Tr(I^{P}(ipd)[b] closing) == Tr(I^{P'}(ipd')[b'] closing')``.
    """
    m = prob.k + 1
    order = [(j + shift) % m for j in range(m)]
    ops = list(prob.b) + [as_matrix(closing)]
    new_ops = [ops[i] for i in order]
    new_prob = MOIProblem([prob.pvms[i] for i in order], new_ops[:-1])
    return new_prob, permute_ipd(ipd, order), new_ops[-1]


def trace_pairing(prob: MOIProblem, ipd: IPD, closing) -> complex:
    """``Tr(I(ipd)[b] @ closing)``."""
    return complex(np.trace(moi_ipd(prob, ipd) @ as_matrix(closing)))


def integral_product_traces(Q: FinitePVM, table, weights, mats) -> tuple[complex, complex]:
    """Traces of ``sum_s w_s A(s) Q(phi(., s))`` and ``sum_s w_s Q(phi(., s)) A(s)``.

    ``table`` has shape ``(atoms, points)`` and ``mats`` shape ``(points, d, d)``.
    """
    table = np.asarray(table, dtype=complex)
    mats = np.asarray(mats, dtype=complex)
    w = np.asarray(weights, dtype=float)[:, None, None]
    q = np.einsum("is,iab->sab", table, Q.stack())
    left = fsum_stack(w * (mats @ q))
    right = fsum_stack(w * (q @ mats))
    return complex(np.trace(left)), complex(np.trace(right))


# ---------------------------------------------------------------------------
# estimates

@dataclass(frozen=True)
class EstimateReport:
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def violated(self) -> bool:
        return self.lhs > self.rhs + 1e-9 * (1.0 + self.rhs)

    def as_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "violated": self.violated}


def _reciprocal(p) -> float:
    p = float(p)
    return 0.0 if math.isinf(p) else 1.0 / p


def check_exponents(p, ps: Sequence) -> None:
    if abs(_reciprocal(p) - math.fsum(_reciprocal(q) for q in ps)) > 1e-12:
        raise ExponentMismatch(f"1/{p} != sum of reciprocals of {list(ps)}")


def _evaluate(prob: MOIProblem, symbol) -> tuple[np.ndarray, float]:
    # a decomposition is its own norm witness; a bare table gets the atomic one
    if isinstance(symbol, IntegralProjectiveDecomposition):
        return moi_ipd(prob, symbol), ipd_norm_bound(symbol, prob.pvms)
    table = target_array(symbol, prob.pvms)
    return moi_spectral(prob, table), ipd_norm_bound(ipd_from_table(table, prob.pvms), prob.pvms)


def moi_schatten_check(prob: MOIProblem, symbol, p, ps: Sequence) -> EstimateReport:
    """``||I[b]||_{S_p}`` against ``witness * prod_j ||b_j||_{S_{p_j}}``."""
    if len(ps) != prob.k:
        raise ExponentMismatch(f"need {prob.k} exponents p_j, got {len(ps)}")
    check_exponents(p, ps)
    result, bound = _evaluate(prob, symbol)
    rhs = bound * math.prod(schatten_norm(bj, q) for bj, q in zip(prob.b, ps))
    return EstimateReport(schatten_norm(result, p), rhs)


def moi_lp_check(prob: MOIProblem, tau: TraceFunctional, symbol, p, ps: Sequence) -> EstimateReport:
    """Noncommutative L^p analogue of :func:`moi_schatten_check` for block-diagonal data."""
    if len(ps) != prob.k:
        raise ExponentMismatch(f"need {prob.k} exponents p_j, got {len(ps)}")
    check_exponents(p, ps)
    for P in prob.pvms:
        for proj in P.projections:
            tau.blocks(proj)
    for bj in prob.b:
        tau.blocks(bj)
    result, bound = _evaluate(prob, symbol)
    rhs = bound * math.prod(lp_norm(bj, tau, q) for bj, q in zip(prob.b, ps))
    return EstimateReport(lp_norm(result, tau, p), rhs)


__all__ = [
    "MOIProblem", "moi_spectral", "moi_ipd", "moi_compose_outer", "moi_compose_inner",
    "moi_schatten_check", "moi_lp_check", "EstimateReport", "tensor_table", "inner_table",
    "rotate", "trace_pairing", "integral_product_traces", "permute_ipd",
    "moi_operator_bound_gap", "check_exponents",
]
