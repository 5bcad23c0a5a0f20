"""Integral projective decompositions over discrete measure spaces.

A decomposition of a symbol ``phi(w_1, ..., w_m)`` is a weighted point set
``(points, weights)`` together with ``m`` factor functions such that

    phi(w) = sum_s weights[s] * f_1(w_1, s) * ... * f_m(w_m, s).

Continuous parameter spaces are discretized once, at construction, by a
Gauss-Legendre rule, so every decomposition here is a finite sum.  Factors
are evaluated on the atom *values* of a :class:`~moikit.pvm.FinitePVM` (the
eigenvalues, for spectral measures) and the resulting dense tables of shape
``(atoms, points)`` are memoized per atom-value set.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ArityMismatch, DegreeTooLow, InvalidMatrix, MissingLabel
from .pvm import FinitePVM


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite measure: point identifiers with nonnegative weights."""

    points: tuple
    weights: np.ndarray

    def __post_init__(self):
        points = tuple(self.points)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(points) != weights.shape[0]:
            raise ValueError("points and weights must have equal length")
        if np.any(~np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("weights must be finite and nonnegative")
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.points)


# ---------------------------------------------------------------------------
# factor evaluators: each maps a sequence of atom values to a (values, points) table

class Factor:
    npoints: int

    def table(self, values: Sequence) -> np.ndarray:
        raise NotImplementedError


class ConstFactor(Factor):
    def __init__(self, consts):
        self.consts = np.asarray(consts, dtype=complex).reshape(-1)
        self.npoints = self.consts.shape[0]

    def table(self, values):
        return np.broadcast_to(self.consts, (len(values), self.npoints)).copy()


class PowerFactor(Factor):
    """``lambda -> lambda ** exponents[s]``."""

    def __init__(self, exponents):
        self.exponents = np.asarray(exponents, dtype=int).reshape(-1)
        self.npoints = self.exponents.shape[0]

    def table(self, values):
        x = np.asarray(values, dtype=complex).reshape(-1, 1)
        return x ** self.exponents[None, :]


class ExpFactor(Factor):
    """``lambda -> scale[s] * exp(rates[s] * lambda)``."""

    def __init__(self, rates, scale=None):
        self.rates = np.asarray(rates, dtype=float).reshape(-1)
        self.npoints = self.rates.shape[0]
        self.scale = None if scale is None else np.asarray(scale, dtype=complex).reshape(-1)

    def table(self, values):
        x = np.asarray(values, dtype=float).reshape(-1, 1)
        out = np.exp(x * self.rates[None, :]).astype(complex)
        if self.scale is not None:
            out = out * self.scale[None, :]
        return out


class TableFactor(Factor):
    """Explicit table in atom order; rows must match the number of atoms."""

    def __init__(self, table):
        self.data = np.asarray(table, dtype=complex)
        if self.data.ndim != 2:
            raise InvalidMatrix("factor table must be 2-D (atoms x points)")
        self.npoints = self.data.shape[1]

    def table(self, values):
        if len(values) != self.data.shape[0]:
            raise MissingLabel(
                f"factor table has {self.data.shape[0]} rows for {len(values)} atoms"
            )
        return self.data.copy()


class FunctionFactor(Factor):
    """Generic ``f(value, point)`` evaluated pointwise."""

    def __init__(self, fn: Callable, points: Sequence):
        self.fn = fn
        self.points = tuple(points)
        self.npoints = len(self.points)

    def table(self, values):
        return np.array([[self.fn(v, s) for s in self.points] for v in values],
                        dtype=complex).reshape(len(values), self.npoints)


class IndicatorFactor(Factor):
    """``w -> phase[s] * [w is atom index[s]]``."""

    def __init__(self, index, phase=None):
        self.index = np.asarray(index, dtype=int).reshape(-1)
        self.npoints = self.index.shape[0]
        self.phase = (np.ones(self.npoints, dtype=complex) if phase is None
                      else np.asarray(phase, dtype=complex).reshape(-1))

    def table(self, values):
        out = np.zeros((len(values), self.npoints), dtype=complex)
        out[self.index, np.arange(self.npoints)] = self.phase
        return out


class ConcatFactor(Factor):
    def __init__(self, left: Factor, right: Factor):
        self.left, self.right = left, right
        self.npoints = left.npoints + right.npoints

    def table(self, values):
        return np.hstack([self.left.table(values), self.right.table(values)])


class ProductFactor(Factor):
    # point order: left-major, matching itertools.product(left_points, right_points)
    def __init__(self, left: Factor, right: Factor):
        self.left, self.right = left, right
        self.npoints = left.npoints * right.npoints

    def table(self, values):
        a = self.left.table(values)
        b = self.right.table(values)
        return (a[:, :, None] * b[:, None, :]).reshape(len(values), -1)


# ---------------------------------------------------------------------------

class IntegralProjectiveDecomposition:
    """Finite integral projective decomposition ``(measure, factors)``.

    Factor tables are computed lazily and cached by atom-value set.  After
    :meth:`freeze` no new cache entries are written, so a frozen object can be
    shared freely.
    """

    def __init__(self, measure: DiscreteMeasure, factors: Sequence[Factor], name: str = ""):
        factors = list(factors)
        if not factors:
            raise ArityMismatch("a decomposition needs at least one factor")
        for f in factors:
            if f.npoints != len(measure):
                raise ArityMismatch(
                    f"factor defined on {f.npoints} points, measure has {len(measure)}"
                )
        self.measure = measure
        self.factors = factors
        self.name = name
        self._cache: dict = {}
        self._frozen = False

    def __repr__(self):
        return (f"IntegralProjectiveDecomposition(name={self.name!r}, arity={self.arity}, "
                f"points={len(self.measure)})")

    @property
    def arity(self) -> int:
        return len(self.factors)

    @property
    def weights(self) -> np.ndarray:
        return self.measure.weights

    def table(self, j: int, P: FinitePVM) -> np.ndarray:
        key = (j, P.values)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        tab = self.factors[j].table(P.values)
        tab.setflags(write=False)
        if not self._frozen:
            self._cache[key] = tab
        return tab

    def tables(self, Ps: Sequence[FinitePVM]) -> list[np.ndarray]:
        _check_arity(self, Ps)
        return [self.table(j, P) for j, P in enumerate(Ps)]

    def freeze(self, Ps: Sequence[FinitePVM] = ()) -> "IntegralProjectiveDecomposition":
        if Ps:
            self.tables(Ps)
        self._frozen = True
        return self


IPD = IntegralProjectiveDecomposition


def _check_arity(ipd: IPD, Ps: Sequence) -> None:
    if len(Ps) != ipd.arity:
        raise ArityMismatch(f"decomposition has arity {ipd.arity}, got {len(Ps)} measures")


def target_array(phi, Ps: Sequence[FinitePVM]) -> np.ndarray:
    """Dense symbol table of shape ``(len(P_1), ..., len(P_m))``.

    ``phi`` may be an array of that shape, a mapping from label tuples to
    scalars, or a callable taking one atom value per factor.
    """
    shape = tuple(len(P) for P in Ps)
    if isinstance(phi, Mapping):
        out = np.empty(shape, dtype=complex)
        norm = {tuple(k) if isinstance(k, (list, tuple)) else (k,): v for k, v in phi.items()}
        for idx in itertools.product(*(range(n) for n in shape)):
            key = tuple(P.labels[i] for P, i in zip(Ps, idx))
            if key not in norm:
                raise MissingLabel(f"no table entry for label tuple {key!r}")
            out[idx] = norm[key]
        return out
    if callable(phi):
        out = np.empty(shape, dtype=complex)
        for idx in itertools.product(*(range(n) for n in shape)):
            out[idx] = phi(*(P.values[i] for P, i in zip(Ps, idx)))
        return out
    out = np.asarray(phi, dtype=complex)
    if out.shape != shape:
        raise MissingLabel(f"table shape {out.shape} does not match atom lattice {shape}")
    return out


def ipd_reconstruct(ipd: IPD, Ps: Sequence[FinitePVM]) -> np.ndarray:
    """The symbol ``sum_s w_s prod_j f_j(w_j, s)`` on the atom lattice of ``Ps``."""
    tabs = ipd.tables(Ps)
    letters = "abcdefghijklmnopqrstuvwxy"[:len(tabs)]
    expr = ",".join(f"{c}z" for c in letters) + ",z->" + letters
    return np.einsum(expr, *tabs, np.asarray(ipd.weights, dtype=complex))


def ipd_norm_bound(ipd: IPD, Ps: Sequence[FinitePVM]) -> float:
    """``sum_s w_s prod_j ||f_j(., s)||_{L^inf(P_j)}``: an upper bound for the
    integral projective tensor norm of the decomposed symbol."""
    tabs = ipd.tables(Ps)
    prod = np.asarray(ipd.weights, dtype=float).copy()
    for P, tab in zip(Ps, tabs):
        mask = P.nonzero()
        sup = np.abs(tab[mask]).max(axis=0) if mask.any() else np.zeros(tab.shape[1])
        prod = prod * sup
    return math.fsum(prod.tolist())


def ipd_residual(ipd: IPD, target, Ps: Sequence[FinitePVM]) -> float:
    """Max over label tuples of ``|target - reconstruction|``."""
    t = target_array(target, Ps)
    if len(Ps) == 0:
        return 0.0
    return float(np.max(np.abs(t - ipd_reconstruct(ipd, Ps))))


# ---------------------------------------------------------------------------
# builders

def ipd_constant(arity: int, weight: float = 1.0) -> IPD:
    """Single point of mass ``weight`` with every factor identically 1."""
    return IPD(DiscreteMeasure((0,), [weight]), [ConstFactor([1.0]) for _ in range(arity)],
               name="const")


def ipd_empty(arity: int) -> IPD:
    return IPD(DiscreteMeasure((), []), [ConstFactor([]) for _ in range(arity)], name="empty")


def compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total`` (lexicographic)."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def ipd_monomial_dd(n: int, k: int) -> IPD:
    """Exact decomposition of the k-th divided difference of ``x ** n``.

    ``(x^n)[l_1, ..., l_{k+1}] = sum_{a_1+...+a_{k+1} = n-k} prod_j l_j^{a_j}``,
    one unit-mass point per multi-index ``a``.
    """
    if k < 0 or n < k:
        raise DegreeTooLow(f"need n >= k, got n={n}, k={k}")
    idx = list(compositions(n - k, k + 1))
    exps = np.array(idx, dtype=int).reshape(len(idx), k + 1)
    return IPD(DiscreteMeasure(tuple(idx), np.ones(len(idx))),
               [PowerFactor(exps[:, j]) for j in range(k + 1)], name=f"monomial:{n}")


def simplex_rule(k: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre product rule on the standard k-simplex.

    Collapsed coordinates ``s_1 = u_1``, ``s_i = u_i prod_{l<i} (1 - u_l)``
    map the unit cube onto ``{s >= 0, sum s <= 1}``.  Returns barycentric
    points of shape ``(nodes**k, k+1)`` (last column ``1 - sum s``) and
    weights summing to ``1/k!``.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    if k == 0:
        return np.ones((1, 1)), np.ones(1)
    grid = np.array(list(itertools.product(range(nodes), repeat=k)), dtype=int)
    u = x[grid]
    wt = np.prod(w[grid], axis=1)
    s = np.empty((grid.shape[0], k + 1))
    rest = np.ones(grid.shape[0])
    for i in range(k):
        s[:, i] = u[:, i] * rest
        wt = wt * rest
        rest = rest * (1.0 - u[:, i])
    s[:, k] = rest
    return s, wt


def ipd_exp_dd(k: int, t: float, nodes: int) -> IPD:
    """Quadrature decomposition of the k-th divided difference of ``x -> exp(t x)``.

    ``f[l_1..l_{k+1}] = t^k * integral over the k-simplex of prod_j exp(t s_j l_j)``.
    ``|t|^k`` is folded into the weights; the sign of ``t^k`` rides on factor 1
    so that weights stay nonnegative.
    """
    if nodes < 1:
        raise ValueError("nodes must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    s, wt = simplex_rule(k, nodes)
    weights = abs(t) ** k * wt
    sign = math.copysign(1.0, t) ** k if t != 0 else 1.0
    factors = [ExpFactor(t * s[:, 0], np.full(s.shape[0], sign))]
    factors += [ExpFactor(t * s[:, j]) for j in range(1, k + 1)]
    points = tuple(tuple(row) for row in s.tolist())
    return IPD(DiscreteMeasure(points, weights), factors, name=f"exp:{t}:{nodes}")


def ipd_from_table(target, Ps: Sequence[FinitePVM]) -> IPD:
    """Atomic decomposition of an arbitrary table: one point per nonzero entry,
    mass ``|phi(w)|``, factor 1 carrying the phase times an indicator and the
    remaining factors plain indicators."""
    t = target_array(target, Ps)
    idx = np.argwhere(t != 0)
    vals = t[tuple(idx.T)] if idx.size else np.zeros(0, dtype=complex)
    mags = np.abs(vals)
    phases = vals / np.where(mags > 0, mags, 1.0)
    factors = [IndicatorFactor(idx[:, 0] if idx.size else [], phases)]
    factors += [IndicatorFactor(idx[:, j] if idx.size else []) for j in range(1, len(Ps))]
    points = tuple(tuple(int(i) for i in row) for row in idx)
    return IPD(DiscreteMeasure(points, mags), factors, name="atomic")


def ipd_sum(a: IPD, b: IPD) -> IPD:
    """Disjoint-union decomposition of the sum of the two decomposed symbols."""
    if a.arity != b.arity:
        raise ArityMismatch(f"arities {a.arity} and {b.arity} differ")
    points = tuple((0, p) for p in a.measure.points) + tuple((1, p) for p in b.measure.points)
    weights = np.concatenate([a.weights, b.weights])
    factors = [ConcatFactor(fa, fb) for fa, fb in zip(a.factors, b.factors)]
    return IPD(DiscreteMeasure(points, weights), factors, name=f"({a.name}+{b.name})")


def ipd_product(a: IPD, b: IPD) -> IPD:
    """Product-measure decomposition of the pointwise product of the two symbols."""
    if a.arity != b.arity:
        raise ArityMismatch(f"arities {a.arity} and {b.arity} differ")
    points = tuple(itertools.product(a.measure.points, b.measure.points))
    weights = np.outer(a.weights, b.weights).reshape(-1)
    factors = [ProductFactor(fa, fb) for fa, fb in zip(a.factors, b.factors)]
    return IPD(DiscreteMeasure(points, weights), factors, name=f"({a.name}*{b.name})")


def ipd_pad(ipd: IPD, before: int, after: int) -> IPD:
    """Extend a decomposition with constant-one factors on extra variables.

    Decomposes ``(w_1..w_{before}, v, u_1..u_{after}) -> phi(v)``.
    """
    n = len(ipd.measure)
    ones = [ConstFactor(np.ones(n)) for _ in range(before)]
    tail = [ConstFactor(np.ones(n)) for _ in range(after)]
    return IPD(ipd.measure, ones + list(ipd.factors) + tail, name=ipd.name)


def ipd_tensor(a: IPD, b: IPD) -> IPD:
    """Decomposition of ``psi_1 (x) psi_2`` in disjoint variables."""
    return ipd_product(ipd_pad(a, 0, b.arity), ipd_pad(b, a.arity, 0))
