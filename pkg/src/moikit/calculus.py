"""Divided differences and derivatives of matrix functions.

The k-th derivative of ``t -> f(A + t B)`` at ``t = 0`` is
``k! (I^{P^A, ..., P^A} f^{[k]})[B, ..., B]``; mixed derivatives in
directions ``B_1..B_k`` sum the same integral over all orderings of the
directions.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence

import numpy as np

from .errors import ConfluentNodesUnsupported, NonHermitianInput, UnknownFunction
from .moi import MOIProblem, moi_spectral
from .numkit import as_matrix, eig_hermitian, fro
from .pvm import FinitePVM, pvm_from_spectral, pvm_integrate


class ScalarFunction:
    """Scalar function with exact derivatives of all orders.

    Use :meth:`power`, :meth:`exp`, :meth:`polynomial` or :meth:`parse` for the
    built-ins.  Wrapping an arbitrary callable is allowed, but its divided
    differences reject repeated nodes.
    """

    def __init__(self, kind: str, param=None, fn: Callable | None = None):
        self.kind = kind
        self.param = param
        self._fn = fn

    @classmethod
    def power(cls, n: int) -> "ScalarFunction":
        if int(n) != n or n < 0:
            raise UnknownFunction(f"power exponent must be a nonnegative integer, got {n}")
        return cls("power", int(n))

    @classmethod
    def exp(cls, t: float) -> "ScalarFunction":
        return cls("exp", float(t))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "ScalarFunction":
        """Polynomial ``sum_n coeffs[n] x^n`` (ascending coefficients)."""
        return cls("poly", tuple(float(c) for c in coeffs))

    @classmethod
    def from_callable(cls, fn: Callable) -> "ScalarFunction":
        return cls("callable", None, fn)

    @classmethod
    def parse(cls, spec: str) -> "ScalarFunction":
        """``power:n``, ``exp:t`` or ``poly:c0,c1,...``."""
        kind, _, arg = spec.partition(":")
        try:
            if kind == "power":
                return cls.power(int(arg))
            if kind == "exp":
                return cls.exp(float(arg))
            if kind in ("poly", "polynomial"):
                return cls.polynomial([float(c) for c in arg.split(",")])
        except ValueError:
            pass
        raise UnknownFunction(f"cannot parse function spec {spec!r}")

    def __repr__(self):
        if self.kind == "poly":
            return "poly:" + ",".join(repr(c) for c in self.param)
        if self.kind == "callable":
            return f"callable:{self._fn!r}"
        return f"{self.kind}:{self.param}"

    def __call__(self, x):
        return self.derivative(x, 0)

    def derivative(self, x, m: int):
        """``f^{(m)}(x)``."""
        if self.kind == "power":
            n = self.param
            if m > n:
                return 0.0 * x
            return math.perm(n, m) * x ** (n - m)
        if self.kind == "exp":
            return self.param ** m * np.exp(self.param * x)
        if self.kind == "poly":
            return sum(c * math.perm(n, m) * x ** (n - m)
                       for n, c in enumerate(self.param) if n >= m) + 0.0 * x
        if m == 0:
            return self._fn(x)
        raise ConfluentNodesUnsupported("derivatives of a plain callable are not available")

    def divided_difference(self, nodes: Sequence[float], method: str = "auto") -> complex:
        return divided_difference(self, nodes, method)


def _complete_homogeneous(xs: Sequence[float], top: int) -> list[float]:
    """``[h_0(xs), ..., h_top(xs)]`` for the complete homogeneous symmetric polynomials."""
    h = [1.0] + [0.0] * top
    for x in xs:
        for j in range(1, top + 1):
            h[j] += x * h[j - 1]
    return h


def _exp_bidiagonal(t: float, ys: Sequence[float]) -> float:
    """``(x -> e^{t x})[y_0, ..., y_k]`` as the corner entry of ``exp(M)`` with
    ``M = diag(t y) + t * superdiag(1)``.

    Scaling and squaring: every entry ``(i, j)`` of a power of ``M`` has the
    sign of ``t^{j-i}``, so the squarings never cancel, and near-coincident
    nodes cost no accuracy.
    """
    k = len(ys) - 1
    m = np.diag(t * np.asarray(ys, dtype=float)) + np.diag(np.full(k, t), 1)
    norm = np.abs(m).sum(axis=0).max()
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0 else 0
    a = m / 2.0 ** s
    term = np.eye(k + 1)
    acc = term.copy()
    for n in range(1, 30):
        term = term @ a / n
        acc = acc + term
    for _ in range(s):
        acc = acc @ acc
    return float(acc[0, k])


def newton_divided_difference(f: ScalarFunction, nodes: Sequence[float]) -> complex:
    """Newton recursion on sorted nodes; runs of equal nodes use ``f^{(m)}(z)/m!``.

    Exact for exactly repeated nodes, but nodes that differ by a few ulps
    divide rounding noise by their gap.  :func:`divided_difference` avoids
    this for the built-in functions.
    """
    z = sorted(float(x) for x in nodes)
    k = len(z) - 1
    if f.kind == "callable" and len(set(z)) != len(z):
        raise ConfluentNodesUnsupported("repeated nodes need derivatives; use a built-in function")
    d = [complex(f(x)) for x in z]
    for j in range(1, k + 1):
        d = [complex(f.derivative(z[i], j)) / math.factorial(j) if z[i + j] == z[i]
             else (d[i + 1] - d[i]) / (z[i + j] - z[i])
             for i in range(k - j + 1)]
    return d[0]


def divided_difference(f: ScalarFunction, nodes: Sequence[float], method: str = "auto") -> complex:
    """k-th divided difference ``f[x_0, ..., x_k]`` with ``k = len(nodes) - 1``.

    ``method="newton"`` forces the Newton recursion.  The default uses
    cancellation-free forms where they exist: complete homogeneous symmetric
    polynomials for powers and polynomials, and the Taylor expansion about the
    node mean for ``exp`` when the nodes are not too spread out.
    """
    if len(nodes) == 0:
        raise ValueError("divided difference needs at least one node")
    if method == "newton" or f.kind == "callable":
        return newton_divided_difference(f, nodes)
    xs = [float(x) for x in nodes]
    k = len(xs) - 1
    if f.kind == "power":
        n = f.param
        return complex(_complete_homogeneous(xs, n - k)[n - k]) if n >= k else 0j
    if f.kind == "poly":
        top = len(f.param) - 1 - k
        if top < 0:
            return 0j
        h = _complete_homogeneous(xs, top)
        return complex(math.fsum(c * h[n - k] for n, c in enumerate(f.param) if n >= k))
    t = f.param
    centre = math.fsum(xs) / len(xs)
    y = [x - centre for x in xs]
    r = max(abs(v) for v in y)
    if abs(t) * r > 2.0:
        return complex(math.exp(t * centre) * _exp_bidiagonal(t, y))
    terms = 60
    h = _complete_homogeneous(y, terms)
    s = math.fsum(t ** (j + k) / math.factorial(j + k) * h[j] for j in range(terms + 1))
    return complex(math.exp(t * centre) * s)


def dd_table(f: ScalarFunction, values: Sequence[Sequence[float]], method: str = "auto") -> np.ndarray:
    """Dense table of ``f[v_1, ..., v_{k+1}]`` over the product of the value lists."""
    shape = tuple(len(v) for v in values)
    out = np.empty(shape, dtype=complex)
    for idx in itertools.product(*(range(n) for n in shape)):
        out[idx] = divided_difference(f, [v[i] for v, i in zip(values, idx)], method)
    return out


def _spectral_pvm(A) -> FinitePVM:
    A = as_matrix(A, square=True)
    if fro(A - A.conj().T) > 1e-10 * (1.0 + fro(A)):
        raise NonHermitianInput("A must be Hermitian")
    return pvm_from_spectral(eig_hermitian(A))


def matrix_function(f: ScalarFunction, A) -> np.ndarray:
    """``f(A)`` through the spectral measure of a Hermitian ``A``."""
    P = _spectral_pvm(A)
    return pvm_integrate(P, lambda lam: f(lam))


def frechet_derivative(f: ScalarFunction, A, B, order: int | None = None) -> np.ndarray:
    """k-th Fréchet derivative ``D^k f(A)[B_1, ..., B_k]`` of a matrix function.

    ``B`` is a single direction (repeated ``order`` times, default once) or a
    list of ``k`` directions.
    """
    if isinstance(B, (list, tuple)):
        Bs = [as_matrix(x, square=True) for x in B]
        if order is not None and order != len(Bs):
            raise ValueError(f"order {order} does not match {len(Bs)} directions")
    else:
        Bs = [as_matrix(B, square=True)] * (1 if order is None else order)
    k = len(Bs)
    P = _spectral_pvm(A)
    if any(x.shape != (P.dim, P.dim) for x in Bs):
        raise ValueError("directions must have the shape of A")
    if k == 0:
        return pvm_integrate(P, lambda lam: f(lam))
    table = dd_table(f, [P.values] * (k + 1))
    if all(np.array_equal(Bs[0], x) for x in Bs[1:]):
        return math.factorial(k) * moi_spectral(MOIProblem([P] * (k + 1), Bs), table)
    out = np.zeros((P.dim, P.dim), dtype=complex)
    for perm in itertools.permutations(range(k)):
        out = out + moi_spectral(MOIProblem([P] * (k + 1), [Bs[i] for i in perm]), table)
    return out


_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def finite_difference(f: ScalarFunction, A, B, order: int = 1, h: float = 1e-4) -> np.ndarray:
    """Central finite-difference estimate of ``d^k/dt^k f(A + t B)`` at ``t = 0``."""
    if order not in _STENCILS:
        raise ValueError(f"finite differences implemented for orders 1-4, got {order}")
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    acc = np.zeros(A.shape, dtype=complex)
    for step, coef in _STENCILS[order]:
        acc = acc + coef * matrix_function(f, A + step * h * B)
    return acc / h ** order
