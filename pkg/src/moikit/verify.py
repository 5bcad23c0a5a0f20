"""Seeded property suites.

Each suite draws its cases from a :class:`~moikit.rng.SplitMix64` stream
derived from ``(seed, suite name)``, evaluates one or more checks per case
and reports the worst residual.  Checks with different tolerances are
rescaled into the suite tolerance: a check with residual ``r`` and tolerance
``t`` contributes ``r * suite_tol / t``, so ``passed`` is simply
``max_residual <= tolerance``.  Inequalities report ``max(lhs - rhs, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import calculus as calc
from .decomp import (
    DiscreteMeasure,
    IntegralProjectiveDecomposition,
    TableFactor,
    ipd_constant,
    ipd_exp_dd,
    ipd_monomial_dd,
    ipd_norm_bound,
    ipd_pad,
    ipd_product,
    ipd_reconstruct,
    ipd_residual,
    ipd_sum,
)
from .errors import UnknownSuite
from .moi import (
    MOIProblem,
    inner_table,
    integral_product_traces,
    moi_compose_inner,
    moi_compose_outer,
    moi_ipd,
    moi_lp_check,
    moi_schatten_check,
    moi_spectral,
    rotate,
    tensor_table,
    trace_pairing,
)
from .numkit import (
    TraceFunctional,
    eig_hermitian,
    fro,
    frame_sum,
    jacobi_eigh,
    lp_norm,
    opnorm,
    polar,
    schatten_norm,
    singular_frames,
)
from .pavlov import (
    bs_superoperator,
    pavlov_build,
    pavlov_integrate,
    semivariation_bounds,
)
from .pvm import (
    FinitePVM,
    pvm_from_spectral,
    pvm_integrate,
    pvm_linf_norm,
    pvm_tensor,
    rectangle,
    rectangle_labels,
)
from .rng import SplitMix64, derive_seed

DEFAULT_SEED = 20240101
DEFAULT_SIZE = 8
MAX_K = 3
MAX_POINTS = 512
EXPONENTS = (1.0, 1.5, 2.0, 3.0, math.inf)


# ---------------------------------------------------------------------------
# random data

def rand_matrix(rng, n: int, m: int | None = None, unit: bool = True) -> np.ndarray:
    a = rng.complex_normal((n, n if m is None else m))
    return a / opnorm(a) if unit else a


def rand_hermitian(rng, n: int) -> np.ndarray:
    """``G + G^*`` for a complex Gaussian ``G``, scaled to unit operator norm."""
    g = rng.complex_normal((n, n))
    h = g + g.conj().T
    return h / opnorm(h)


def rand_unitary(rng, n: int) -> np.ndarray:
    return jacobi_eigh(rand_hermitian(rng, n))[1]


def rand_degenerate_hermitian(rng, n: int) -> np.ndarray:
    levels = np.array([-1.0, -0.25, 0.5, 1.0])
    d = levels[rng.integers(0, len(levels), n)]
    u = rand_unitary(rng, n)
    h = (u * d) @ u.conj().T
    return 0.5 * (h + h.conj().T)


def rand_pvm(rng, n: int, degenerate: bool | None = None, zero_atom: bool = False) -> FinitePVM:
    """Spectral measure of a random unit-norm Hermitian matrix.

    With ``zero_atom`` an extra atom at 3.0 carrying the zero projection is appended.
    """
    if degenerate is None:
        degenerate = rng.random() < 0.25
    a = rand_degenerate_hermitian(rng, n) if degenerate else rand_hermitian(rng, n)
    P = pvm_from_spectral(eig_hermitian(a))
    if zero_atom:
        P = FinitePVM(P.labels + (3.0,), P.projections + (np.zeros((n, n), dtype=complex),))
    return P


def rand_block_hermitian(rng, tau: TraceFunctional) -> np.ndarray:
    out = np.zeros((tau.dim, tau.dim), dtype=complex)
    for lo, hi in tau.offsets():
        out[lo:hi, lo:hi] = rand_hermitian(rng, hi - lo) if hi - lo > 1 else rng.standard_normal()
    return out


def rand_block_matrix(rng, tau: TraceFunctional) -> np.ndarray:
    out = np.zeros((tau.dim, tau.dim), dtype=complex)
    for lo, hi in tau.offsets():
        out[lo:hi, lo:hi] = rng.complex_normal((hi - lo, hi - lo))
    return out


def rand_trace_functional(rng, size: int) -> TraceFunctional:
    nblocks = rng.integers(2, 4)
    sizes = [rng.integers(1, max(2, size // nblocks) + 1) for _ in range(nblocks)]
    weights = rng.uniform(0.2, 3.0, nblocks)
    return TraceFunctional(tuple(sizes), tuple(weights.tolist()))


def rand_frame(rng, n: int, r: int) -> np.ndarray:
    return rand_unitary(rng, n)[:, :r]


def rand_subset(rng, labels) -> list:
    return [lab for lab in labels if rng.random() < 0.5]


def rand_table(rng, shape) -> np.ndarray:
    return rng.complex_normal(tuple(shape))


def rand_ipd(rng, Ps, npoints: int) -> IntegralProjectiveDecomposition:
    weights = rng.uniform(0.0, 1.0, npoints)
    factors = [TableFactor(rand_table(rng, (len(P), npoints))) for P in Ps]
    return IntegralProjectiveDecomposition(DiscreteMeasure(tuple(range(npoints)), weights),
                                           factors, name="random")


def rand_problem(rng, size: int, k: int, square: bool = False, unit_b: bool = True) -> MOIProblem:
    dims = [rng.integers(2, size + 1)] * (k + 1) if square else \
        [rng.integers(2, size + 1) for _ in range(k + 1)]
    Ps = [rand_pvm(rng, d) for d in dims]
    b = [rand_matrix(rng, dims[j], dims[j + 1], unit=unit_b) for j in range(k)]
    return MOIProblem(Ps, b)


def rand_exponents(rng, k: int) -> tuple[float, list[float]]:
    """``p_1..p_k`` from EXPONENTS with ``sum 1/p_j <= 1`` and the matching ``p``."""
    while True:
        ps = [EXPONENTS[rng.integers(0, len(EXPONENTS))] for _ in range(k)]
        inv = math.fsum(0.0 if math.isinf(q) else 1.0 / q for q in ps)
        if inv <= 1.0:
            return (math.inf if inv == 0.0 else 1.0 / inv), ps


def leibniz_ipd(n: int, k: int) -> IntegralProjectiveDecomposition:
    """Decomposition of ``(x^n)^{[k]}`` from the Leibniz rule for ``x^n = x * x^{n-1}``:
    ``(fg)[x_0..x_k] = sum_i f[x_0..x_i] g[x_i..x_k]``."""
    acc = None
    for i in range(k + 1):
        if i > 1 or n - 1 < k - i:
            continue
        left = ipd_pad(ipd_monomial_dd(1, i), 0, k - i)
        right = ipd_pad(ipd_monomial_dd(n - 1, k - i), i, 0)
        term = ipd_product(left, right)
        acc = term if acc is None else ipd_sum(acc, term)
    return acc


# ---------------------------------------------------------------------------
# bookkeeping

@dataclass
class SuiteReport:
    suite_name: str
    cases: int
    max_residual: float
    tolerance: float
    passed: bool
    seed: int
    size: int
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        return {"suiteName": d["suite_name"], "cases": d["cases"],
                "maxResidual": d["max_residual"], "tolerance": d["tolerance"],
                "passed": d["passed"], "seed": d["seed"], "size": d["size"],
                "details": d["details"]}


class _Tally:
    def __init__(self, tol: float):
        self.tol = tol
        self.cases = 0
        self.worst = 0.0
        self.details: dict[str, float] = {}

    def case(self):
        self.cases += 1

    def add(self, name: str, residual: float, tol: float | None = None):
        r = float(residual)
        if math.isnan(r):
            r = math.inf
        r = max(r, 0.0) * (self.tol / tol if tol else 1.0)
        self.worst = max(self.worst, r)
        self.details[name] = max(self.details.get(name, 0.0), r)

    def le(self, name: str, lhs: float, rhs: float, tol: float | None = None):
        self.add(name, lhs - rhs, tol)


@dataclass(frozen=True)
class Suite:
    name: str
    tolerance: float
    covers: tuple
    run: Callable


SUITES: dict[str, Suite] = {}


def suite(name: str, tolerance: float, covers: tuple):
    def deco(fn):
        SUITES[name] = Suite(name, tolerance, covers, fn)
        return fn
    return deco


# every "Invariants & Properties" item the suites must exercise
INVARIANTS = (
    "numkit.spectral-reconstruction", "numkit.schatten-monotonicity", "numkit.holder",
    "numkit.unitary-invariance", "numkit.trace-cyclicity", "numkit.l1-duality",
    "numkit.frame-sum",
    "pvm.rectangle-factorization", "pvm.multiplicativity", "pvm.minkowski",
    "pvm.star-homomorphism",
    "decomp.banach-algebra", "decomp.dominating-bound", "decomp.quadrature-convergence",
    "moi.engine-equivalence", "moi.linearity", "moi.inner-multiplicativity",
    "moi.outer-multiplicativity", "moi.trace-of-integral-product", "moi.trace-cyclicity",
    "moi.operator-norm-bound", "moi.schatten-estimate", "moi.lp-estimate",
    "minkowski.schatten", "minkowski.lp",
    "pavlov.additivity", "pavlov.absolute-continuity", "pavlov.grid-domination",
    "pavlov.agreement", "pavlov.s2-bound",
    "bs.agreement", "bs.spectral-mapping", "bs.adjoint-relation",
    "calculus.derivative-identity", "calculus.chain-consistency",
    "calculus.higher-order-symmetry", "calculus.polynomial-exactness",
)


def coverage() -> dict[str, list[str]]:
    """Map each invariant to the suites that exercise it."""
    out = {inv: [] for inv in INVARIANTS}
    for s in SUITES.values():
        for inv in s.covers:
            out[inv].append(s.name)
    return out


def run_suite(name: str, seed: int = DEFAULT_SEED, size: int = DEFAULT_SIZE) -> SuiteReport:
    """Run one registered suite; deterministic in ``(name, seed, size)``."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    s = SUITES[name]
    rng = SplitMix64(derive_seed(seed, name))
    tally = _Tally(s.tolerance)
    s.run(rng, max(2, int(size)), tally)
    return SuiteReport(name, tally.cases, tally.worst, s.tolerance,
                       bool(tally.worst <= s.tolerance), int(seed), int(size),
                       dict(sorted(tally.details.items())))


def run_all(seed: int = DEFAULT_SEED, size: int = DEFAULT_SIZE) -> list[SuiteReport]:
    return [run_suite(name, seed, size) for name in SUITES]


# ---------------------------------------------------------------------------
# numkit suites

@suite("spectral", 1e-11, ("numkit.spectral-reconstruction",))
def _spectral(rng, size, t):
    for i in range(500):
        n = 2 + i % (2 * size - 1)
        a = rand_degenerate_hermitian(rng, n) if i % 5 == 0 else rand_hermitian(rng, n)
        a = a * rng.uniform(0.1, 10.0)
        S = eig_hermitian(a)
        t.add("reconstruction", fro(S.reconstruct() - a) / ((1.0 + fro(a)) * n))
        t.add("projections", S.check())
        t.case()


@suite("schatten", 1e-12, ("numkit.schatten-monotonicity", "numkit.unitary-invariance",
                           "numkit.trace-cyclicity", "numkit.frame-sum"))
def _schatten(rng, size, t):
    fixture = np.diag([3.0, 4.0])
    t.add("fixture-s1", abs(schatten_norm(fixture, 1) - 7.0))
    t.case()
    for _ in range(100):
        n, m = rng.integers(2, size + 1), rng.integers(2, size + 1)
        a = rand_matrix(rng, n, m)
        norms = [schatten_norm(a, p) for p in EXPONENTS]
        for lo in range(len(norms)):
            for hi in range(lo + 1, len(norms)):
                t.le("monotonicity", norms[hi], norms[lo])
        u, v = rand_unitary(rng, n), rand_unitary(rng, m)
        for p, s in zip(EXPONENTS, norms):
            t.add("unitary-invariance", abs(schatten_norm(u @ a @ v, p) - s), 1e-10)
        b = rand_matrix(rng, m, n)
        t.add("trace-cyclicity", abs(np.trace(a @ b) - np.trace(b @ a))
              / (1.0 + fro(a) * fro(b)), 1e-11)
        s1 = norms[0]
        for _ in range(20):
            r = rng.integers(0, min(n, m) + 1)
            t.le("frame-sum", frame_sum(a, rand_frame(rng, m, r), rand_frame(rng, n, r)), s1, 1e-10)
        e, f = singular_frames(a)
        t.add("frame-attained", abs(frame_sum(a, e, f) - s1), 1e-9)
        t.case()


@suite("holder", 1e-10, ("numkit.holder",))
def _holder(rng, size, t):
    for _ in range(200):
        n, m, l = (rng.integers(2, size + 1) for _ in range(3))
        a, b = rand_matrix(rng, n, m), rand_matrix(rng, m, l)
        p, (p1, p2) = rand_exponents(rng, 2)
        t.le("holder", schatten_norm(a @ b, p), schatten_norm(a, p1) * schatten_norm(b, p2))
        t.case()


@suite("minkowski-schatten", 1e-10, ("minkowski.schatten",))
def _minkowski_schatten(rng, size, t):
    for _ in range(200):
        n, m = rng.integers(1, size + 1), rng.integers(1, size + 1)
        pieces = rng.integers(1, 9)
        w = rng.uniform(0.0, 2.0, pieces)
        F = rng.complex_normal((pieces, n, m))
        if rng.random() < 0.2:
            F = F[0][None] * rng.uniform(0.1, 1.0, pieces)[:, None, None]
        total = np.einsum("s,sab->ab", w, F)
        for p in EXPONENTS:
            rhs = math.fsum(wi * schatten_norm(Fi, p) for wi, Fi in zip(w, F))
            t.le(f"p={p}", schatten_norm(total, p), rhs)
        t.case()


@suite("minkowski-lp", 1e-9, ("minkowski.lp", "numkit.l1-duality"))
def _minkowski_lp(rng, size, t):
    for _ in range(200):
        tau = rand_trace_functional(rng, size)
        pieces = rng.integers(1, 9)
        w = rng.uniform(0.0, 2.0, pieces)
        F = np.array([rand_block_matrix(rng, tau) for _ in range(pieces)])
        total = np.einsum("s,sab->ab", w, F)
        for p in EXPONENTS:
            rhs = math.fsum(wi * lp_norm(Fi, tau, p) for wi, Fi in zip(w, F))
            t.le(f"p={p}", lp_norm(total, tau, p), rhs)
        t.case()
    for _ in range(20):
        tau = rand_trace_functional(rng, size)
        a = rand_block_matrix(rng, tau)
        l1 = lp_norm(a, tau, 1)
        best = 0.0
        for _ in range(200):
            b = rand_block_matrix(rng, tau)
            best = max(best, abs(tau(a @ (b / opnorm(b)))))
        t.le("duality-bound", best, l1, 1e-10)
        witness = np.zeros_like(a)
        for lo, hi in tau.offsets():
            u, _ = polar(a[lo:hi, lo:hi])
            witness[lo:hi, lo:hi] = u.conj().T
        t.add("duality-witness", abs(abs(tau(a @ witness)) - l1), 1e-9)
        t.case()


# ---------------------------------------------------------------------------
# pvm suites

@suite("pvm-tensor", 1e-11, ("pvm.rectangle-factorization", "pvm.multiplicativity",
                             "pvm.star-homomorphism"))
def _pvm_tensor(rng, size, t):
    for i in range(100):
        m = 2 + i % 3
        dmax = max(2, int(round(min(size, 64 ** (1.0 / m)))))
        Ps = [rand_pvm(rng, rng.integers(2, dmax + 1)) for _ in range(m)]
        P = pvm_tensor(Ps)
        G = [rand_subset(rng, Q.labels) for Q in Ps]
        t.add("rectangle", fro(P.measure(rectangle_labels(Ps, G)) - rectangle(Ps, G)), 1e-10)
        G1, G2 = rand_subset(rng, P.labels), rand_subset(rng, P.labels)
        inter = [lab for lab in G1 if lab in set(G2)]
        t.add("multiplicativity", fro(P.measure(inter) - P.measure(G1) @ P.measure(G2)), 1e-10)
        phi, psi = rand_table(rng, (len(P),)), rand_table(rng, (len(P),))
        scale = (1 + np.abs(phi).max()) * (1 + np.abs(psi).max())
        t.add("star-hom", fro(pvm_integrate(P, phi * psi)
                              - pvm_integrate(P, phi) @ pvm_integrate(P, psi)) / scale)
        t.add("adjoint", fro(pvm_integrate(P, phi.conj()) - pvm_integrate(P, phi).conj().T))
        t.case()


@suite("pvm-minkowski", 1e-10, ("pvm.minkowski",))
def _pvm_minkowski(rng, size, t):
    for _ in range(200):
        P = rand_pvm(rng, rng.integers(2, size + 1), zero_atom=rng.random() < 0.5)
        npts = rng.integers(1, 10)
        w = rng.uniform(0.0, 2.0, npts)
        Phi = np.abs(rng.standard_normal((len(P), npts)))
        if not P.nonzero()[-1]:
            Phi[-1] += 100.0  # large values on a null atom must not count
        lhs = pvm_linf_norm(P, Phi @ w)
        rhs = math.fsum(wi * pvm_linf_norm(P, Phi[:, s]) for s, wi in enumerate(w))
        t.le("minkowski", lhs, rhs)
        t.case()


# ---------------------------------------------------------------------------
# decompositions

@suite("ipd-algebra", 1e-12, ("decomp.banach-algebra", "decomp.dominating-bound",
                              "decomp.quadrature-convergence"))
def _ipd_algebra(rng, size, t):
    for _ in range(100):
        arity = rng.integers(2, 4)
        Ps = [rand_pvm(rng, rng.integers(2, min(size, 5) + 1), zero_atom=rng.random() < 0.3)
              for _ in range(arity)]
        a = rand_ipd(rng, Ps, rng.integers(1, 5))
        b = rand_ipd(rng, Ps, rng.integers(1, 5))
        ba, bb = ipd_norm_bound(a, Ps), ipd_norm_bound(b, Ps)
        ra, rb = ipd_reconstruct(a, Ps), ipd_reconstruct(b, Ps)
        s, p = ipd_sum(a, b), ipd_product(a, b)
        t.le("sum-bound", ipd_norm_bound(s, Ps), ba + bb)
        t.le("product-bound", ipd_norm_bound(p, Ps), ba * bb, 1e-10)
        sc = (1 + np.abs(ra).max()) * (1 + np.abs(rb).max())
        t.add("sum-reconstructs", ipd_residual(s, ra + rb, Ps) / sc)
        t.add("product-reconstructs", ipd_residual(p, ra * rb, Ps) / sc)
        mask = np.ix_(*(Q.nonzero() for Q in Ps))
        t.le("dominating", float(np.abs(ra[mask]).max()), ba, 1e-10)
        t.case()
    for i in range(8):
        k = 1 if i < 4 else 2
        tt = rng.uniform(-1.0, 1.0)
        Ps = [rand_pvm(rng, 4) for _ in range(k + 1)]
        target = calc.dd_table(calc.ScalarFunction.exp(tt), [P.values for P in Ps])
        res = {m: ipd_residual(ipd_exp_dd(k, tt, m), target, Ps) for m in (4, 8, 16, 32)
               if m ** k <= MAX_POINTS}
        for m in (4, 8, 16):
            if 2 * m in res:
                # below ~1e-14 both rules sit at the rounding floor of the oracle
                t.le("quadrature-convergence", res[2 * m], max(res[m], 1e-14), 1e-12)
        t.case()


# ---------------------------------------------------------------------------
# MOI suites

@suite("moi-welldef", 1e-11, ("moi.engine-equivalence", "moi.operator-norm-bound"))
def _moi_welldef(rng, size, t):
    for i in range(200):
        k = 1 + i % MAX_K
        prob = rand_problem(rng, size, k)
        n = k + 1 + rng.integers(0, 4)
        target = calc.dd_table(calc.ScalarFunction.power(n), [P.values for P in prob.pvms])
        scale = prob.scale(target)
        exact = moi_spectral(prob, target)
        first, second = ipd_monomial_dd(n, k), leibniz_ipd(n, k)
        r1, r2 = moi_ipd(prob, first), moi_ipd(prob, second)
        t.add("monomial-vs-spectral", fro(r1 - exact) / scale)
        t.add("leibniz-vs-spectral", fro(r2 - exact) / scale)
        t.add("monomial-vs-leibniz", fro(r1 - r2) / scale)
        bound = ipd_norm_bound(first, prob.pvms) * math.prod(opnorm(b) for b in prob.b)
        t.le("operator-norm", opnorm(r1), bound, 1e-9)
        t.case()


@suite("moi-algebra", 1e-11, ("moi.linearity", "moi.outer-multiplicativity",
                              "moi.inner-multiplicativity"))
def _moi_algebra(rng, size, t):
    for i in range(100):
        k = 1 + i % MAX_K
        prob = rand_problem(rng, min(size, 6), k)
        shape = [len(P) for P in prob.pvms]
        phi, psi = rand_table(rng, shape), rand_table(rng, shape)
        alpha = complex(rng.complex_normal((1,))[0])
        lin = moi_spectral(prob, phi + alpha * psi) - moi_spectral(prob, phi) \
            - alpha * moi_spectral(prob, psi)
        t.add("linearity", fro(lin) / (prob.scale(phi) * (1 + abs(alpha)) * prob.scale(psi)))
        m = 1 + rng.integers(0, k)
        psi1, psi2 = rand_table(rng, shape[:m]), rand_table(rng, shape[m:])
        both = tensor_table(psi1, psi2)
        outer = moi_compose_outer(prob, m, psi1, psi2) - moi_spectral(prob, both)
        t.add("outer", fro(outer) / prob.scale(both), 1e-10)
        chi = rand_table(rng, shape[m - 1:m + 1])
        prod = inner_table(phi, chi, m, prob.pvms)
        sc = prob.scale(phi) * (1 + np.abs(chi).max())
        inner = moi_compose_inner(prob, m, phi, chi) - moi_spectral(prob, prod)
        t.add("inner", fro(inner) / sc, 1e-10)
        t.case()


@suite("moi-estimates", 1e-9, ("moi.schatten-estimate", "moi.lp-estimate"))
def _moi_estimates(rng, size, t):
    for i in range(200):
        k = 1 + i % MAX_K
        prob = rand_problem(rng, min(size, 6), k)
        p, ps = rand_exponents(rng, k)
        choice = i % 3
        if choice == 0:
            sym = ipd_monomial_dd(k + rng.integers(0, 3), k)
        elif choice == 1:
            sym = ipd_exp_dd(k, rng.uniform(-1, 1), 6)
        else:
            sym = rand_ipd(rng, prob.pvms, rng.integers(1, 6))
        rep = moi_schatten_check(prob, sym, p, ps)
        t.add("schatten", (rep.lhs - rep.rhs) / (1 + rep.rhs))
        t.case()
    for i in range(200):
        k = 1 + i % MAX_K
        tau = rand_trace_functional(rng, min(size, 6))
        Ps = [pvm_from_spectral(eig_hermitian(rand_block_hermitian(rng, tau))) for _ in range(k + 1)]
        prob = MOIProblem(Ps, [rand_block_matrix(rng, tau) for _ in range(k)])
        p, ps = rand_exponents(rng, k)
        sym = ipd_monomial_dd(k + rng.integers(0, 3), k) if i % 2 else \
            rand_ipd(rng, prob.pvms, rng.integers(1, 5))
        rep = moi_lp_check(prob, tau, sym, p, ps)
        t.add("lp", (rep.lhs - rep.rhs) / (1 + rep.rhs))
        t.case()
    for _ in range(20):
        prob = rand_problem(rng, size, 1)
        p = EXPONENTS[rng.integers(0, len(EXPONENTS))]
        rep = moi_schatten_check(prob, ipd_constant(2), p, [p])
        t.add("unit-margin", abs(rep.margin), 1e-12)
        t.case()


@suite("trace-product", 1e-10, ("moi.trace-of-integral-product",))
def _trace_product(rng, size, t):
    for _ in range(200):
        n = rng.integers(2, size + 1)
        Q = rand_pvm(rng, n)
        npts = rng.integers(1, 12)
        w = rng.uniform(0, 1, npts)
        table = rand_table(rng, (len(Q), npts))
        mats = rng.complex_normal((npts, n, n))
        left, right = integral_product_traces(Q, table, w, mats)
        scale = (1 + np.abs(table).max()) * (1 + math.fsum(wi * fro(a) for wi, a in zip(w, mats)))
        t.add("trace-product", abs(left - right) / scale)
        t.case()


@suite("trace-cyclic", 1e-10, ("moi.trace-cyclicity",))
def _trace_cyclic(rng, size, t):
    for i in range(200):
        k = 1 + i % MAX_K
        prob = rand_problem(rng, min(size, 6), k)
        closing = rand_matrix(rng, prob.pvms[-1].dim, prob.pvms[0].dim)
        ipd = rand_ipd(rng, prob.pvms, rng.integers(1, 6)) if i % 2 else \
            ipd_monomial_dd(k + rng.integers(0, 3), k)
        base = trace_pairing(prob, ipd, closing)
        scale = prob.scale(ipd_reconstruct(ipd, prob.pvms)) * (1 + fro(closing))
        for shift in range(1, k + 1):
            p2, ipd2, c2 = rotate(prob, ipd, closing, shift)
            t.add("cyclic", abs(trace_pairing(p2, ipd2, c2) - base) / scale)
        t.case()


# ---------------------------------------------------------------------------
# Pavlov / Birman-Solomyak suites

@suite("pavlov-agree", 1e-11, ("pavlov.agreement", "pavlov.additivity",
                               "pavlov.absolute-continuity", "pavlov.s2-bound"))
def _pavlov(rng, size, t):
    for i in range(200):
        k = 1 + i % MAX_K
        dims = [rng.integers(2, min(size, 6) + 1) for _ in range(k + 1)]
        Ps = [rand_pvm(rng, d, zero_atom=rng.random() < 0.3) for d in dims]
        prob = MOIProblem(Ps, [rand_matrix(rng, dims[j], dims[j + 1]) for j in range(k)])
        vm = pavlov_build(prob)
        phi = rand_table(rng, [len(P) for P in Ps])
        scale = prob.scale(phi)
        got = pavlov_integrate(vm, phi)
        t.add("agreement", fro(got - moi_spectral(prob, phi)) / scale)
        chain = prob.b[0] if k == 1 else np.linalg.multi_dot(prob.b)
        t.add("total", fro(vm.total() - chain) / scale)
        G = [rand_subset(rng, P.labels) for P in Ps]
        direct = Ps[0].measure(G[0])
        for j in range(k):
            direct = direct @ prob.b[j] @ Ps[j + 1].measure(G[j + 1])
        t.add("rectangle", fro(vm.rectangle(G) - direct) / scale)
        pts = list(vm.labels)
        mask = [rng.random() < 0.5 for _ in pts]
        g1 = [p for p, m in zip(pts, mask) if m]
        g2 = [p for p, m in zip(pts, mask) if not m and rng.random() < 0.7]
        t.add("additivity", fro(vm.value(g1 + g2) - vm.value(g1) - vm.value(g2)) / scale)
        null = [lab for lab in vm.labels
                if any(not Ps[j].nonzero()[lab[j]] for j in range(k + 1))]
        if null:
            t.add("absolute-continuity", fro(vm.value(null)), 1e-12)
        bound = float(np.abs(phi).max()) * math.prod(schatten_norm(b, 2) for b in prob.b)
        t.le("s2-bound", schatten_norm(got, 2), bound, 1e-9)
        t.case()


@suite("bs-agree", 1e-11, ("bs.agreement", "bs.spectral-mapping", "bs.adjoint-relation"))
def _bs(rng, size, t):
    for i in range(200):
        n, m = rng.integers(2, size + 1), rng.integers(2, size + 1)
        P = rand_pvm(rng, n)
        Q = rand_pvm(rng, m)
        real = i % 2 == 0
        phi = rng.standard_normal((len(P), len(Q))) if real else rand_table(rng, (len(P), len(Q)))
        S = bs_superoperator(P, Q, phi)
        b = rand_matrix(rng, n, m)
        prob = MOIProblem([P, Q], [b])
        scale = prob.scale(phi)
        t.add("agreement", fro(S.apply(b) - moi_spectral(prob, phi)) / scale)
        if real:
            got = np.linalg.eigvalsh(0.5 * (S.matrix + S.matrix.conj().T))
            ranks = [int(round(np.trace(p).real)) for p in P.projections]
            qranks = [int(round(np.trace(q).real)) for q in Q.projections]
            want = np.sort(np.repeat(phi.reshape(-1), np.outer(ranks, qranks).reshape(-1)))
            t.add("spectral-mapping", float(np.abs(np.sort(got) - want).max())
                  / (1 + np.abs(phi).max()), 1e-9)
        b2 = rand_matrix(rng, n, m)
        lhs = np.trace(moi_spectral(prob, phi) @ b2.conj().T)
        rhs = np.trace(b @ moi_spectral(MOIProblem([P, Q], [b2]), phi.conj()).conj().T)
        t.add("adjoint", abs(lhs - rhs) / (scale * (1 + fro(b2))), 1e-10)
        t.case()


@suite("semivariation", 1e-9, ("pavlov.grid-domination",))
def _semivariation(rng, size, t):
    for i in range(100):
        k = 1 + i % 2
        dims = [rng.integers(2, min(size, 5) + 1) for _ in range(k + 1)]
        prob = MOIProblem([rand_pvm(rng, d) for d in dims],
                          [rand_matrix(rng, dims[j], dims[j + 1]) for j in range(k)])
        vm = pavlov_build(prob)
        lower, upper = semivariation_bounds(vm, prob.b, 100, rng)
        t.le("lower<=upper", lower, upper)
        t.case()
    for _ in range(20):
        n = rng.integers(2, size + 1)
        u, v = rng.complex_normal((n, 1)), rng.complex_normal((1, n))
        b = u @ v
        one = FinitePVM((0.0,), (np.eye(n, dtype=complex),))
        vm = pavlov_build(MOIProblem([one, one], [b]))
        lower, upper = semivariation_bounds(vm, [b], 10, rng)
        t.add("rank-one-attained", abs(lower - upper) / (1 + upper))
        t.case()


# ---------------------------------------------------------------------------
# derivatives

def _builtin(rng, i):
    kind = i % 3
    if kind == 0:
        return calc.ScalarFunction.exp(rng.uniform(-1.0, 1.0))
    if kind == 1:
        return calc.ScalarFunction.power(rng.integers(0, 7))
    return calc.ScalarFunction.polynomial(rng.standard_normal(rng.integers(1, 6)).tolist())


@suite("derivative", 1e-11, ("calculus.derivative-identity", "calculus.chain-consistency",
                             "calculus.higher-order-symmetry", "calculus.polynomial-exactness"))
def _derivative(rng, size, t):
    for i in range(100):
        n = rng.integers(2, size + 1)
        f = _builtin(rng, i)
        A, B = rand_hermitian(rng, n), rand_hermitian(rng, n)
        d1 = calc.frechet_derivative(f, A, B, 1)
        fd1 = calc.finite_difference(f, A, B, 1)
        t.add("fd-order1", fro(d1 - fd1) / (1 + fro(d1)), 1e-5)
        d2 = calc.frechet_derivative(f, A, B, 2)
        fd2 = calc.finite_difference(f, A, B, 2)
        t.add("fd-order2", fro(d2 - fd2) / (1 + fro(d2)), 1e-4)
        P = pvm_from_spectral(eig_hermitian(A))
        table = calc.dd_table(f, [P.values] * 2)
        direct = moi_spectral(MOIProblem([P, P], [B]), table)
        t.add("chain", fro(d1 - direct) / MOIProblem([P, P], [B]).scale(table))
        t.add("symmetry", fro(d2 - d2.conj().T) / (1 + fro(d2)), 1e-10)
        t.case()
    for i in range(40):
        n, deg = rng.integers(2, size + 1), rng.integers(1, 7)
        A, B = rand_hermitian(rng, n), rand_hermitian(rng, n)
        f = calc.ScalarFunction.power(deg)
        pw = [np.linalg.matrix_power(A, j) for j in range(deg + 1)]
        exp1 = sum(pw[a] @ B @ pw[deg - 1 - a] for a in range(deg))
        t.add("poly-order1", fro(calc.frechet_derivative(f, A, B, 1) - exp1) / (1 + fro(exp1)),
              1e-10)
        exp2 = sum((2 * pw[a] @ B @ pw[c] @ B @ pw[deg - 2 - a - c]
                    for a in range(deg - 1) for c in range(deg - 1 - a)), np.zeros((n, n)))
        t.add("poly-order2", fro(calc.frechet_derivative(f, A, B, 2) - exp2) / (1 + fro(exp2)),
              1e-10)
        t.case()
