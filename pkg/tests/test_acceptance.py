"""Acceptance criteria.

Each test checks one criterion at its stated tolerance and prints a single
``[PASS]``/``[FAIL]`` line.  Run directly (``python3 tests/test_acceptance.py``)
for the summary alone.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from moikit import calculus as calc
from moikit.decomp import ipd_constant, ipd_monomial_dd, ipd_reconstruct
from moikit.moi import (
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
from moikit.numkit import eig_hermitian, frame_sum, lp_norm, schatten_norm, singular_frames
from moikit.pavlov import bs_superoperator, pavlov_build, pavlov_integrate, semivariation_bounds
from moikit.pvm import pvm_from_spectral, pvm_tensor, rectangle, rectangle_labels
from moikit.rng import SplitMix64, derive_seed
from moikit.verify import (
    EXPONENTS,
    leibniz_ipd,
    rand_block_hermitian,
    rand_block_matrix,
    rand_exponents,
    rand_hermitian,
    rand_ipd,
    rand_matrix,
    rand_problem,
    rand_pvm,
    rand_subset,
    rand_table,
    rand_trace_functional,
)

SEED = 2024


def stream(name):
    return SplitMix64(derive_seed(SEED, "acceptance:" + name))


def emit(capsys, number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


# ---------------------------------------------------------------------------

def criterion_1():
    rng = stream("welldef")
    start = time.perf_counter()
    worst = 0.0
    for i in range(200):
        k = 1 + i % 3
        prob = rand_problem(rng, 8, k)
        n = k + 1 + rng.integers(0, 4)
        target = calc.dd_table(calc.ScalarFunction.power(n), [P.values for P in prob.pvms])
        scale = prob.scale(target)
        ref = moi_spectral(prob, target)
        r1, r2 = moi_ipd(prob, ipd_monomial_dd(n, k)), moi_ipd(prob, leibniz_ipd(n, k))
        for gap in (r1 - ref, r2 - ref, r1 - r2):
            worst = max(worst, np.linalg.norm(gap) / scale)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-11 and elapsed <= 10.0
    return ok, f"max gap/scale {worst:.2e} (tol 1e-11), {elapsed:.2f}s (limit 10s)"


def criterion_2():
    rng = stream("minkowski-schatten")
    start = time.perf_counter()
    worst = -math.inf
    for _ in range(200):
        n, m, pieces = rng.integers(1, 9), rng.integers(1, 9), rng.integers(1, 9)
        w = rng.uniform(0, 2, pieces)
        F = rng.complex_normal((pieces, n, m))
        total = np.einsum("s,sab->ab", w, F)
        for p in EXPONENTS:
            rhs = math.fsum(wi * schatten_norm(Fi, p) for wi, Fi in zip(w, F))
            worst = max(worst, schatten_norm(total, p) - rhs)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed <= 5.0
    return ok, f"max(lhs - rhs) {worst:.2e} (tol 1e-10), {elapsed:.2f}s (limit 5s)"


def criterion_3():
    rng = stream("minkowski-lp")
    start = time.perf_counter()
    worst = -math.inf
    for _ in range(200):
        tau = rand_trace_functional(rng, 8)
        assert len(tau.block_sizes) >= 2 and len(set(tau.weights)) == len(tau.weights)
        pieces = rng.integers(1, 9)
        w = rng.uniform(0, 2, pieces)
        F = [rand_block_matrix(rng, tau) for _ in range(pieces)]
        total = sum(wi * Fi for wi, Fi in zip(w, F))
        for p in EXPONENTS:
            rhs = math.fsum(wi * lp_norm(Fi, tau, p) for wi, Fi in zip(w, F))
            worst = max(worst, lp_norm(total, tau, p) - rhs)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed <= 5.0
    return ok, f"max(lhs - rhs) {worst:.2e} (tol 1e-9), {elapsed:.2f}s (limit 5s)"


def _qr_frame(rng, n, r):
    q, _ = np.linalg.qr(rng.complex_normal((n, max(r, 1))))
    return q[:, :r]


def criterion_4():
    rng = stream("frames")
    excess, attain = -math.inf, 0.0
    for _ in range(200):
        n, m = rng.integers(1, 9), rng.integers(1, 9)
        a = rng.complex_normal((n, m))
        s1 = schatten_norm(a, 1)
        for _ in range(200):
            r = rng.integers(0, min(n, m) + 1)
            excess = max(excess, frame_sum(a, _qr_frame(rng, m, r), _qr_frame(rng, n, r)) - s1)
        e, f = singular_frames(a)
        attain = max(attain, abs(frame_sum(a, e, f) - s1))
    ok = excess <= 1e-10 and attain <= 1e-9
    return ok, f"max(frame sum - S1) {excess:.2e} (tol 1e-10), attainment gap {attain:.2e} (tol 1e-9)"


def criterion_5():
    rng = stream("traces")
    wprod, wcyc = 0.0, 0.0
    for i in range(200):
        n = rng.integers(2, 9)
        Q = rand_pvm(rng, n)
        npts = rng.integers(1, 12)
        w = rng.uniform(0, 1, npts)
        table = rand_table(rng, (len(Q), npts))
        mats = rng.complex_normal((npts, n, n))
        left, right = integral_product_traces(Q, table, w, mats)
        scale = (1 + np.abs(table).max()) * (1 + math.fsum(wi * np.linalg.norm(a) for wi, a in zip(w, mats)))
        wprod = max(wprod, abs(left - right) / scale)

        k = 1 + i % 3
        prob = rand_problem(rng, 6, k)
        closing = rand_matrix(rng, prob.pvms[-1].dim, prob.pvms[0].dim)
        ipd = rand_ipd(rng, prob.pvms, rng.integers(1, 6))
        base = trace_pairing(prob, ipd, closing)
        sc = prob.scale(ipd_reconstruct(ipd, prob.pvms)) * (1 + np.linalg.norm(closing))
        for shift in range(1, k + 1):
            p2, ipd2, c2 = rotate(prob, ipd, closing, shift)
            wcyc = max(wcyc, abs(trace_pairing(p2, ipd2, c2) - base) / sc)
    ok = wprod <= 1e-10 and wcyc <= 1e-10
    return ok, f"trace-of-product {wprod:.2e}, cyclicity {wcyc:.2e} (both /scale, tol 1e-10)"


def criterion_6():
    rng = stream("algebra")
    lin = outer = inner = 0.0
    for i in range(100):
        k = 1 + i % 3
        prob = rand_problem(rng, 6, k)
        shape = [len(P) for P in prob.pvms]
        phi, psi = rand_table(rng, shape), rand_table(rng, shape)
        alpha = complex(rng.complex_normal((1,))[0])
        d = moi_spectral(prob, phi + alpha * psi) - moi_spectral(prob, phi) - alpha * moi_spectral(prob, psi)
        lin = max(lin, np.linalg.norm(d) / prob.scale(phi + alpha * psi))
        m = 1 + rng.integers(0, k)
        psi1, psi2 = rand_table(rng, shape[:m]), rand_table(rng, shape[m:])
        both = tensor_table(psi1, psi2)
        d = moi_compose_outer(prob, m, psi1, psi2) - moi_spectral(prob, both)
        outer = max(outer, np.linalg.norm(d) / prob.scale(both))
        chi = rand_table(rng, shape[m - 1:m + 1])
        prod = inner_table(phi, chi, m, prob.pvms)
        d = moi_compose_inner(prob, m, phi, chi) - moi_spectral(prob, prod)
        inner = max(inner, np.linalg.norm(d) / prob.scale(prod))
    ok = max(lin, outer, inner) <= 1e-10
    return ok, f"linearity {lin:.2e}, outer {outer:.2e}, inner {inner:.2e} (/scale, tol 1e-10)"


def criterion_7():
    rng = stream("estimates")
    viol_s = viol_l = 0
    margins_s, margins_l = [], []
    for i in range(200):
        k = 1 + i % 3
        prob = rand_problem(rng, 6, k)
        p, ps = rand_exponents(rng, k)
        sym = ipd_monomial_dd(k + rng.integers(0, 3), k) if i % 2 else rand_ipd(rng, prob.pvms, 4)
        rep = moi_schatten_check(prob, sym, p, ps)
        viol_s += rep.violated
        margins_s.append(rep.margin)

        tau = rand_trace_functional(rng, 6)
        Ps = [pvm_from_spectral(eig_hermitian(rand_block_hermitian(rng, tau))) for _ in range(k + 1)]
        bprob = MOIProblem(Ps, [rand_block_matrix(rng, tau) for _ in range(k)])
        sym = ipd_monomial_dd(k + rng.integers(0, 3), k) if i % 2 else rand_ipd(rng, Ps, 4)
        rep = moi_lp_check(bprob, tau, sym, p, ps)
        viol_l += rep.violated
        margins_l.append(rep.margin)
    unit = 0.0
    for p in EXPONENTS:
        prob = rand_problem(rng, 8, 1)
        unit = max(unit, abs(moi_schatten_check(prob, ipd_constant(2), p, [p]).margin))
    ok = viol_s == 0 and viol_l == 0 and unit <= 1e-12
    return ok, (f"violations schatten {viol_s}/200, lp {viol_l}/200; min margins "
                f"{min(margins_s):.2e}, {min(margins_l):.2e}; unit-symbol margin {unit:.2e} (tol 1e-12)")


def criterion_8():
    rng = stream("pavlov")
    pav = bs = 0.0
    svar = -math.inf
    for i in range(200):
        k = 1 + i % 3
        prob = rand_problem(rng, 6, k)
        phi = rand_table(rng, [len(P) for P in prob.pvms])
        vm = pavlov_build(prob)
        pav = max(pav, np.linalg.norm(pavlov_integrate(vm, phi) - moi_spectral(prob, phi)) / prob.scale(phi))
        lower, upper = semivariation_bounds(vm, prob.b, 50, rng)
        svar = max(svar, lower - upper)

        P, Q = rand_pvm(rng, rng.integers(2, 9)), rand_pvm(rng, rng.integers(2, 9))
        psi = rand_table(rng, (len(P), len(Q)))
        b = rand_matrix(rng, P.dim, Q.dim)
        p2 = MOIProblem([P, Q], [b])
        bs = max(bs, np.linalg.norm(bs_superoperator(P, Q, psi).apply(b) - moi_spectral(p2, psi))
                 / p2.scale(psi))
    ok = pav <= 1e-11 and bs <= 1e-11 and svar <= 1e-9
    return ok, (f"pavlov {pav:.2e}, superoperator {bs:.2e} (/scale, tol 1e-11); "
                f"max(lower - upper) {svar:.2e} (tol 1e-9)")


def criterion_9():
    rng = stream("tensor")
    rect = mult = 0.0
    for i in range(100):
        m = 2 + i % 3
        dmax = {2: 8, 3: 4, 4: 2}[m] if i % 2 else {2: 5, 3: 3, 4: 2}[m]
        Ps = [rand_pvm(rng, rng.integers(2, dmax + 1)) for _ in range(m)]
        T = pvm_tensor(Ps)
        G = [rand_subset(rng, P.labels) for P in Ps]
        rect = max(rect, np.linalg.norm(T.measure(rectangle_labels(Ps, G)) - rectangle(Ps, G)))
        G1, G2 = rand_subset(rng, T.labels), rand_subset(rng, T.labels)
        both = [lab for lab in G1 if lab in set(G2)]
        mult = max(mult, np.linalg.norm(T.measure(both) - T.measure(G1) @ T.measure(G2)))
    ok = rect <= 1e-10 and mult <= 1e-10
    return ok, f"rectangle {rect:.2e}, multiplicativity {mult:.2e} (tol 1e-10)"


def criterion_10():
    rng = stream("derivative")
    e1 = e2 = poly = 0.0
    for i in range(100):
        n = rng.integers(2, 9)
        kind = i % 3
        if kind == 0:
            f = calc.ScalarFunction.exp(rng.uniform(-1, 1))
        elif kind == 1:
            f = calc.ScalarFunction.power(rng.integers(0, 7))
        else:
            f = calc.ScalarFunction.polynomial(rng.standard_normal(rng.integers(1, 6)).tolist())
        A, B = rand_hermitian(rng, n), rand_hermitian(rng, n)
        for order in (1, 2):
            d = calc.frechet_derivative(f, A, B, order)
            fd = calc.finite_difference(f, A, B, order)
            rel = np.linalg.norm(d - fd) / (1 + np.linalg.norm(d))
            if order == 1:
                e1 = max(e1, rel)
            else:
                e2 = max(e2, rel)
    for deg in range(0, 7):
        for _ in range(5):
            n = rng.integers(2, 9)
            A, B = rand_hermitian(rng, n), rand_hermitian(rng, n)
            pw = [np.linalg.matrix_power(A, j) for j in range(deg + 1)]
            want = sum((pw[a] @ B @ pw[deg - 1 - a] for a in range(deg)), np.zeros((n, n)))
            got = calc.frechet_derivative(calc.ScalarFunction.power(deg), A, B, 1)
            poly = max(poly, np.linalg.norm(got - want))
    ok = e1 <= 1e-5 and e2 <= 1e-4 and poly <= 1e-10
    return ok, (f"k=1 rel {e1:.2e} (tol 1e-5), k=2 rel {e2:.2e} (tol 1e-4), "
                f"polynomial {poly:.2e} (tol 1e-10)")


def criterion_11():
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "moikit.cli", "check", "--json"],
                          capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    reports = json.loads(proc.stdout)
    passed = sum(r["passed"] for r in reports)
    ok = proc.returncode == 0 and passed == len(reports) == 17 and elapsed < 60.0
    return ok, f"{passed}/{len(reports)} suites passed in {elapsed:.1f}s (limit 60s), exit {proc.returncode}"


CRITERIA = [
    (1, "engine equivalence", criterion_1),
    (2, "Schatten Minkowski", criterion_2),
    (3, "block-trace L^p Minkowski", criterion_3),
    (4, "frame characterization of S1", criterion_4),
    (5, "trace identities", criterion_5),
    (6, "algebraic properties", criterion_6),
    (7, "Schatten and L^p estimates", criterion_7),
    (8, "Pavlov and superoperator agreement", criterion_8),
    (9, "tensor PVM", criterion_9),
    (10, "derivatives vs finite differences", criterion_10),
    (11, "full check run", criterion_11),
]


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, detail = fn()
    emit(capsys, number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        emit(None, number, title, ok, detail)
        failures += not ok
    sys.exit(1 if failures else 0)
