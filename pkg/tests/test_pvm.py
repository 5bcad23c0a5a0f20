import math

import numpy as np
import pytest

from moikit.errors import DuplicateLabels, EmptyList, InvalidPVM, MissingLabel
from moikit.numkit import eig_hermitian
from moikit.pvm import (
    FinitePVM,
    pvm_counting,
    pvm_from_spectral,
    pvm_integrate,
    pvm_linf_norm,
    pvm_tensor,
    rectangle,
    rectangle_labels,
)

from conftest import herm


def spectral(a):
    return pvm_from_spectral(eig_hermitian(np.asarray(a, dtype=complex)))


def test_from_spectral_examples():
    P = spectral(np.eye(3))
    assert P.labels == (pytest.approx(1.0),) and len(P) == 1
    P = spectral(np.diag([1.0, 2.0]))
    assert [round(np.trace(p).real) for p in P.projections] == [1, 1]
    P = spectral([[0, 1], [1, 0]])
    np.testing.assert_allclose(P.projections[1], 0.5 * np.ones((2, 2)), atol=1e-14)


def test_counting_examples():
    P = pvm_counting(["a"])
    np.testing.assert_array_equal(P.projections[0], [[1]])
    P = pvm_counting([1, 2])
    np.testing.assert_array_equal(P.projections[0], np.diag([1, 0]))
    P = pvm_counting([1, 2, 3])
    np.testing.assert_array_equal(pvm_integrate(P, {1: 1, 2: 2, 3: 3}), np.diag([1, 2, 3]))
    phi = {1: -4.0, 2: 1.0, 3: 2.0}
    assert pvm_linf_norm(P, phi) == 4.0


def test_counting_duplicate():
    with pytest.raises(DuplicateLabels):
        pvm_counting([1, 1])


def test_invalid_pvm():
    with pytest.raises(InvalidPVM):
        FinitePVM((1, 2), (np.eye(2), np.eye(2))).validate()


def test_integrate_examples():
    A = np.diag([1.0, 2.0])
    P = spectral(A)
    np.testing.assert_allclose(pvm_integrate(P, lambda lam: 1.0), np.eye(2))
    np.testing.assert_allclose(pvm_integrate(P, lambda lam: lam), A, atol=1e-15)
    P = spectral([[0, 1], [1, 0]])
    np.testing.assert_allclose(pvm_integrate(P, lambda lam: lam ** 2), np.eye(2), atol=1e-14)


def test_integrate_missing_label():
    with pytest.raises(MissingLabel):
        pvm_integrate(pvm_counting([1, 2]), {1: 1.0})


def test_linf_examples():
    P = spectral(np.diag([1.0, 2.0]))
    assert pvm_linf_norm(P, lambda lam: 3 - 4j) == pytest.approx(5.0)
    assert pvm_linf_norm(P, lambda lam: lam) == pytest.approx(2.0)
    Z = FinitePVM((0, 1), (np.eye(2), np.zeros((2, 2))))
    assert pvm_linf_norm(Z, {0: 0.0, 1: 9.0}) == 0.0


def test_linf_equals_operator_norm(rng):
    for _ in range(20):
        P = spectral(herm(rng, 5))
        phi = rng.complex_normal((len(P),))
        assert abs(pvm_linf_norm(P, phi) - np.linalg.norm(pvm_integrate(P, phi), 2)) <= 1e-11


def test_star_homomorphism(rng):
    for _ in range(20):
        P = spectral(herm(rng, 4))
        phi, psi = rng.complex_normal((len(P),)), rng.complex_normal((len(P),))
        lhs = pvm_integrate(P, phi * psi)
        rhs = pvm_integrate(P, phi) @ pvm_integrate(P, psi)
        assert np.linalg.norm(lhs - rhs) <= 1e-11 * (1 + abs(phi).max()) * (1 + abs(psi).max())
        np.testing.assert_array_equal(pvm_integrate(P, phi.conj()), pvm_integrate(P, phi).conj().T)


def test_prune_zero_atoms():
    P = FinitePVM((0, 1), (np.eye(2), np.zeros((2, 2))), keep_zero_atoms=False)
    assert P.labels == (0,)


def test_tensor_examples():
    T = pvm_tensor([pvm_counting([0, 1]), pvm_counting([0, 1])])
    assert len(T) == 4
    for i, p in enumerate(T.projections):
        want = np.zeros((4, 4))
        want[i, i] = 1
        np.testing.assert_array_equal(p, want)
    one = FinitePVM((0.0,), (np.eye(2),))
    T = pvm_tensor([one, one])
    assert len(T) == 1
    np.testing.assert_array_equal(T.projections[0], np.eye(4))
    T = pvm_tensor([spectral(np.diag([1.0, 2.0])), spectral(np.diag([3.0, 4.0]))])
    np.testing.assert_allclose(T.projections[T.index((0, 0))], np.diag([1.0, 0, 0, 0]), atol=1e-15)
    assert T.values[0] == pytest.approx((1.0, 3.0))


def test_tensor_empty():
    with pytest.raises(EmptyList):
        pvm_tensor([])


def test_tensor_rectangle_and_multiplicativity(rng):
    Ps = [spectral(herm(rng, n)) for n in (2, 3, 2)]
    T = pvm_tensor(Ps)
    for _ in range(20):
        G = [[lab for lab in P.labels if rng.random() < 0.5] for P in Ps]
        assert np.linalg.norm(T.measure(rectangle_labels(Ps, G)) - rectangle(Ps, G)) <= 1e-10
        G1 = [lab for lab in T.labels if rng.random() < 0.5]
        G2 = [lab for lab in T.labels if rng.random() < 0.5]
        both = [lab for lab in G1 if lab in G2]
        assert np.linalg.norm(T.measure(both) - T.measure(G1) @ T.measure(G2)) <= 1e-10


def test_pvm_minkowski(rng):
    for _ in range(30):
        P = spectral(herm(rng, 4))
        w = rng.uniform(0, 1, 3)
        Phi = np.abs(rng.standard_normal((len(P), 3)))
        lhs = pvm_linf_norm(P, Phi @ w)
        rhs = math.fsum(wi * pvm_linf_norm(P, Phi[:, s]) for s, wi in enumerate(w))
        assert lhs <= rhs + 1e-10


def test_measure_is_additive():
    P = pvm_counting([1, 2, 3])
    np.testing.assert_array_equal(P.measure([1, 3]), np.diag([1, 0, 1]))
    np.testing.assert_array_equal(P.measure([]), np.zeros((3, 3)))
