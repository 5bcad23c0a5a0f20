import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moikit.decomp import ipd_monomial_dd, ipd_reconstruct
from moikit.errors import DegreeTooLow
from moikit.io import (
    MalformedInput,
    builtin_ipd,
    dumps,
    ipd_from_json,
    ipd_to_json,
    loads,
    matrix_from_json,
    matrix_to_json,
    pvm_from_json,
    pvm_to_json,
)
from moikit.numkit import eig_hermitian
from moikit.pvm import pvm_from_spectral, pvm_tensor

floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=floats),
       st.data())
def test_matrix_round_trip_bit_exact(re, data):
    im = data.draw(arrays(np.float64, re.shape, elements=floats))
    a = re + 1j * im
    back = matrix_from_json(loads(dumps(matrix_to_json(a))))
    assert back.tobytes() == a.tobytes()


def test_negative_zero_survives():
    a = np.array([[complex(-0.0, -0.0)]])
    back = matrix_from_json(json.loads(dumps(matrix_to_json(a))))
    assert np.signbit(back.real[0, 0]) and np.signbit(back.imag[0, 0])


@pytest.mark.parametrize("bad", [
    {"rows": 2, "cols": 2, "data": [[1, 0]]},
    {"rows": 1, "cols": 1, "data": [["x", 0]]},
    {"rows": 1, "cols": 1},
    [1, 2, 3],
])
def test_matrix_malformed(bad):
    with pytest.raises(MalformedInput):
        matrix_from_json(bad)


def test_pvm_round_trip():
    P = pvm_from_spectral(eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]])))
    Q = pvm_from_json(loads(dumps(pvm_to_json(P))))
    assert Q.labels == P.labels
    for p, q in zip(P.projections, Q.projections):
        assert p.tobytes() == q.tobytes()
    T = pvm_tensor([P, P])
    T2 = pvm_from_json(loads(dumps(pvm_to_json(T))))
    assert T2.labels == T.labels and T2.values == T.values


def test_ipd_round_trip():
    P = pvm_from_spectral(eig_hermitian(np.diag([1.0, 2.0, 4.0])))
    ipd = ipd_monomial_dd(4, 2)
    back = ipd_from_json(loads(dumps(ipd_to_json(ipd, [P] * 3))))
    np.testing.assert_array_equal(ipd_reconstruct(back, [P] * 3), ipd_reconstruct(ipd, [P] * 3))


def test_builtin_specs():
    assert builtin_ipd("monomial:3", 1).arity == 2
    assert builtin_ipd("exp:1.5:6", 2).arity == 3
    with pytest.raises(DegreeTooLow):
        builtin_ipd("monomial:1", 2)
    for bad in ("monomial:x", "nope:1", "exp:1"):
        with pytest.raises(MalformedInput):
            builtin_ipd(bad, 1)


def test_dumps_rejects_nan_and_is_sorted():
    assert dumps({"b": 1, "a": 0.1}) == '{"a": 0.1, "b": 1}'
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})
