import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qacd import linalg
from qacd.exceptions import DomainError, ShapeError, SizeError

from conftest import random_density

X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_kron_identity_and_diagonal():
    assert np.array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))
    out = linalg.kron(np.diag([1, 2]), np.diag([3, 5]))
    assert np.array_equal(out, np.diag([3, 5, 6, 10]))


def test_kron_bit_order():
    ket00 = np.zeros(4)
    ket00[0] = 1
    out = linalg.kron(X, X) @ ket00
    assert np.argmax(np.abs(out)) == 3


def test_kron_index_formula(rng):
    A = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    B = rng.normal(size=(4, 2))
    K = linalg.kron(A, B)
    for i, j, k, l in [(1, 2, 3, 1), (0, 0, 0, 0), (1, 1, 2, 0)]:
        assert K[i * 4 + k, j * 2 + l] == A[i, j] * B[k, l]


def test_kron_cap():
    with pytest.raises(SizeError):
        linalg.kron(np.eye(2), np.eye(4), max_axis=4)


def test_kron_associative(rng):
    A, B, C = (rng.normal(size=(2, 2)) for _ in range(3))
    assert np.allclose(linalg.kron(linalg.kron(A, B), C), linalg.kron(A, linalg.kron(B, C)))


def test_partial_trace_product(rng):
    rho, sigma = random_density(2, rng), random_density(3, rng)
    out = linalg.partial_trace(np.kron(rho, sigma), [2, 3], keep=[0])
    assert np.allclose(out, rho)
    out = linalg.partial_trace(np.kron(rho, 2 * sigma), [2, 3], keep=[1])
    assert np.allclose(out, 2 * sigma)


def test_partial_trace_maximally_entangled():
    omega = np.array([1, 0, 0, 1]) / np.sqrt(2)
    out = linalg.partial_trace(np.outer(omega, omega), [2, 2], keep=[0])
    assert np.allclose(out, np.eye(2) / 2)


def test_partial_trace_keep_all_is_identity(rng):
    A = rng.normal(size=(8, 8))
    assert np.allclose(linalg.partial_trace(A, [2, 2, 2], keep=[0, 1, 2]), A)


def test_partial_trace_preserves_trace(rng):
    G = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = G + G.conj().T
    out = linalg.partial_trace(H, [2, 2], keep=[1])
    assert abs(np.trace(out) - np.trace(H)) < 1e-12


def test_partial_trace_dims_mismatch():
    with pytest.raises(ShapeError):
        linalg.partial_trace(np.eye(4), [2, 3], keep=[0])


def test_hs_norm_values():
    assert linalg.hs_norm(np.zeros((3, 3))) == 0
    assert np.isclose(linalg.hs_norm(np.eye(5)), np.sqrt(5))
    assert np.isclose(linalg.hs_norm(np.diag([0.5, -0.5])), 1 / np.sqrt(2))


def test_hs_inner_definition(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.isclose(linalg.hs_inner(A, B), np.trace(A.conj().T @ B))


def test_trace_norm_values():
    assert linalg.trace_norm_herm(np.zeros((2, 2))) == 0
    assert np.isclose(linalg.trace_norm_herm(np.diag([1.0, -1.0])), 2)


def test_op_norm_values():
    assert np.isclose(linalg.op_norm_inf(np.eye(3)), 1)
    assert np.isclose(linalg.op_norm_inf(np.diag([1.0, -1.0])), 1)
    assert np.isclose(linalg.op_norm_inf(np.diag([0.3, -0.7])), 0.7)


def test_non_hermitian_rejected():
    with pytest.raises(DomainError):
        linalg.trace_norm_herm(np.array([[0, 1], [0, 0]]))


def test_near_hermitian_symmetrized():
    A = np.diag([1.0, 2.0]).astype(complex)
    A[0, 1] = 1e-12
    assert np.allclose(linalg.hermitize(A), A.T.conj() / 2 + A / 2)


def test_herm_eig_reconstruction(rng):
    G = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = G + G.conj().T
    w, Q = linalg.herm_eig(H)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(H - Q @ np.diag(w) @ Q.conj().T) <= 1e-9 * max(1, np.linalg.norm(H))
    assert np.max(np.abs(Q.conj().T @ Q - np.eye(6))) < 1e-10


herm_entries = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, (4, 4), elements=herm_entries), arrays(np.float64, (4, 4), elements=herm_entries))
def test_norm_equivalence(re, im):
    H = (re + re.T) + 1j * (im - im.T)
    hs, tr = linalg.hs_norm(H), linalg.trace_norm_herm(H)
    assert hs <= tr + 1e-9
    assert tr <= np.sqrt(4) * hs + 1e-9
    assert np.isclose(hs ** 2, linalg.hs_inner(H, H).real, rtol=1e-12, atol=1e-12)
