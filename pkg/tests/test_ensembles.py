import subprocess
import sys

import numpy as np
import pytest
from joblib import Parallel, delayed

from qacd import ensembles as en
from qacd.exceptions import ParseError, ValidationError
from qacd.qobjects import X

HAAR_F = {1: 1.0, 2: 2.0}


def is_unitary(U, tol=1e-9):
    return np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= tol


# -- Haar --------------------------------------------------------------------

def test_haar_d1_unit_modulus():
    U = en.haar_unitary(1, np.random.default_rng(0))
    assert U.shape == (1, 1) and abs(abs(U[0, 0]) - 1) < 1e-15


def test_haar_columns_normalized():
    U = en.haar_ensemble(3).sample(5)
    assert np.allclose(np.linalg.norm(U, axis=0), 1, atol=1e-12)
    assert is_unitary(U)


def test_haar_first_moment():
    # E |U_00|^2 = 1/d for Haar unitaries
    ens = en.haar_ensemble(dim=3, seed=4)
    vals = [abs(ens.sample(i)[0, 0]) ** 2 for i in range(4000)]
    assert abs(np.mean(vals) - 1 / 3) < 3 * np.std(vals) / np.sqrt(len(vals))


def test_haar_frame_potential_k1():
    est = en.frame_potential(en.haar_ensemble(dim=4, seed=9), 1, 10000)
    assert abs(est.estimate - 1) <= 3 * est.standard_error


def test_same_seed_same_index_reproduces():
    a = en.make_ensemble("vqe", 3, seed=5)
    assert np.array_equal(a.sample(17), a.sample(17))
    assert not np.array_equal(a.sample(17), a.sample(18))
    assert not np.array_equal(a.sample(17, stream=0), a.sample(17, stream=1))


def test_parallel_sampling_matches_sequential():
    ens = en.make_ensemble("qaoa", 3, seed=2)
    seq = [ens.sample(i) for i in range(24)]
    par = Parallel(n_jobs=2)(delayed(ens.sample)(i) for i in range(24))
    assert all(np.array_equal(a, b) for a, b in zip(seq, par))


def test_bit_identical_across_processes():
    code = ("import numpy as np; from qacd.ensembles import qaoa_ensemble;"
            "print(qaoa_ensemble(3, 4, seed=7, sat_seed=1).sample(3).tobytes().hex())")
    outs = [subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
            for _ in range(2)]
    assert outs[0] == outs[1]
    here = en.qaoa_ensemble(3, 4, seed=7, sat_seed=1).sample(3).tobytes().hex()
    assert outs[0].strip() == here


# -- brickwork ---------------------------------------------------------------

def test_brickwork_depth_zero_identity():
    assert np.array_equal(en.brickwork_ensemble(3, 0).sample(0), np.eye(8))


def test_brickwork_unitary_and_guard():
    assert is_unitary(en.brickwork_ensemble(4, 5, seed=1).sample(0))
    with pytest.raises(ValueError):
        en.brickwork_ensemble(1, 3)


def test_brickwork_gate_layout():
    # one layer on 4 qubits is a product of gates on (0,1) and (2,3)
    U = en.brickwork_ensemble(4, 1, seed=3).sample(0)
    T = U.reshape(4, 4, 4, 4).transpose(0, 2, 1, 3).reshape(16, 16)
    assert np.sum(np.linalg.svd(T, compute_uv=False) > 1e-10) == 1


# -- QAOA-like ---------------------------------------------------------------

def test_max2sat_cost_oracle():
    clauses = np.array([[0, 1, 0, 0], [1, 2, 1, 0], [0, 2, 0, 1]])
    h = en.max2sat_cost(3, clauses)
    for x in range(8):
        b = [(x >> (2 - k)) & 1 for k in range(3)]
        viol = sum(((b[a] ^ na) == 0) and ((b[c] ^ nc) == 0) for a, c, na, nc in clauses)
        assert h[x] == viol


def test_max2sat_instance_shape_and_connectivity():
    for n in (2, 3, 4, 5):
        for s in range(4):
            cl = en.max2sat_instance(n, s)
            assert cl.shape == (3 * n, 4)
            assert np.all(cl[:, 0] != cl[:, 1])
            assert en.couplings_connected(n, en.max2sat_cost(n, cl))


def test_couplings_connected_detects_split():
    # clauses only inside {0,1} leave qubit 2 uncoupled
    cost = en.max2sat_cost(3, np.array([[0, 1, 0, 0], [0, 1, 1, 0]]))
    assert not en.couplings_connected(3, cost)


def test_qaoa_zero_angles_identity():
    cost = en.max2sat_cost(3, en.max2sat_instance(3, 0))
    U = en.qaoa_unitary(3, np.zeros((4, 3)), np.zeros(4), cost)
    assert np.allclose(U, np.eye(8))


def test_qaoa_layer_structure():
    n = 2
    cost = en.max2sat_cost(n, en.max2sat_instance(n, 0))
    a, b = np.array([[0.3, -1.1]]), np.array([0.7])
    Rx = [np.cos(g) * np.eye(2) - 1j * np.sin(g) * X for g in a[0]]
    ref = np.kron(Rx[0], Rx[1]) @ np.diag(np.exp(-1j * b[0] * cost))
    assert np.allclose(en.qaoa_unitary(n, a, b, cost), ref)


def test_qaoa_ensemble_properties():
    ens = en.qaoa_ensemble(4, seed=1)
    assert ens.layers == 6 and ens.initial_state == "plus"
    assert np.allclose(ens.initial_vector(), np.full(16, 0.25))
    assert is_unitary(ens.sample(0))


# -- VQE-like ----------------------------------------------------------------

def test_cx_chain_oracle():
    # the product CX_{1,2} CX_{2,3} applies CX_{2,3} first: |x1 x2 x3> -> |x1, x2^x1, x3^x2>
    C = en.cx_chain(3)
    for x in range(8):
        b = [(x >> (2 - k)) & 1 for k in range(3)]
        v = np.zeros(8)
        v[x] = 1
        y = [b[0], b[1] ^ b[0], b[2] ^ b[1]]
        assert np.argmax(np.abs(C @ v)) == 4 * y[0] + 2 * y[1] + y[2]


def test_vqe_zero_angles_is_cx_power():
    n, p = 3, 4
    U = en.vqe_unitary(n, np.zeros((p, 2, n)))
    assert np.allclose(U, np.linalg.matrix_power(en.cx_chain(n), p))


def test_vqe_unitary_and_defaults():
    ens = en.vqe_ensemble(3, seed=2)
    assert ens.layers == 4 and ens.initial_state == "zero"
    assert is_unitary(ens.sample(0))
    assert is_unitary(en.vqe_ensemble(3, ansatz="vqe-y").sample(0))


# -- frame potential ---------------------------------------------------------

def test_frame_potential_single_identity():
    ens = en.discrete_ensemble([(1.0, np.eye(2))])
    est = en.frame_potential(ens, 1, 10)
    assert est.estimate == 4 and est.standard_error == 0


def test_frame_potential_guards():
    ens = en.haar_ensemble(1)
    with pytest.raises(ValueError):
        en.frame_potential(ens, 0, 10)
    with pytest.raises(ValueError):
        en.frame_potential(ens, 1, 1)


@pytest.mark.parametrize("kind", ["haar", "brickwork", "qaoa", "vqe"])
@pytest.mark.parametrize("n", [2, 3])
def test_frame_potential_dominance(kind, n):
    ens = en.make_ensemble(kind, n, seed=13)
    for k in (1, 2):
        est = en.frame_potential(ens, k, 2000)
        assert est.estimate >= HAAR_F[k] - 3 * est.standard_error


@pytest.mark.slow
def test_vqe_design_quality():
    for n in (3, 4):
        est = en.frame_potential(en.make_ensemble("vqe", n, seed=1), 2, 10000)
        assert abs(est.estimate - 2) <= 0.2 + 3 * est.standard_error


@pytest.mark.slow
@pytest.mark.xfail(reason="QAOA-like circuits with one mixing angle per layer per qubit and one "
                          "cost angle per layer reach F2 ~ 3 (N=3) and ~ 2.5 (N=4) at floor(1.5N) "
                          "layers; they approach the Haar value 2 only near 5N layers",
                   strict=False)
def test_qaoa_design_quality():
    for n in (3, 4):
        est = en.frame_potential(en.make_ensemble("qaoa", n, seed=1), 2, 10000)
        assert abs(est.estimate - 2) <= 0.2 + 3 * est.standard_error


@pytest.mark.slow
def test_qaoa_converges_with_depth():
    est = en.frame_potential(en.make_ensemble("qaoa", 3, layers=15, seed=1), 2, 3000)
    assert abs(est.estimate - 2) <= 0.2 + 3 * est.standard_error


# -- discrete and external ---------------------------------------------------

def test_discrete_ensemble_validation():
    with pytest.raises(ValidationError):
        en.discrete_ensemble([(0.5, np.eye(2))])
    with pytest.raises(ValidationError):
        en.discrete_ensemble([(1.0, np.diag([1, 2]))])
    with pytest.raises(ValidationError):
        en.discrete_ensemble([])


def test_external_single_zero_row(tmp_path):
    path = tmp_path / "angles.txt"
    en.write_external_params(path, 2, 3, "vqe-zy", [np.zeros(12)])
    ens = en.load_external_params(path)
    assert ens.is_discrete and np.allclose(ens.weights, [1.0])
    assert np.allclose(ens.sample(0), np.linalg.matrix_power(en.cx_chain(2), 3))
    assert np.array_equal(ens.sample(0), ens.sample(1))


def test_external_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    rows = rng.uniform(-np.pi, np.pi, size=(5, 2 * 1 * 3))
    path = tmp_path / "angles.txt"
    en.write_external_params(path, 3, 2, "vqe-y", rows)
    ens = en.load_external_params(path)
    assert np.allclose(ens.weights, 0.2)
    for j, r in enumerate(rows):
        assert np.array_equal(ens.elements[j][1], en.vqe_unitary(3, r.reshape(2, 1, 3), "vqe-y"))


@pytest.mark.parametrize("text,match", [
    ("0 0 0\n", "header"),
    ("# N=2 p=1 ansatz=vqe-zy\n0 0 0\n", "expected 4"),
    ("# N=2 p=1 ansatz=vqe-zy\n0 0 a 0\n", "non-numeric"),
    ("# N=2 p=1 ansatz=vqe-q\n0 0 0 0\n", "ansatz"),
    ("# N=2 p=1 ansatz=vqe-zy\n", "no circuits"),
])
def test_external_malformed(tmp_path, text, match):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(ParseError, match=match):
        en.load_external_params(path)
