"""Seeded random-circuit ensembles and frame-potential diagnostics.

A sample is a pure function of ``(seed, stream, index)``: the generator for
it is built from ``SeedSequence(seed, spawn_key=(stream, index))``.  Any
partition of indices across workers therefore reproduces sequential
sampling bit for bit.

Layered circuits are ``U = prod_{j=1..p} R_j E_j`` (the ``j = 1`` factor is
leftmost), where ``R_j`` is a rotation block and ``E_j`` an entangling block.
"""
import re
from dataclasses import dataclass, field, replace
from math import floor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .exceptions import ParseError, ValidationError
from .qobjects import PAULIS, check_unitary

KINDS = ("haar", "brickwork", "qaoa", "vqe", "discrete", "external")
VQE_ANSATZE = {"vqe-zy": ("z", "y"), "vqe-y": ("y",)}
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def default_layers(n_qubits: int) -> int:
    """Circuit depth used for the scaling experiments: ``floor(1.5 N)``."""
    return int(floor(1.5 * n_qubits))


def sample_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(index))))


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so the result does not
    depend on the QR sign convention.
    """
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def apply_gate(U: np.ndarray, gate: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Left-multiply ``U`` by ``gate`` acting on ``qubits`` (0-based, qubit 0 most significant)."""
    k = len(qubits)
    D = U.shape[1]
    T = U.reshape([2] * n + [D])
    G = gate.reshape([2] * (2 * k))
    T = np.tensordot(G, T, axes=(list(range(k, 2 * k)), list(qubits)))
    T = np.moveaxis(T, list(range(k)), list(qubits))
    return T.reshape(2 ** n, D)


def brickwork_unitary(n: int, depth: int, rng: np.random.Generator) -> np.ndarray:
    U = np.eye(2 ** n, dtype=complex)
    for layer in range(depth):
        for a in range(layer % 2, n - 1, 2):
            U = apply_gate(U, haar_unitary(4, rng), (a, a + 1), n)
    return U


def max2sat_instance(n: int, sat_seed: int, n_clauses: Optional[int] = None,
                     max_attempts: int = 1000) -> np.ndarray:
    """Random 2-SAT clauses as rows ``(var_a, var_b, neg_a, neg_b)``; ``3N`` clauses by default.

    Draws are repeated (deterministically in ``sat_seed``) until the ZZ
    couplings of the cost Hamiltonian connect all qubits.  With a
    disconnected coupling graph the QAOA circuit factorizes into independent
    blocks and cannot approach a unitary design at any depth.
    """
    if n < 2:
        raise ValueError("a 2-SAT instance needs at least 2 variables")
    m = 3 * n if n_clauses is None else int(n_clauses)
    for attempt in range(max_attempts):
        rng = np.random.default_rng(np.random.SeedSequence(int(sat_seed), spawn_key=(n, attempt)))
        rows = []
        for _ in range(m):
            a, b = rng.choice(n, size=2, replace=False)
            na, nb = rng.integers(0, 2, size=2)
            rows.append((a, b, na, nb))
        clauses = np.array(rows, dtype=int)
        if couplings_connected(n, max2sat_cost(n, clauses)):
            return clauses
    raise RuntimeError(f"no connected 2-SAT instance found in {max_attempts} draws")


def couplings_connected(n: int, cost: np.ndarray, tol: float = 1e-12) -> bool:
    """Whether the nonzero ZZ coefficients of a diagonal cost connect all ``n`` qubits."""
    idx = np.arange(2 ** n)
    z = 1 - 2 * ((idx[:, None] >> (n - 1 - np.arange(n))) & 1)
    J = (z * cost[:, None]).T @ z / 2 ** n
    seen, todo = {0}, [0]
    while todo:
        a = todo.pop()
        for b in range(n):
            if b not in seen and abs(J[a, b]) > tol:
                seen.add(b)
                todo.append(b)
    return len(seen) == n


def max2sat_cost(n: int, clauses: np.ndarray) -> np.ndarray:
    """Number of violated clauses for every computational basis state."""
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    h = np.zeros(2 ** n)
    for a, b, na, nb in clauses:
        lit_a = bits[:, a] ^ na
        lit_b = bits[:, b] ^ nb
        h += (lit_a == 0) & (lit_b == 0)
    return h


def _rotation_block(n: int, axis_angles: Sequence[tuple]) -> np.ndarray:
    """Product over qubits of single-qubit rotations; each entry is ``[(axis, angles), ...]``
    applied right to left, so the last pair in the list acts first."""
    mats = []
    for k in range(n):
        m = np.eye(2, dtype=complex)
        for axis, angles in axis_angles:
            g = angles[k]
            m = m @ (np.cos(g) * PAULIS["i"] - 1j * np.sin(g) * PAULIS[axis])
        mats.append(m)
    return linalg.kron_all(mats)


def qaoa_unitary(n: int, alphas: np.ndarray, betas: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """``prod_j exp(-i sum_k alpha_jk X_k) exp(-i beta_j H)`` with diagonal ``H``."""
    U = np.eye(2 ** n, dtype=complex)
    for a, b in zip(alphas, betas):
        R = _rotation_block(n, [("x", a)])
        U = (U @ R) * np.exp(-1j * b * cost)[None, :]
    return U


def cx_chain(n: int) -> np.ndarray:
    U = np.eye(2 ** n, dtype=complex)
    for k in range(n - 1):
        U = U @ apply_gate(np.eye(2 ** n, dtype=complex), CX, (k, k + 1), n)
    return U


def vqe_unitary(n: int, angles: np.ndarray, ansatz: str = "vqe-zy") -> np.ndarray:
    """Hardware-efficient ansatz; ``angles`` has shape ``(p, len(axes), n)``.

    Per layer the rotation block is ``(x)_k exp(-i a Z) exp(-i b Y)`` for
    ``vqe-zy`` and ``(x)_k exp(-i b Y)`` for ``vqe-y``; the entangler is the
    nearest-neighbour CX chain.
    """
    axes = VQE_ANSATZE[ansatz]
    angles = np.asarray(angles, dtype=float).reshape(-1, len(axes), n)
    E = cx_chain(n)
    U = np.eye(2 ** n, dtype=complex)
    for layer in angles:
        R = _rotation_block(n, list(zip(axes, layer)))
        U = U @ R @ E
    return U


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CircuitEnsemble:
    """Distribution over unitaries on ``dim`` levels.

    ``elements`` holds ``(weight, unitary)`` pairs for discrete and external
    ensembles; ``angles`` keeps the parameter table of external ensembles.
    ``initial_state`` names the probe state protocols prepare before the
    first circuit: ``"plus"`` for QAOA-like circuits, ``"zero"`` otherwise.
    """

    kind: str
    dim: int
    n_qubits: Optional[int] = None
    layers: int = 0
    seed: int = 0
    sat_seed: int = 0
    ansatz: str = "vqe-zy"
    elements: tuple = field(default=(), repr=False)
    angles: Optional[np.ndarray] = field(default=None, repr=False)
    initial_state: str = "zero"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "qaoa":
            cost = max2sat_cost(self.n_qubits, max2sat_instance(self.n_qubits, self.sat_seed))
            object.__setattr__(self, "_cost", cost)
        if self.kind in ("discrete", "external"):
            w = np.array([e[0] for e in self.elements], dtype=float)
            if w.size == 0 or np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
                raise ValidationError("discrete ensemble weights must be non-negative and sum to 1")
            object.__setattr__(self, "_weights", w / w.sum())

    @property
    def is_discrete(self) -> bool:
        return self.kind in ("discrete", "external")

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def with_seed(self, seed: Optional[int]) -> "CircuitEnsemble":
        return self if seed is None else replace(self, seed=int(seed))

    def initial_vector(self) -> np.ndarray:
        if self.initial_state == "plus":
            return np.full(self.dim, self.dim ** -0.5, dtype=complex)
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def sample(self, index: int, stream: int = 0) -> np.ndarray:
        rng = sample_rng(self.seed, stream, index)
        n, p = self.n_qubits, self.layers
        if self.kind == "haar":
            return haar_unitary(self.dim, rng)
        if self.kind == "brickwork":
            return brickwork_unitary(n, p, rng)
        if self.kind == "qaoa":
            alphas = rng.uniform(-np.pi, np.pi, size=(p, n))
            betas = rng.uniform(-np.pi, np.pi, size=p)
            return qaoa_unitary(n, alphas, betas, self._cost)
        if self.kind == "vqe":
            return vqe_unitary(n, vqe_angles(n, p, rng, self.ansatz), self.ansatz)
        j = rng.choice(len(self.elements), p=self.weights)
        return np.asarray(self.elements[j][1])


def vqe_angles(n: int, p: int, rng: np.random.Generator, ansatz: str = "vqe-zy") -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, size=(p, len(VQE_ANSATZE[ansatz]), n))


def haar_ensemble(n_qubits: Optional[int] = None, dim: Optional[int] = None,
                  seed: int = 0) -> CircuitEnsemble:
    d = 2 ** n_qubits if dim is None else int(dim)
    if d < 1:
        raise ValueError("dimension must be positive")
    return CircuitEnsemble("haar", d, n_qubits, seed=seed)


def brickwork_ensemble(n_qubits: int, depth: int, seed: int = 0) -> CircuitEnsemble:
    if n_qubits < 2:
        raise ValueError("brickwork circuits need at least 2 qubits")
    return CircuitEnsemble("brickwork", 2 ** n_qubits, n_qubits, layers=depth, seed=seed)


def qaoa_ensemble(n_qubits: int, layers: Optional[int] = None, seed: int = 0,
                  sat_seed: int = 0) -> CircuitEnsemble:
    p = default_layers(n_qubits) if layers is None else layers
    return CircuitEnsemble("qaoa", 2 ** n_qubits, n_qubits, layers=p, seed=seed,
                           sat_seed=sat_seed, initial_state="plus")


def vqe_ensemble(n_qubits: int, layers: Optional[int] = None, seed: int = 0,
                 ansatz: str = "vqe-zy") -> CircuitEnsemble:
    if ansatz not in VQE_ANSATZE:
        raise ValueError(f"unknown ansatz {ansatz!r}")
    p = default_layers(n_qubits) if layers is None else layers
    return CircuitEnsemble("vqe", 2 ** n_qubits, n_qubits, layers=p, seed=seed, ansatz=ansatz)


def discrete_ensemble(elements: Sequence, seed: int = 0, initial_state: str = "zero") -> CircuitEnsemble:
    """Ensemble from ``(weight, unitary)`` pairs."""
    elements = tuple((float(w), check_unitary(U)) for w, U in elements)
    if not elements:
        raise ValidationError("discrete ensemble needs at least one element")
    d = elements[0][1].shape[0]
    if any(U.shape != (d, d) for _, U in elements):
        raise ValidationError("all unitaries of a discrete ensemble must share one dimension")
    n = int(round(np.log2(d))) if 2 ** int(round(np.log2(d))) == d else None
    return CircuitEnsemble("discrete", d, n, seed=seed, elements=elements,
                           initial_state=initial_state)


def make_ensemble(kind: str, n_qubits: int, layers: Optional[int] = None, seed: int = 0,
                  sat_seed: int = 0) -> CircuitEnsemble:
    """Factory used by the experiment driver."""
    if kind == "haar":
        return haar_ensemble(n_qubits, seed=seed)
    if kind == "brickwork":
        return brickwork_ensemble(n_qubits, 3 * n_qubits if layers is None else layers, seed)
    if kind == "qaoa":
        return qaoa_ensemble(n_qubits, layers, seed, sat_seed)
    if kind in ("vqe", "vqe-zy", "vqe-y"):
        return vqe_ensemble(n_qubits, layers, seed, "vqe-zy" if kind == "vqe" else kind)
    raise ValueError(f"cannot build a {kind!r} ensemble from parameters alone")


# ---------------------------------------------------------------------------
# frame potential
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FramePotentialEstimate:
    k: int
    estimate: float
    standard_error: float
    pair_count: int


def frame_potential(ensemble: CircuitEnsemble, k: int, pair_count: int,
                    seed: Optional[int] = None) -> FramePotentialEstimate:
    """Monte-Carlo estimate of ``E |tr(U^dagger V)|^(2k)`` over independent pairs."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if pair_count < 2:
        raise ValueError("need at least two pairs")
    ens = ensemble.with_seed(seed)
    vals = np.empty(pair_count)
    for i in range(pair_count):
        U = ens.sample(i, stream=0)
        V = ens.sample(i, stream=1)
        vals[i] = np.abs(np.vdot(U, V)) ** (2 * k)
    se = float(vals.std(ddof=1) / np.sqrt(pair_count))
    return FramePotentialEstimate(k, float(vals.mean()), se, pair_count)


# ---------------------------------------------------------------------------
# external parameter tables
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"^#\s*N\s*=\s*(\d+)\s+p\s*=\s*(\d+)\s+ansatz\s*=\s*(\S+)\s*$")


def write_external_params(path, n_qubits: int, layers: int, ansatz: str, rows) -> None:
    """Write an angle table: header ``# N=<n> p=<p> ansatz=<name>`` then one circuit per line.

    Columns run layer-major; inside a layer the rotation axes follow the
    ansatz order (``z`` then ``y`` for ``vqe-zy``) with the qubit index fastest.
    """
    if ansatz not in VQE_ANSATZE:
        raise ValueError(f"unknown ansatz {ansatz!r}")
    width = layers * len(VQE_ANSATZE[ansatz]) * n_qubits
    lines = [f"# N={n_qubits} p={layers} ansatz={ansatz}"]
    for row in rows:
        row = np.asarray(row, dtype=float).ravel()
        if row.size != width:
            raise ValueError(f"row has {row.size} angles, expected {width}")
        lines.append(" ".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_external_params(path) -> CircuitEnsemble:
    """Uniform discrete ensemble of ansatz circuits with angles read from ``path``."""
    text = Path(path).read_text().splitlines()
    header = None
    rows = []
    for lineno, line in enumerate(text, 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = _HEADER.match(s)
            if m and header is None:
                header = (int(m.group(1)), int(m.group(2)), m.group(3))
            continue
        if header is None:
            raise ParseError(f"{path}: line {lineno}: angle row before the '# N= p= ansatz=' header")
        try:
            rows.append([float(x) for x in s.replace(",", " ").split()])
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: non-numeric angle") from None
    if header is None:
        raise ParseError(f"{path}: missing '# N=<n> p=<p> ansatz=<name>' header")
    n, p, ansatz = header
    if ansatz not in VQE_ANSATZE:
        raise ParseError(f"{path}: unknown ansatz {ansatz!r}")
    if not rows:
        raise ParseError(f"{path}: no circuits")
    width = p * len(VQE_ANSATZE[ansatz]) * n
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"{path}: circuit {i} has {len(r)} angles, expected {width} for N={n}, p={p}")
    angles = np.array(rows).reshape(len(rows), p, len(VQE_ANSATZE[ansatz]), n)
    w = 1.0 / len(rows)
    elements = tuple((w, vqe_unitary(n, a, ansatz)) for a in angles)
    return CircuitEnsemble("external", 2 ** n, n, layers=p, ansatz=ansatz,
                           elements=elements, angles=angles)
