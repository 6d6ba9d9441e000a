"""Validated quantum states, POVMs and channels plus the Born rule.

Objects are immutable after construction: their arrays are flagged
read-only and every invariant is checked once, in ``__post_init__``.

Bit ordering: the basis index of ``x_1 ... x_N`` is ``sum_k x_k 2**(N-k)``,
i.e. qubit 1 is the most significant bit and the leftmost kron factor.

Channels are stored through their normalized Choi state
``J = (L (x) id)(|W><W|)`` with ``|W> = d**-0.5 sum_i |ii>``, so ``tr J = 1``.
The output space is the first kron factor of ``J``.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .exceptions import (
    CPTPError,
    DomainError,
    InconsistencyError,
    ParseError,
    ShapeError,
    ValidationError,
)

STATE_TOL = 1e-10
POVM_PSD_TOL = 1e-10
POVM_COMPLETENESS_TOL = 1e-9
CHANNEL_TOL = 1e-9
PROB_TOL = 1e-9
PROB_CLAMP = 1e-12
MAX_CACHED_KRAUS = 256

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"i": I2, "x": X, "y": Y, "z": Z}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def n_qubits_for(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2 ** n != dim:
        raise ShapeError(f"dimension {dim} is not a power of two")
    return n


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------

def check_density_matrix(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a density matrix and return its Hermitian part."""
    rho = linalg.as_matrix(rho)
    if rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise ShapeError(f"density matrix must be square and non-empty, got {rho.shape}")
    try:
        rho = linalg.hermitize(rho, tol)
    except DomainError as exc:
        raise ValidationError(f"state is not Hermitian: {exc}") from None
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"state trace {tr!r} differs from 1")
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < -tol:
        raise ValidationError(f"state has negative eigenvalue {lam_min:.3g}")
    return rho


def check_effects(effects, psd_tol: float = POVM_PSD_TOL,
                  completeness_tol: float = POVM_COMPLETENESS_TOL) -> np.ndarray:
    """Validate POVM effects given as an ``(n, d, d)`` array-like."""
    E = np.asarray(effects, dtype=complex)
    if E.ndim != 3 or E.shape[1] != E.shape[2] or E.shape[0] == 0:
        raise ShapeError(f"effects must have shape (n, d, d), got {E.shape}")
    if not np.all(np.isfinite(E)):
        raise ValidationError("effects have non-finite entries")
    herm_dev = np.max(np.abs(E - np.conj(np.swapaxes(E, 1, 2))))
    if herm_dev > psd_tol:
        raise ValidationError(f"effect is not Hermitian (deviation {herm_dev:.3g})")
    E = 0.5 * (E + np.conj(np.swapaxes(E, 1, 2)))
    lam_min = np.linalg.eigvalsh(E)[:, 0]
    bad = np.flatnonzero(lam_min < -psd_tol)
    if bad.size:
        raise ValidationError(
            f"effect {int(bad[0])} has negative eigenvalue {lam_min[bad[0]]:.3g}")
    d = E.shape[1]
    dev = np.max(np.abs(E.sum(axis=0) - np.eye(d)))
    if dev > completeness_tol:
        raise ValidationError(f"effects do not sum to identity (deviation {dev:.3g})")
    return E


def check_unitary(U, tol: float = 1e-9) -> np.ndarray:
    U = linalg.as_matrix(U)
    if U.shape[0] != U.shape[1]:
        raise ShapeError(f"unitary must be square, got {U.shape}")
    dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if dev > tol:
        raise ValidationError(f"matrix is not unitary (deviation {dev:.3g})")
    return U


def check_probability_vector(p, tol: float = PROB_TOL,
                             clamp: float = PROB_CLAMP) -> np.ndarray:
    """Clamp dust below zero, check normalization, renormalize."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise InconsistencyError("probability vector is empty or non-finite")
    if np.any(p < -clamp):
        raise InconsistencyError(f"negative probability {p.min():.3g}")
    p = np.where(p < 0, 0.0, p)
    s = p.sum()
    if abs(s - 1.0) > tol:
        raise InconsistencyError(f"probabilities sum to {s!r}")
    return p / s


# ---------------------------------------------------------------------------
# objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumState:
    """Density matrix on ``C^d``."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(check_density_matrix(self.matrix)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_for(self.dim)

    def purity(self) -> float:
        return linalg.hs_norm(self.matrix) ** 2


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered tuple of effects, stored as an ``(n, d, d)`` array."""

    effects: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "effects", _frozen(check_effects(self.effects)))

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.effects.shape[0]

    def __len__(self):
        return self.n_outcomes

    def __getitem__(self, i):
        return self.effects[i]


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map stored as its normalized Choi state.

    ``kraus`` is kept when the channel was built from a short Kraus list and
    is then used by :func:`apply_channel`; otherwise application contracts
    the Choi matrix directly.
    """

    choi: np.ndarray
    kraus: Optional[tuple] = field(default=None)

    def __post_init__(self):
        J = linalg.as_matrix(self.choi)
        d2 = J.shape[0]
        d = int(round(np.sqrt(d2)))
        if J.shape != (d2, d2) or d * d != d2:
            raise ShapeError(f"Choi matrix must be d^2 x d^2, got {J.shape}")
        try:
            J = linalg.hermitize(J, CHANNEL_TOL)
        except DomainError as exc:
            raise CPTPError(f"Choi matrix is not Hermitian: {exc}") from None
        lam_min = float(np.linalg.eigvalsh(J)[0])
        if lam_min < -CHANNEL_TOL:
            raise CPTPError(f"Choi matrix has negative eigenvalue {lam_min:.3g}")
        marg = linalg.partial_trace(J, [d, d], keep=[1])
        dev = np.max(np.abs(marg - np.eye(d) / d))
        if dev > CHANNEL_TOL:
            raise CPTPError(f"channel is not trace preserving (deviation {dev:.3g})")
        object.__setattr__(self, "choi", _frozen(J))
        if self.kraus is not None:
            object.__setattr__(self, "kraus", tuple(_frozen(K) for K in self.kraus))

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.choi.shape[0])))

    def choi_tensor(self) -> np.ndarray:
        """Choi state as a tensor ``[out, in, out', in']``."""
        d = self.dim
        return np.asarray(self.choi).reshape(d, d, d, d)

    def superoperator(self) -> np.ndarray:
        """Matrix ``S`` with ``vec(L(rho)) = S vec(rho)`` for row-major ``vec``."""
        d = self.dim
        T = self.choi_tensor()  # T[a, i, b, j] = L(|i><j|)[a, b] / d
        return d * T.transpose(0, 2, 1, 3).reshape(d * d, d * d)

    def kraus_operators(self, tol: float = 1e-12) -> list:
        """Kraus operators (cached ones if present, else from the Choi spectrum)."""
        if self.kraus is not None:
            return [np.asarray(K) for K in self.kraus]
        d = self.dim
        w, v = np.linalg.eigh(np.asarray(self.choi))
        ops = []
        for lam, vec in zip(w[::-1], v.T[::-1]):
            if lam <= tol:
                break
            ops.append(np.sqrt(d * lam) * vec.reshape(d, d))
        return ops


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def pure_state(amplitudes) -> QuantumState:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if psi.size == 0 or not np.isfinite(norm) or norm == 0:
        raise DomainError("pure state needs a finite nonzero amplitude vector")
    psi = psi / norm
    return QuantumState(np.outer(psi, psi.conj()))


def basis_vector(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def _parse_axis(label) -> str:
    s = str(label).strip().lower()
    if s not in ("x", "y", "z"):
        raise ParseError(f"invalid Pauli axis {label!r}; expected one of x, y, z")
    return s


def _parse_sign(label) -> int:
    if label in (1, +1, "+", "+1", "p", "plus"):
        return 1
    if label in (-1, "-", "-1", "m", "minus"):
        return -1
    raise ParseError(f"invalid eigenvalue sign {label!r}; expected '+' or '-'")


def pauli_eigenstate_matrix(axis, sign) -> np.ndarray:
    return 0.5 * (I2 + _parse_sign(sign) * PAULIS[_parse_axis(axis)])


def pauli_product_state(axes: Sequence, signs: Sequence) -> QuantumState:
    """Tensor product of single-qubit Pauli eigenstates, qubit 1 leftmost."""
    if len(axes) != len(signs) or len(axes) == 0:
        raise ShapeError("axes and signs must be non-empty lists of equal length")
    mats = [pauli_eigenstate_matrix(a, s) for a, s in zip(axes, signs)]
    return QuantumState(linalg.kron_all(mats))


def maximally_mixed(n_qubits: int = None, dim: int = None) -> QuantumState:
    d = _resolve_dim(n_qubits, dim)
    return QuantumState(np.eye(d, dtype=complex) / d)


def _resolve_dim(n_qubits, dim) -> int:
    if (n_qubits is None) == (dim is None):
        raise ValueError("give exactly one of n_qubits or dim")
    d = 2 ** int(n_qubits) if dim is None else int(dim)
    if d < 1:
        raise ShapeError("dimension must be positive")
    return d


def comp_basis_povm(n_qubits: int = None, dim: int = None) -> Povm:
    d = _resolve_dim(n_qubits, dim)
    E = np.zeros((d, d, d), dtype=complex)
    E[np.arange(d), np.arange(d), np.arange(d)] = 1.0
    return Povm(E)


def trivial_povm(n: int, dim: int) -> Povm:
    """``n`` identical effects ``I/n``; with ``n == dim`` this is the uninformative ``(I/d, ..., I/d)``."""
    E = np.broadcast_to(np.eye(dim, dtype=complex) / n, (n, dim, dim))
    return Povm(E)


def dephase_povm(M: Povm) -> Povm:
    """Replace every effect by its diagonal part."""
    E = np.asarray(M.effects)
    d = M.dim
    D = np.zeros_like(E)
    idx = np.arange(d)
    D[:, idx, idx] = E[:, idx, idx]
    return Povm(D)


def channel_from_kraus(kraus: Sequence, tol: float = CHANNEL_TOL) -> QuantumChannel:
    ops = [linalg.as_matrix(K) for K in kraus]
    if not ops:
        raise CPTPError("empty Kraus list")
    d = ops[0].shape[1]
    if any(K.shape != (d, d) for K in ops):
        raise ShapeError("Kraus operators must all be square of equal dimension")
    S = sum(K.conj().T @ K for K in ops)
    dev = np.max(np.abs(S - np.eye(d)))
    if dev > tol:
        raise CPTPError(f"Kraus operators are not complete (deviation {dev:.3g})")
    vecs = np.stack([K.reshape(-1) for K in ops])  # vec(K)[a*d+i] = K[a, i]
    J = vecs.T @ vecs.conj() / d
    keep = tuple(ops) if len(ops) <= MAX_CACHED_KRAUS else None
    return QuantumChannel(J, kraus=keep)


def channel_from_choi(choi) -> QuantumChannel:
    return QuantumChannel(choi)


def unitary_channel(U) -> QuantumChannel:
    return channel_from_kraus([check_unitary(U)])


def identity_channel(dim: int) -> QuantumChannel:
    return unitary_channel(np.eye(dim, dtype=complex))


def depolarizing_channel(dim: int) -> QuantumChannel:
    """Completely depolarizing channel ``rho -> tr(rho) I/d``."""
    return QuantumChannel(np.eye(dim * dim, dtype=complex) / dim ** 2)


def _tensor_choi(chois: Sequence[np.ndarray], dims: Sequence[int]) -> np.ndarray:
    # kron of per-factor Choi states has axis order (o1, i1, o2, i2, ...);
    # the joint Choi state needs (o1, o2, ..., i1, i2, ...).
    J = linalg.kron_all(chois)
    n = len(dims)
    shape = []
    for d in dims:
        shape += [d, d]
    T = J.reshape(shape + shape)
    row_perm = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    col_perm = [2 * n + p for p in row_perm]
    D = int(np.prod(dims))
    return T.transpose(row_perm + col_perm).reshape(D * D, D * D)


def tensor_channels(channels: Sequence[QuantumChannel]) -> QuantumChannel:
    """Tensor product of channels, first channel acting on the leftmost factor."""
    channels = list(channels)
    if not channels:
        raise ValueError("need at least one channel")
    dims = [c.dim for c in channels]
    J = _tensor_choi([np.asarray(c.choi) for c in channels], dims)
    kraus = None
    if all(c.kraus is not None for c in channels):
        count = int(np.prod([len(c.kraus) for c in channels]))
        if count <= MAX_CACHED_KRAUS:
            kraus = [np.ones((1, 1), dtype=complex)]
            for c in channels:
                kraus = [np.kron(A, B) for A in kraus for B in c.kraus]
    return QuantumChannel(J, kraus=kraus)


# ---------------------------------------------------------------------------
# application and Born rule
# ---------------------------------------------------------------------------

def apply_channel_matrix(channel: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    """Unvalidated ``L(rho)`` on a raw matrix (hot path for sampling loops)."""
    if channel.kraus is not None:
        out = np.zeros_like(rho, dtype=complex)
        for K in channel.kraus:
            out += K @ rho @ K.conj().T
        return out
    d = channel.dim
    return d * np.einsum("aibj,ij->ab", channel.choi_tensor(), rho)


def apply_channel(channel: QuantumChannel, rho) -> QuantumState:
    mat = rho.matrix if isinstance(rho, QuantumState) else check_density_matrix(rho)
    if mat.shape[0] != channel.dim:
        raise ShapeError(f"state dimension {mat.shape[0]} != channel dimension {channel.dim}")
    return QuantumState(apply_channel_matrix(channel, np.asarray(mat)))


def born_probabilities(rho: np.ndarray, effects: np.ndarray) -> np.ndarray:
    """Raw ``tr(M_i rho)`` values without validation."""
    return np.einsum("nij,ji->n", effects, rho).real


def born_distribution(rho, M: Povm) -> np.ndarray:
    mat = rho.matrix if isinstance(rho, QuantumState) else check_density_matrix(rho)
    if mat.shape[0] != M.dim:
        raise ShapeError(f"state dimension {mat.shape[0]} != POVM dimension {M.dim}")
    return check_probability_vector(born_probabilities(np.asarray(mat), np.asarray(M.effects)))


# ---------------------------------------------------------------------------
# coercion of raw arrays
# ---------------------------------------------------------------------------

def as_state(obj) -> QuantumState:
    if isinstance(obj, QuantumState):
        return obj
    arr = np.asarray(obj, dtype=complex)
    if arr.ndim == 1:
        return pure_state(arr)
    return QuantumState(arr)


def as_povm(obj) -> Povm:
    return obj if isinstance(obj, Povm) else Povm(obj)


def as_channel(obj) -> QuantumChannel:
    """Accept a channel, a Choi matrix, or a list of Kraus operators."""
    if isinstance(obj, QuantumChannel):
        return obj
    if isinstance(obj, (list, tuple)):
        return channel_from_kraus(obj)
    arr = np.asarray(obj, dtype=complex)
    if arr.ndim == 3:
        return channel_from_kraus(list(arr))
    return QuantumChannel(arr)
