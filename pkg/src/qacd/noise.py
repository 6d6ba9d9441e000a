"""Separable noise models and closed-form average-case distances.

Dense builders (``build_*``) materialize ``2**N``-dimensional objects and are
capped; the closed-form evaluators work at any ``N`` in ``O(N)`` arithmetic.

Bounds come in two flavours.  The *certified* ones follow from the exact
product formulas via the AM-GM inequality and ``(1 - x)**N <= exp(-x N)``,
and are what the test-suite asserts.  The tighter-looking variants quoted
with a doubled exponent (or an extra ``sqrt(2)``) do not follow from that
chain; they are returned in ``*_quoted`` fields for comparison only.
"""
from dataclasses import dataclass
from math import lgamma, log
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .exceptions import PreconditionError, SizeError, ValidationError
from .qobjects import (
    PAULIS,
    Povm,
    QuantumChannel,
    _parse_axis,
    channel_from_kraus,
    pauli_eigenstate_matrix,
    tensor_channels,
    unitary_channel,
)

DENSE_QUBIT_CAP = 6
SIMPLEX_TOL = 1e-12
PAULI_ORDER = ("i", "x", "y", "z")


def _check_cap(n: int, cap: int):
    if n > cap:
        raise SizeError(
            f"{n} qubits exceeds the dense cap of {cap}; use the closed-form evaluators")


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PauliChannelSpec:
    """Per-qubit Pauli probabilities, rows ordered ``(p_identity, p_x, p_y, p_z)``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.probs, dtype=float))
        if p.ndim != 2 or p.shape[1] != 4 or p.shape[0] == 0:
            raise ValidationError(f"Pauli probabilities must have shape (N, 4), got {p.shape}")
        if np.any(p < -SIMPLEX_TOL) or np.any(np.abs(p.sum(axis=1) - 1) > SIMPLEX_TOL):
            bad = int(np.flatnonzero((p < -SIMPLEX_TOL).any(axis=1)
                                     | (np.abs(p.sum(axis=1) - 1) > SIMPLEX_TOL))[0])
            raise ValidationError(f"qubit {bad}: Pauli probabilities are not a distribution")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_qubits(self) -> int:
        return self.probs.shape[0]

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliChannelSpec":
        return cls(np.tile([1.0, 0.0, 0.0, 0.0], (n_qubits, 1)))

    def stabilizer_probabilities(self, axes: Sequence) -> np.ndarray:
        """``q_i = p_identity + p_{axis_i}``: chance the noise leaves the axis eigenstate intact."""
        if len(axes) != self.n_qubits:
            raise ValueError(f"need {self.n_qubits} axes, got {len(axes)}")
        cols = [PAULI_ORDER.index(_parse_axis(a)) for a in axes]
        return self.probs[:, 0] + self.probs[np.arange(self.n_qubits), cols]


@dataclass(frozen=True, eq=False)
class ReadoutSpec:
    """Per-qubit classical success probabilities ``p(0|0)`` and ``p(1|1)``."""

    p00: np.ndarray
    p11: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.p00, dtype=float))
        b = np.atleast_1d(np.asarray(self.p11, dtype=float))
        if a.shape != b.shape or a.ndim != 1 or a.size == 0:
            raise ValidationError("p00 and p11 must be equal-length non-empty vectors")
        for name, v in (("p(0|0)", a), ("p(1|1)", b)):
            bad = np.flatnonzero((v < 0) | (v > 1) | ~np.isfinite(v))
            if bad.size:
                raise ValidationError(f"qubit {int(bad[0])}: {name} = {v[bad[0]]!r} outside [0, 1]")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "p00", a)
        object.__setattr__(self, "p11", b)

    @property
    def n_qubits(self) -> int:
        return self.p00.size

    @property
    def q_per_qubit(self) -> np.ndarray:
        return 0.5 * (self.p00 + self.p11)

    @classmethod
    def homogeneous(cls, p00: float, p11: float, n_qubits: int) -> "ReadoutSpec":
        return cls(np.full(n_qubits, p00), np.full(n_qubits, p11))

    def is_symmetric(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.p00 - self.p11) <= tol))


@dataclass(frozen=True)
class NoiseAggregates:
    """Qubit-averaged noise figures; ``p1_av``/``p2_av`` only exist for Pauli channels."""

    q_av: float
    f_av: float
    p1_av: Optional[float] = None
    p2_av: Optional[float] = None


def pauli_aggregates(spec: PauliChannelSpec, axes: Optional[Sequence] = None) -> NoiseAggregates:
    p = spec.probs
    p1 = float(p[:, 0].mean())
    p2 = float(np.sum(p ** 2, axis=1).mean())
    if axes is None:
        return NoiseAggregates(q_av=float("nan"), f_av=float("nan"), p1_av=p1, p2_av=p2)
    q = spec.stabilizer_probabilities(axes)
    return NoiseAggregates(float(q.mean()), float(np.mean(q * (1 - q))), p1, p2)


def readout_aggregates(spec: ReadoutSpec) -> NoiseAggregates:
    q = spec.q_per_qubit
    return NoiseAggregates(float(q.mean()), float(np.mean(q * (1 - q))))


# ---------------------------------------------------------------------------
# dense builders
# ---------------------------------------------------------------------------

def single_qubit_pauli_channel(p) -> QuantumChannel:
    p = np.asarray(p, dtype=float)
    kraus = [np.sqrt(pj) * PAULIS[label] for pj, label in zip(p, PAULI_ORDER) if pj > 0]
    return channel_from_kraus(kraus)


def build_pauli_channel(spec: PauliChannelSpec, max_qubits: int = DENSE_QUBIT_CAP) -> QuantumChannel:
    _check_cap(spec.n_qubits, max_qubits)
    return tensor_channels([single_qubit_pauli_channel(p) for p in spec.probs])


def apply_pauli_noise(rho: np.ndarray, spec: PauliChannelSpec) -> np.ndarray:
    """Apply the separable Pauli channel qubit by qubit to a dense density matrix."""
    n = spec.n_qubits
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2 ** n, 2 ** n):
        raise ValueError(f"state shape {rho.shape} does not match {n} qubits")
    T = rho.reshape([2] * (2 * n))
    for k, p in enumerate(spec.probs):
        out = np.zeros_like(T)
        for pj, label in zip(p, PAULI_ORDER):
            if pj == 0:
                continue
            P = PAULIS[label]
            # P acts on row axis k and (conjugated) on column axis n + k
            A = np.moveaxis(np.tensordot(P, T, axes=([1], [k])), 0, k)
            A = np.moveaxis(np.tensordot(A, P.conj().T, axes=([n + k], [0])), -1, n + k)
            out += pj * A
        T = out
    return T.reshape(2 ** n, 2 ** n)


def product_povm(per_qubit: Sequence, max_qubits: int = DENSE_QUBIT_CAP) -> Povm:
    """POVM with effects ``E^(1)_{x_1} (x) ... (x) E^(N)_{x_N}``, outcome index big-endian."""
    _check_cap(len(per_qubit), max_qubits)
    effects = [np.ones((1, 1), dtype=complex)]
    for pair in per_qubit:
        effects = [np.kron(A, np.asarray(E, dtype=complex)) for A in effects for E in pair]
    return Povm(np.stack(effects))


def readout_effects(p00: float, p11: float) -> tuple:
    E0 = np.diag([p00, 1.0 - p11]).astype(complex)
    return E0, np.eye(2, dtype=complex) - E0


def build_readout_povm(spec: ReadoutSpec, max_qubits: int = DENSE_QUBIT_CAP) -> Povm:
    return product_povm([readout_effects(a, b) for a, b in zip(spec.p00, spec.p11)], max_qubits)


def readout_spec_from_effects(per_qubit: Sequence) -> ReadoutSpec:
    """Classical success probabilities of per-qubit two-outcome effects (their diagonals)."""
    p00 = [float(np.real(E0[0, 0])) for E0, _ in per_qubit]
    p11 = [float(np.real(E1[1, 1])) for _, E1 in per_qubit]
    return ReadoutSpec(p00, p11)


def symmetrize_readout(spec: ReadoutSpec) -> ReadoutSpec:
    q = spec.q_per_qubit
    return ReadoutSpec(q.copy(), q.copy())


def random_readout_effects(rng: np.random.Generator, p00_range=(0.9, 0.995),
                           p11_range=(0.8, 0.97), coherence: float = 0.5) -> tuple:
    """Synthetic single-qubit detector: asymmetric diagonal plus a small off-diagonal term."""
    a = rng.uniform(*p00_range)
    b = rng.uniform(*p11_range)
    cmax = np.sqrt(min(a * (1 - b), (1 - a) * b))
    c = coherence * rng.uniform() * cmax * np.exp(2j * np.pi * rng.uniform())
    E0 = np.array([[a, c], [np.conj(c), 1 - b]], dtype=complex)
    return E0, np.eye(2, dtype=complex) - E0


def rotation_unitary(axes: Sequence, angles: Sequence) -> np.ndarray:
    """``(x)_k exp(-i angle_k sigma_k) = cos(angle) I - i sin(angle) sigma``."""
    if len(axes) != len(angles):
        raise ValueError("axes and angles must have equal length")
    mats = [np.cos(g) * PAULIS["i"] - 1j * np.sin(g) * PAULIS[_parse_axis(a)]
            for a, g in zip(axes, angles)]
    return linalg.kron_all(mats)


def coherent_rotation_channel(axes: Sequence, angles: Sequence,
                              max_qubits: int = DENSE_QUBIT_CAP) -> QuantumChannel:
    _check_cap(len(axes), max_qubits)
    return unitary_channel(rotation_unitary(axes, angles))


def single_pauli_insertion_channel(n_qubits: int, qubit: int, sigma: str = "x",
                                   max_qubits: int = DENSE_QUBIT_CAP) -> QuantumChannel:
    """Unitary channel applying one Pauli on ``qubit`` (0-based) and identity elsewhere."""
    _check_cap(n_qubits, max_qubits)
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
    mats = [PAULIS[_parse_axis(sigma)] if k == qubit else PAULIS["i"] for k in range(n_qubits)]
    return unitary_channel(linalg.kron_all(mats))


def noisy_pauli_state(spec: PauliChannelSpec, axes: Sequence, signs: Sequence) -> np.ndarray:
    """Dense ``L(psi)`` for a Pauli product state, built factor by factor."""
    mats = [apply_pauli_noise(pauli_eigenstate_matrix(a, s), PauliChannelSpec(p[None, :]))
            for a, s, p in zip(axes, signs, spec.probs)]
    return linalg.kron_all(mats)


# ---------------------------------------------------------------------------
# closed forms: noisy Pauli product states
# ---------------------------------------------------------------------------

def pauli_noise_state_distances(spec: PauliChannelSpec, axes: Sequence) -> tuple:
    """Exact average-case distances of the noisy Pauli product state.

    Returns ``(to_uniform, to_ideal)``: the distance of ``L(psi)`` to the
    maximally mixed state and to ``psi`` itself.  Eigenvalue signs do not
    enter.  Each qubit must keep its state with probability ``q_i >= 1/2``.
    """
    q = spec.stabilizer_probabilities(axes)
    bad = np.flatnonzero(q < 0.5)
    if bad.size:
        raise PreconditionError(
            f"qubit {int(bad[0])}: stabilizer probability {q[bad[0]]:.6g} < 1/2")
    n = q.size
    purity = float(np.prod(1 - 2 * q * (1 - q)))
    to_uniform = 0.5 * np.sqrt(max(purity - 2.0 ** -n, 0.0))
    to_ideal = 0.5 * np.sqrt(max(1 - 2 * float(np.prod(q)) + purity, 0.0))
    return float(to_uniform), float(to_ideal)


def upper_bound_to_uniform(f_av: float, n: int) -> float:
    return 0.5 * np.exp(-f_av * n)


def upper_bound_to_uniform_quoted(f_av: float, n: int) -> float:
    return 0.5 * np.exp(-2 * f_av * n)


def lower_bound_to_ideal(q_av: float, n: int, scale: float = 0.5) -> float:
    """``scale * sqrt(1 - 2 q_av**N)``; needs ``q_av <= 2**(-1/N)``."""
    limit = 0.5 ** (1.0 / n)
    if q_av > limit:
        raise PreconditionError(
            f"lower bound needs q_av <= (1/2)^(1/N) = {limit:.6g}, got q_av = {q_av:.6g}")
    return scale * float(np.sqrt(max(1 - 2 * q_av ** n, 0.0)))


@dataclass(frozen=True)
class StateBounds:
    upper_uniform: float
    lower_ideal: float
    upper_uniform_quoted: float


def pauli_noise_state_bounds(agg: NoiseAggregates, n: int) -> StateBounds:
    return StateBounds(
        upper_bound_to_uniform(agg.f_av, n),
        lower_bound_to_ideal(agg.q_av, n),
        upper_bound_to_uniform_quoted(agg.f_av, n),
    )


# ---------------------------------------------------------------------------
# closed forms: readout noise
# ---------------------------------------------------------------------------

def symmetric_readout_distances(spec: ReadoutSpec) -> tuple:
    """Exact ``(to_trivial, to_ideal)`` for a symmetric bit-flip readout at any N.

    Every outcome contributes the same term, so the outcome sum collapses to
    a product over qubits.
    """
    if not spec.is_symmetric(tol=1e-15):
        raise PreconditionError("readout spec is not symmetric; symmetrize it first")
    p = spec.p00
    purity = float(np.prod(p ** 2 + (1 - p) ** 2))
    to_trivial = 0.5 * np.sqrt(max(purity - 2.0 ** -p.size, 0.0))
    to_ideal = 0.5 * np.sqrt(max(1 - 2 * float(np.prod(p)) + purity, 0.0))
    return float(to_trivial), float(to_ideal)


@dataclass(frozen=True)
class ReadoutBounds:
    upper_trivial_sym: float
    lower_ideal: float
    upper_trivial_sym_quoted: float


def readout_noise_bounds(spec: ReadoutSpec) -> ReadoutBounds:
    """Upper bound on the symmetrized readout's distance to the trivial POVM and
    lower bound on the readout's distance to the ideal basis measurement."""
    q = spec.q_per_qubit
    bad = np.flatnonzero(q < 0.5)
    if bad.size:
        raise PreconditionError(f"qubit {int(bad[0])}: averaged success {q[bad[0]]:.6g} < 1/2")
    agg = readout_aggregates(spec)
    n = spec.n_qubits
    return ReadoutBounds(
        upper_bound_to_uniform(agg.f_av, n),
        lower_bound_to_ideal(agg.q_av, n),
        upper_bound_to_uniform_quoted(agg.f_av, n),
    )


def homogeneous_acd_m(p00: float, p11: float, n: int, reference: str = "ideal") -> float:
    """Exact POVM average-case distance of identical per-qubit readout noise at any N.

    Effects of the noisy measurement factor as ``E_{x_1} (x) ... (x) E_{x_N}``
    with ``E_0 = diag(p00, 1 - p11)``.  Norms, overlaps and traces all factor
    over qubits and depend only on the number ``k`` of zeros in the outcome,
    so the ``2**N`` terms collapse into ``N + 1`` binomially weighted ones.
    ``reference`` is ``"ideal"`` (computational basis) or ``"trivial"``.
    """
    a, b = float(p00), float(p11)
    if reference not in ("ideal", "trivial"):
        raise ValueError(f"reference must be 'ideal' or 'trivial', got {reference!r}")
    k = np.arange(n + 1)
    m = n - k
    hs0, hs1 = a * a + (1 - b) ** 2, (1 - a) ** 2 + b * b
    tr0, tr1 = a + 1 - b, 1 - a + b
    norm_m = hs0 ** k * hs1 ** m
    tr_m = tr0 ** k * tr1 ** m
    if reference == "ideal":
        sq = norm_m - 2 * a ** k * b ** m + 1 + (tr_m - 1) ** 2
    else:
        inv_d = 2.0 ** -n
        sq = norm_m - 2 * tr_m * inv_d + inv_d + (tr_m - 1) ** 2
    # weight of each k: C(N, k) / (2 d) with d = 2^N
    logw = np.array([lgamma(n + 1) - lgamma(j + 1) - lgamma(n - j + 1) for j in k]) \
        - (n + 1) * log(2.0)
    return float(np.sum(np.exp(logw) * np.sqrt(np.clip(sq, 0.0, None))))


# ---------------------------------------------------------------------------
# closed forms: Pauli noise between two random circuits
# ---------------------------------------------------------------------------

def pauli_channel_distances(spec: PauliChannelSpec) -> tuple:
    """Exact ``(to_depolarizing, to_identity)`` channel distances of a separable Pauli channel."""
    p = spec.probs
    n = spec.n_qubits
    purity = float(np.prod(np.sum(p ** 2, axis=1)))
    to_dep = 0.5 * np.sqrt(max(purity - 4.0 ** -n, 0.0))
    to_id = 0.5 * np.sqrt(max(1 - 2 * float(np.prod(p[:, 0])) + purity, 0.0))
    return float(to_dep), float(to_id)


@dataclass(frozen=True)
class ChannelBounds:
    upper_dep: float
    lower_identity: float
    upper_dep_quoted: float
    lower_identity_quoted: float


def pauli_channel_upper_bound(p2_av: float, n: int) -> float:
    """``0.5 exp(-(1 - p2_av) N / 2)``: bound on the distance to full depolarization."""
    return 0.5 * float(np.exp(-(1 - p2_av) * n / 2))


def pauli_channel_bounds(agg: NoiseAggregates, n: int) -> ChannelBounds:
    """Bounds on the separable Pauli channel's distance to full depolarization and to the identity.

    The lower bound needs ``p1_av <= 2**(-1/N)``.
    """
    return ChannelBounds(
        pauli_channel_upper_bound(agg.p2_av, n),
        lower_bound_to_ideal(agg.p1_av, n),
        0.5 * float(np.exp(-agg.p2_av * n)),
        lower_bound_to_ideal(agg.p1_av, n, scale=1 / np.sqrt(2)),
    )


SINGLE_PAULI_INSERTION_ACD = 1 / np.sqrt(2)
