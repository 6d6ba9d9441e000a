"""Average-case and worst-case distances between quantum objects.

The average-case distances are closed-form degree-two expressions in the
objects; each approximates the mean total-variation distance of outcome
statistics when the objects are interleaved with random circuits that form
an approximate unitary 4-design:

* states:    ``0.5 * ||rho - sigma||_HS``
* POVMs:     ``1/(2d) * sum_i sqrt(||M_i - N_i||_HS^2 + tr(M_i - N_i)^2)``
* channels:  ``0.5 * sqrt(||J_L - J_G||_HS^2 + tr([(L - G)(I/d)]^2))``

The worst-case comparators are the trace distance, the operational distance
between measurements, and a lower bound on half the diamond norm obtained by
probing with the maximally entangled state.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .exceptions import DomainError, ShapeError, SizeError, ValidationError
from .qobjects import (
    Povm,
    QuantumChannel,
    QuantumState,
    as_channel,
    as_povm,
    as_state,
    born_probabilities,
    check_probability_vector,
    pure_state,
)

MAX_SUBSETS = 2 ** 20


@dataclass(frozen=True)
class DistanceReport:
    kind: str
    acd: float
    worst_case: float
    worst_case_is_lower_bound: bool

    @property
    def ratio(self) -> float:
        return self.worst_case / self.acd if self.acd > 0 else float("nan")


# ---------------------------------------------------------------------------
# classical
# ---------------------------------------------------------------------------

def tvd(p, q) -> float:
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise ShapeError(f"distributions have different lengths {p.size} and {q.size}")
    return float(0.5 * np.sum(np.abs(p - q)))


def success_probability(t: float) -> float:
    """Optimal probability of guessing which of two distributions produced a sample."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"total-variation distance {t!r} outside [0, 1]")
    return 0.5 * (1.0 + t)


# ---------------------------------------------------------------------------
# average-case distances
# ---------------------------------------------------------------------------

def _same_dim(a, b):
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch {a.dim} vs {b.dim}")


def acd_states(rho, sigma) -> float:
    rho, sigma = as_state(rho), as_state(sigma)
    _same_dim(rho, sigma)
    return 0.5 * linalg.hs_norm(rho.matrix - sigma.matrix)


def acd_povms(M, N) -> float:
    M, N = as_povm(M), as_povm(N)
    _same_dim(M, N)
    if M.n_outcomes != N.n_outcomes:
        raise ShapeError(f"outcome counts differ: {M.n_outcomes} vs {N.n_outcomes}")
    D = np.asarray(M.effects) - np.asarray(N.effects)
    hs2 = np.sum(D.real ** 2 + D.imag ** 2, axis=(1, 2))
    tr = np.trace(D, axis1=1, axis2=2).real
    return float(np.sum(np.sqrt(hs2 + tr ** 2)) / (2 * M.dim))


def image_of_maximally_mixed(channel: QuantumChannel) -> np.ndarray:
    """``L(I/d)``, read off the Choi state by tracing out the input factor."""
    d = channel.dim
    return linalg.partial_trace(np.asarray(channel.choi), [d, d], keep=[0])


def acd_channels(L, G) -> float:
    L, G = as_channel(L), as_channel(G)
    _same_dim(L, G)
    dJ = np.asarray(L.choi) - np.asarray(G.choi)
    out = image_of_maximally_mixed(L) - image_of_maximally_mixed(G)
    # out is Hermitian, so tr(out^2) = ||out||_HS^2
    return 0.5 * float(np.sqrt(linalg.hs_norm(dJ) ** 2 + linalg.hs_norm(out) ** 2))


# ---------------------------------------------------------------------------
# worst-case comparators
# ---------------------------------------------------------------------------

def trace_distance(rho, sigma) -> float:
    rho, sigma = as_state(rho), as_state(sigma)
    _same_dim(rho, sigma)
    return 0.5 * linalg.trace_norm_herm(rho.matrix - sigma.matrix)


def op_distance_exact(M, N, max_subsets: int = MAX_SUBSETS, chunk: int = 4096) -> float:
    """Operational distance ``max_rho d_tv`` between two POVMs.

    Equal to the largest eigenvalue of ``sum_{i in S} (M_i - N_i)`` over all
    outcome subsets ``S``.  Subset sums are formed in batches as a 0/1 mask
    matrix times the stacked effect differences.
    """
    M, N = as_povm(M), as_povm(N)
    _same_dim(M, N)
    if M.n_outcomes != N.n_outcomes:
        raise ShapeError(f"outcome counts differ: {M.n_outcomes} vs {N.n_outcomes}")
    n, d = M.n_outcomes, M.dim
    if 2 ** n > max_subsets:
        raise SizeError(
            f"{n} outcomes give 2^{n} subsets > cap {max_subsets}; "
            "use op_distance_probe_lb instead")
    D = np.asarray(M.effects) - np.asarray(N.effects)
    if not np.any(D):
        return 0.0
    flat = D.reshape(n, d * d)
    bit = np.arange(n)
    best = 0.0
    total = 2 ** n
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk))
        sel = ((masks[:, None] >> bit) & 1).astype(float)
        S = (sel @ flat).reshape(-1, d, d)
        S = 0.5 * (S + np.conj(np.swapaxes(S, 1, 2)))
        best = max(best, float(np.linalg.eigvalsh(S)[:, -1].max()))
    return best


def op_distance_probe_lb(M, N, probes: Sequence) -> float:
    """Largest total-variation distance over a list of probe states (a lower bound on d_op)."""
    M, N = as_povm(M), as_povm(N)
    _same_dim(M, N)
    probes = list(probes)
    if not probes:
        raise ValueError("probe list is empty")
    EM, EN = np.asarray(M.effects), np.asarray(N.effects)
    best = 0.0
    for rho in probes:
        rho = as_state(rho)
        if rho.dim != M.dim:
            raise ShapeError(f"probe dimension {rho.dim} != POVM dimension {M.dim}")
        m = np.asarray(rho.matrix)
        best = max(best, tvd(born_probabilities(m, EM), born_probabilities(m, EN)))
    return best


def default_probes(M, N, n_random: int = 32, seed: int = 0) -> list:
    """Computational basis states, extreme eigenvectors of effect differences, random pure states."""
    M, N = as_povm(M), as_povm(N)
    d = M.dim
    vecs = list(np.eye(d, dtype=complex))
    D = np.asarray(M.effects) - np.asarray(N.effects)
    for Di in D:
        if np.any(Di):
            _, v = np.linalg.eigh(0.5 * (Di + Di.conj().T))
            vecs += [v[:, -1], v[:, 0]]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        vecs.append(rng.normal(size=d) + 1j * rng.normal(size=d))
    return [pure_state(v) for v in vecs]


def diamond_lb(L, G) -> float:
    """Half the trace norm of the Choi-state difference: a lower bound on half the diamond norm."""
    L, G = as_channel(L), as_channel(G)
    _same_dim(L, G)
    return 0.5 * linalg.trace_norm_herm(np.asarray(L.choi) - np.asarray(G.choi), tol=1e-9)


# ---------------------------------------------------------------------------
# randomized measurements
# ---------------------------------------------------------------------------

def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValidationError("ensemble weights must be non-negative and sum to 1")
    return w


def randomized_povm(ensemble: Sequence, base: Optional[Povm] = None) -> Povm:
    """Single POVM realizing "draw U_j with probability w_j, rotate, measure ``base``".

    ``ensemble`` is a sequence of ``(weight, unitary)`` pairs.  Effects are
    ``w_j U_j^dagger B_i U_j``, ordered with the ensemble index outermost.
    ``base`` defaults to the computational basis measurement.
    """
    weights = _check_weights([w for w, _ in ensemble])
    Us = [np.asarray(U, dtype=complex) for _, U in ensemble]
    d = Us[0].shape[0]
    if base is None:
        B = np.zeros((d, d, d), dtype=complex)
        B[np.arange(d), np.arange(d), np.arange(d)] = 1.0
    else:
        B = np.asarray(base.effects)
    effects = [w * (U.conj().T @ Bi @ U) for w, U in zip(weights, Us) for Bi in B]
    return Povm(np.stack(effects))


# ---------------------------------------------------------------------------
# side-by-side report
# ---------------------------------------------------------------------------

def compare(a, b, kind: str = "auto", probes: Optional[Sequence] = None,
            max_subsets: int = MAX_SUBSETS) -> DistanceReport:
    """Average-case distance and its worst-case counterpart for a pair of objects."""
    if kind == "auto":
        kind = _infer_kind(a)
    if kind == "state":
        return DistanceReport("state", acd_states(a, b), trace_distance(a, b), False)
    if kind == "povm":
        M, N = as_povm(a), as_povm(b)
        acd = acd_povms(M, N)
        if 2 ** M.n_outcomes <= max_subsets:
            return DistanceReport("povm", acd, op_distance_exact(M, N, max_subsets), False)
        probes = default_probes(M, N) if probes is None else probes
        return DistanceReport("povm", acd, op_distance_probe_lb(M, N, probes), True)
    if kind == "channel":
        return DistanceReport("channel", acd_channels(a, b), diamond_lb(a, b), True)
    raise ValueError(f"unknown object kind {kind!r}")


def _infer_kind(obj) -> str:
    if isinstance(obj, QuantumState):
        return "state"
    if isinstance(obj, Povm):
        return "povm"
    if isinstance(obj, QuantumChannel):
        return "channel"
    arr = np.asarray(obj)
    if arr.ndim == 3:
        return "povm"
    return "state"
