"""Ensemble-averaged total-variation distances for the three protocols.

* states:   ``rho -> U rho U^dagger -> computational basis``
* POVMs:    ``psi_0 -> V psi_0 V^dagger -> M``
* channels: ``psi_0 -> V . -> channel -> U . -> computational basis``,
  with ``V`` and ``U`` drawn independently (sample streams 0 and 1).

Per-sample distributions are exact; only the circuit draw is random.  Work
is split over sample indices and the per-index values are concatenated in
index order before reducing, so results do not depend on ``n_jobs``.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from .distances import _check_weights
from .ensembles import CircuitEnsemble
from .exceptions import ShapeError
from .qobjects import apply_channel_matrix, as_channel, as_povm, as_state

N_BINS = 50


@dataclass(frozen=True, eq=False)
class AvgTvdEstimate:
    mean: float
    standard_error: float
    samples: int
    histogram: np.ndarray
    seed: int
    values: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def bin_edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, N_BINS + 1)


def histogram(values) -> np.ndarray:
    counts, _ = np.histogram(np.clip(values, 0.0, 1.0), bins=N_BINS, range=(0.0, 1.0))
    return counts


def summarize(values, seed: int, keep_values: bool = False) -> AvgTvdEstimate:
    values = np.asarray(values, dtype=float)
    n = values.size
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return AvgTvdEstimate(float(values.mean()), se, n, histogram(values), int(seed),
                          values if keep_values else None)


# ---------------------------------------------------------------------------
# per-sample kernels
# ---------------------------------------------------------------------------

def _basis_probs(U, rho):
    return np.einsum("ia,ab,ib->i", U, rho, U.conj()).real


def _tvd(p, q):
    return 0.5 * float(np.sum(np.abs(p - q)))


class _StateTask:
    def __init__(self, rho, sigma):
        self.rho, self.sigma = rho, sigma

    def value(self, ens, i):
        U = ens.sample(i, stream=0)
        return self.value_for(U)

    def value_for(self, U):
        return _tvd(_basis_probs(U, self.rho), _basis_probs(U, self.sigma))


class _PovmTask:
    def __init__(self, EM, EN, psi0):
        self.EM, self.EN, self.psi0 = EM, EN, psi0

    def value(self, ens, i):
        return self.value_for(ens.sample(i, stream=0))

    def value_for(self, V):
        psi = V @ self.psi0
        pm = np.einsum("a,nab,b->n", psi.conj(), self.EM, psi).real
        pn = np.einsum("a,nab,b->n", psi.conj(), self.EN, psi).real
        return _tvd(pm, pn)


class _ChannelTask:
    def __init__(self, L, G, psi0):
        self.L, self.G, self.psi0 = L, G, psi0

    def value(self, ens, i):
        return self.value_for(ens.sample(i, stream=0), ens.sample(i, stream=1))

    def value_for(self, V, U):
        psi = V @ self.psi0
        rho = np.outer(psi, psi.conj())
        a = apply_channel_matrix(self.L, rho)
        b = apply_channel_matrix(self.G, rho)
        return _tvd(_basis_probs(U, a), _basis_probs(U, b))


def _chunk(task, ens, indices):
    return np.array([task.value(ens, i) for i in indices])


def _run(task, ens: CircuitEnsemble, samples: int, n_jobs: int) -> np.ndarray:
    idx = np.arange(samples)
    if n_jobs == 1:
        return _chunk(task, ens, idx)
    parts = np.array_split(idx, max(1, min(samples, 4 * n_jobs)))
    out = Parallel(n_jobs=n_jobs)(delayed(_chunk)(task, ens, p) for p in parts if p.size)
    return np.concatenate(out)


def _prepare(ensemble, dim, samples, seed):
    if samples < 2:
        raise ValueError("need at least two samples")
    if ensemble.dim != dim:
        raise ShapeError(f"ensemble dimension {ensemble.dim} != object dimension {dim}")
    ens = ensemble.with_seed(seed)
    return ens


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def avg_tvd_states(rho, sigma, ensemble: CircuitEnsemble, samples: int,
                   seed: Optional[int] = None, n_jobs: int = 1,
                   keep_values: bool = False) -> AvgTvdEstimate:
    rho, sigma = as_state(rho), as_state(sigma)
    if rho.dim != sigma.dim:
        raise ShapeError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    ens = _prepare(ensemble, rho.dim, samples, seed)
    task = _StateTask(np.asarray(rho.matrix), np.asarray(sigma.matrix))
    return summarize(_run(task, ens, samples, n_jobs), ens.seed, keep_values)


def avg_tvd_povms(M, N, ensemble: CircuitEnsemble, samples: int,
                  seed: Optional[int] = None, n_jobs: int = 1,
                  keep_values: bool = False) -> AvgTvdEstimate:
    M, N = as_povm(M), as_povm(N)
    if M.dim != N.dim or M.n_outcomes != N.n_outcomes:
        raise ShapeError("POVMs differ in dimension or outcome count")
    ens = _prepare(ensemble, M.dim, samples, seed)
    task = _PovmTask(np.asarray(M.effects), np.asarray(N.effects), ens.initial_vector())
    return summarize(_run(task, ens, samples, n_jobs), ens.seed, keep_values)


def avg_tvd_channels(L, G, ensemble: CircuitEnsemble, samples: int,
                     seed: Optional[int] = None, n_jobs: int = 1,
                     keep_values: bool = False) -> AvgTvdEstimate:
    L, G = as_channel(L), as_channel(G)
    if L.dim != G.dim:
        raise ShapeError(f"dimension mismatch {L.dim} vs {G.dim}")
    ens = _prepare(ensemble, L.dim, samples, seed)
    task = _ChannelTask(L, G, ens.initial_vector())
    return summarize(_run(task, ens, samples, n_jobs), ens.seed, keep_values)


def exact_avg_tvd_discrete(a, b, ensemble: CircuitEnsemble, kind: str = "state") -> float:
    """Exact weighted average of the per-circuit TVD over a discrete ensemble.

    For channels both circuits range over the ensemble independently, giving
    a double sum with weights ``w_j w_l``.
    """
    if not ensemble.is_discrete:
        raise ValueError("exact averaging needs a discrete ensemble")
    w = _check_weights(ensemble.weights)
    Us = [np.asarray(U) for _, U in ensemble.elements]
    if kind == "state":
        a, b = as_state(a), as_state(b)
        task = _StateTask(np.asarray(a.matrix), np.asarray(b.matrix))
        return float(sum(wj * task.value_for(U) for wj, U in zip(w, Us)))
    if kind == "povm":
        a, b = as_povm(a), as_povm(b)
        task = _PovmTask(np.asarray(a.effects), np.asarray(b.effects), ensemble.initial_vector())
        return float(sum(wj * task.value_for(V) for wj, V in zip(w, Us)))
    if kind == "channel":
        task = _ChannelTask(as_channel(a), as_channel(b), ensemble.initial_vector())
        return float(sum(wj * wl * task.value_for(V, U)
                         for wj, V in zip(w, Us) for wl, U in zip(w, Us)))
    raise ValueError(f"unknown kind {kind!r}")
