"""scikit-learn style wrappers around the distance and Monte-Carlo routines.

``fit(X, Y)`` takes the two quantum objects being compared (states, POVMs or
channels, or raw arrays that coerce to them) and stores results in
trailing-underscore attributes.
"""
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import distances, montecarlo
from .ensembles import make_ensemble
from .qobjects import as_channel, as_povm, as_state, n_qubits_for

_KINDS = ("auto", "state", "povm", "channel")


def _coerce_pair(X, Y, kind):
    if kind == "auto":
        kind = distances._infer_kind(X)
    if kind == "state":
        return kind, as_state(X), as_state(Y)
    if kind == "povm":
        return kind, as_povm(X), as_povm(Y)
    if kind == "channel":
        return kind, as_channel(X), as_channel(Y)
    raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")


class AverageCaseDistance(BaseEstimator):
    """Average-case distance of two objects next to its worst-case counterpart.

    After ``fit``: ``acd_``, ``worst_case_``, ``worst_case_is_lower_bound_``,
    ``ratio_`` and ``kind_``.
    """

    def __init__(self, kind: str = "auto", max_subsets: int = distances.MAX_SUBSETS):
        self.kind = kind
        self.max_subsets = max_subsets

    def fit(self, X, Y):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        kind, a, b = _coerce_pair(X, Y, self.kind)
        rep = distances.compare(a, b, kind=kind, max_subsets=self.max_subsets)
        self.kind_ = kind
        self.acd_ = rep.acd
        self.worst_case_ = rep.worst_case
        self.worst_case_is_lower_bound_ = rep.worst_case_is_lower_bound
        self.ratio_ = rep.ratio
        self.report_ = rep
        return self

    def score(self, X=None, Y=None):
        """The fitted average-case distance (arguments are ignored)."""
        check_is_fitted(self, "acd_")
        return self.acd_


class MonteCarloTVD(BaseEstimator):
    """Mean total-variation distance over a random-circuit ensemble.

    ``ensemble`` is one of ``haar``, ``brickwork``, ``qaoa``, ``vqe``,
    ``vqe-y``.  ``n_layers=None`` uses the ensemble's default depth.
    """

    def __init__(self, ensemble: str = "haar", n_layers: Optional[int] = None,
                 n_samples: int = 1000, random_state: int = 0, sat_seed: int = 0,
                 n_jobs: int = 1, kind: str = "auto"):
        self.ensemble = ensemble
        self.n_layers = n_layers
        self.n_samples = n_samples
        self.random_state = random_state
        self.sat_seed = sat_seed
        self.n_jobs = n_jobs
        self.kind = kind

    def fit(self, X, Y):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if int(self.n_samples) < 2:
            raise ValueError("n_samples must be at least 2")
        kind, a, b = _coerce_pair(X, Y, self.kind)
        n = n_qubits_for(a.dim)
        ens = make_ensemble(self.ensemble, n, self.n_layers, int(self.random_state), self.sat_seed)
        run = {"state": montecarlo.avg_tvd_states, "povm": montecarlo.avg_tvd_povms,
               "channel": montecarlo.avg_tvd_channels}[kind]
        est = run(a, b, ens, int(self.n_samples), n_jobs=self.n_jobs)
        self.kind_ = kind
        self.estimate_ = est
        self.mean_ = est.mean
        self.standard_error_ = est.standard_error
        self.histogram_ = np.asarray(est.histogram)
        return self

    def score(self, X=None, Y=None):
        check_is_fitted(self, "mean_")
        return self.mean_
