"""Average-case distances between quantum states, measurements and channels."""
from .distances import (DistanceReport, acd_channels, acd_povms, acd_states, compare,
                        diamond_lb, op_distance_exact, op_distance_probe_lb,
                        randomized_povm, trace_distance, tvd)
from .ensembles import CircuitEnsemble, frame_potential, make_ensemble
from .estimators import AverageCaseDistance, MonteCarloTVD
from .exceptions import QacdError
from .montecarlo import (AvgTvdEstimate, avg_tvd_channels, avg_tvd_povms, avg_tvd_states,
                         exact_avg_tvd_discrete)
from .qobjects import Povm, QuantumChannel, QuantumState

__version__ = "0.1.0"

__all__ = [
    "AverageCaseDistance", "AvgTvdEstimate", "CircuitEnsemble", "MonteCarloTVD", "DistanceReport", "Povm", "QacdError",
    "QuantumChannel", "QuantumState", "acd_channels", "acd_povms", "acd_states",
    "avg_tvd_channels", "avg_tvd_povms", "avg_tvd_states", "compare", "diamond_lb",
    "exact_avg_tvd_discrete", "frame_potential", "make_ensemble", "op_distance_exact",
    "op_distance_probe_lb", "randomized_povm", "trace_distance", "tvd",
]
