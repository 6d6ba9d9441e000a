"""Scaling and histogram experiments comparing distances with Monte-Carlo averages.

Four scenarios, each comparing a noisy object with a reference:

* ``states-ideal``    noisy Pauli product state vs the ideal one
* ``states-uniform``  noisy Pauli product state vs the maximally mixed state
* ``povms-ideal``     separable noisy detector vs the computational basis
* ``channels-ideal``  separable small rotations vs the identity channel

Noise parameters are drawn once per config for ``n_max`` qubits; an
``N``-qubit point uses the first ``N`` of them.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import distances, montecarlo
from .ensembles import make_ensemble
from .io import ExperimentConfig, load_calibration
from .noise import (PauliChannelSpec, coherent_rotation_channel, noisy_pauli_state,
                    product_povm, random_readout_effects)
from .qobjects import (QuantumState, comp_basis_povm, identity_channel, maximally_mixed,
                       pauli_product_state)

NOISE_STREAM = 7919


@dataclass(frozen=True, eq=False)
class NoiseDraw:
    pauli_probs: np.ndarray      # (n_max, 4)
    axes: tuple
    signs: tuple
    readout: tuple               # per-qubit (E0, E1)
    rot_axes: tuple
    rot_angles: np.ndarray

    def summary(self) -> dict:
        return {
            "pauli_probs": np.round(self.pauli_probs, 12).tolist(),
            "axes": "".join(self.axes),
            "signs": "".join(self.signs),
            "readout_p00": [round(float(E0[0, 0].real), 12) for E0, _ in self.readout],
            "readout_p11": [round(float(E1[1, 1].real), 12) for _, E1 in self.readout],
            "rot_axes": "".join(self.rot_axes),
            "rot_angles_over_pi": np.round(self.rot_angles / np.pi, 12).tolist(),
        }


def draw_noise(cfg: ExperimentConfig) -> NoiseDraw:
    n = cfg.n_max
    nc = cfg.noise
    rng = np.random.default_rng(np.random.SeedSequence(nc.seed, spawn_key=(NOISE_STREAM,)))
    axes = tuple(rng.choice(list("xyz"), size=n))
    signs = tuple(rng.choice(list("+-"), size=n))
    if nc.enabled:
        errs = rng.uniform(*nc.error_range, size=(n, 3))
    else:
        errs = np.zeros((n, 3))
    probs = np.column_stack([1 - errs.sum(axis=1), errs])
    if nc.calibration is not None:
        cal = load_calibration(nc.calibration)
        if cal.n_qubits < n:
            raise ValueError(f"calibration covers {cal.n_qubits} qubits, config needs {n}")
        readout = cal.effects[:n]
    elif nc.enabled:
        readout = tuple(random_readout_effects(rng) for _ in range(n))
    else:
        readout = tuple((np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex))
                        for _ in range(n))
    rot_axes = tuple(rng.choice(list("xyz"), size=n))
    if nc.enabled:
        rot_angles = np.pi * rng.uniform(*nc.angle_range, size=n)
    else:
        rot_angles = np.zeros(n)
    return NoiseDraw(probs, axes, signs, readout, rot_axes, rot_angles)


def scenario_objects(scenario: str, n: int, noise: NoiseDraw):
    """``(kind, noisy, reference)`` for an ``n``-qubit point."""
    if scenario in ("states-ideal", "states-uniform"):
        spec = PauliChannelSpec(noise.pauli_probs[:n])
        rho = QuantumState(noisy_pauli_state(spec, noise.axes[:n], noise.signs[:n]))
        if scenario == "states-ideal":
            return "state", rho, pauli_product_state(noise.axes[:n], noise.signs[:n])
        return "state", rho, maximally_mixed(n)
    if scenario == "povms-ideal":
        return "povm", product_povm(noise.readout[:n]), comp_basis_povm(n)
    if scenario == "channels-ideal":
        return ("channel", coherent_rotation_channel(noise.rot_axes[:n], noise.rot_angles[:n]),
                identity_channel(2 ** n))
    raise ValueError(f"unknown scenario {scenario!r}")


_MC = {"state": montecarlo.avg_tvd_states, "povm": montecarlo.avg_tvd_povms,
       "channel": montecarlo.avg_tvd_channels}


def run_point(kind, a, b, ensemble_name: str, n: int, cfg: ExperimentConfig,
              report: Optional[distances.DistanceReport] = None, keep_values: bool = False):
    """One record: closed-form distances and the Monte-Carlo mean for one ensemble."""
    if report is None:
        report = distances.compare(a, b, kind=kind)
    ens = make_ensemble(ensemble_name, n, cfg.layers, cfg.seed, cfg.sat_seed)
    est = _MC[kind](a, b, ens, cfg.samples, n_jobs=cfg.n_jobs, keep_values=keep_values)
    rec = {"N": n, "d": 2 ** n, "kind": ensemble_name, "acd": report.acd,
           "wc": report.worst_case, "wc_is_lb": report.worst_case_is_lower_bound,
           "mc_mean": est.mean, "mc_se": est.standard_error, "samples": est.samples}
    return rec, est


def run_scaling(cfg: ExperimentConfig, noise: Optional[NoiseDraw] = None):
    """Records for every ``N`` in range and every ensemble, plus per-point estimates."""
    noise = draw_noise(cfg) if noise is None else noise
    records, estimates = [], []
    for n in cfg.n_values:
        kind, a, b = scenario_objects(cfg.scenario, n, noise)
        report = distances.compare(a, b, kind=kind)
        for name in cfg.ensembles:
            rec, est = run_point(kind, a, b, name, n, cfg, report)
            records.append(rec)
            estimates.append(est)
    return records, estimates, noise
