"""Dense self-checks of every closed-form value and bound, used by ``qacd verify-examples``."""
from dataclasses import dataclass

import numpy as np

from . import distances as dist
from . import noise
from .ensembles import haar_unitary
from .qobjects import (comp_basis_povm, dephase_povm, depolarizing_channel, identity_channel,
                       maximally_mixed, pauli_product_state, pure_state, trivial_povm,
                       unitary_channel)


@dataclass(frozen=True)
class Check:
    name: str
    computed: float
    expected: float
    tol: float
    relation: str = "=="     # "==", "<=", ">="

    @property
    def deviation(self) -> float:
        """Absolute error for equalities; bound violation (0 if satisfied) for inequalities."""
        if self.relation == "==":
            return abs(self.computed - self.expected)
        if self.relation == "<=":
            return max(self.computed - self.expected, 0.0)
        return max(self.expected - self.computed, 0.0)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.computed)) and self.deviation <= self.tol


def _rng(seed):
    return np.random.default_rng(seed)


def _random_pauli_spec(rng, n, qmin=0.5):
    """Separable Pauli spec whose stabilizer probability on ``axes`` is at least ``qmin``."""
    axes = rng.choice(list("xyz"), size=n)
    rows = []
    for a in axes:
        while True:
            p = rng.dirichlet(np.ones(4))
            if p[0] + p["ixyz".index(a)] >= qmin:
                rows.append(p)
                break
    return noise.PauliChannelSpec(np.array(rows)), list(axes)


def pure_vs_mixed_checks(seed=1):
    rng = _rng(seed)
    out = []
    for n in range(1, 7):
        d = 2 ** n
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        out.append(Check(f"pure state vs maximally mixed, d={d}",
                         dist.acd_states(pure_state(v), maximally_mixed(n)),
                         0.5 * np.sqrt(1 - 1 / d), 1e-10))
    return out


def unitary_vs_depolarizing_checks(seed=2, n_max=4):
    rng = _rng(seed)
    out = []
    for n in range(1, n_max + 1):
        d = 2 ** n
        out.append(Check(f"unitary channel vs depolarizing, d={d}",
                         dist.acd_channels(unitary_channel(haar_unitary(d, rng)),
                                           depolarizing_channel(d)),
                         0.5 * np.sqrt(1 - 1 / d ** 2), 1e-10))
    return out


def pauli_insertion_checks(n_max=4):
    out = []
    for n in range(1, n_max + 1):
        ident = identity_channel(2 ** n)
        worst = 0.0
        for q in range(n):
            for s in "xyz":
                val = dist.acd_channels(noise.single_pauli_insertion_channel(n, q, s), ident)
                worst = max(worst, abs(val - noise.SINGLE_PAULI_INSERTION_ACD))
        out.append(Check(f"single Pauli insertion vs identity, N={n} (worst over qubit, Pauli)",
                         noise.SINGLE_PAULI_INSERTION_ACD + worst,
                         noise.SINGLE_PAULI_INSERTION_ACD, 1e-12))
    return out


def pauli_state_checks(seed=3, trials=20):
    rng = _rng(seed)
    worst_u = worst_i = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        spec, axes = _random_pauli_spec(rng, n)
        signs = list(rng.choice(list("+-"), size=n))
        rho = noise.noisy_pauli_state(spec, axes, signs)
        to_u, to_i = noise.pauli_noise_state_distances(spec, axes)
        worst_u = max(worst_u, abs(to_u - dist.acd_states(rho, maximally_mixed(n))))
        worst_i = max(worst_i, abs(to_i - dist.acd_states(rho, pauli_product_state(axes, signs))))
    return [Check("noisy Pauli state to uniform: closed form vs dense (max error)", worst_u, 0.0, 1e-9),
            Check("noisy Pauli state to ideal: closed form vs dense (max error)", worst_i, 0.0, 1e-9)]


def pauli_state_bound_checks(seed=4, trials=300):
    rng = _rng(seed)
    slack_up, slack_lo = np.inf, np.inf
    for _ in range(trials):
        n = int(rng.integers(2, 9))
        spec, axes = _random_pauli_spec(rng, n)
        agg = noise.pauli_aggregates(spec, axes)
        to_u, to_i = noise.pauli_noise_state_distances(spec, axes)
        slack_up = min(slack_up, noise.upper_bound_to_uniform(agg.f_av, n) - to_u)
        if agg.q_av <= 0.5 ** (1 / n):
            slack_lo = min(slack_lo, to_i - noise.lower_bound_to_ideal(agg.q_av, n))
    return [Check("noisy Pauli state: distance to uniform <= 0.5 exp(-f_av N) (min slack)",
                  -slack_up, 0.0, 0.0, "<="),
            Check("noisy Pauli state: distance to ideal >= 0.5 sqrt(1 - 2 q_av^N) (min slack)",
                  slack_lo, 0.0, 0.0, ">=")]


def readout_checks(seed=5, trials=20):
    rng = _rng(seed)
    worst_h = worst_s = 0.0
    chain = np.inf
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        a, b = rng.uniform(0.5, 1.0, size=2)
        M = noise.build_readout_povm(noise.ReadoutSpec.homogeneous(a, b, n))
        P = comp_basis_povm(n)
        worst_h = max(worst_h, abs(noise.homogeneous_acd_m(a, b, n, "ideal") - dist.acd_povms(M, P)),
                      abs(noise.homogeneous_acd_m(a, b, n, "trivial")
                          - dist.acd_povms(M, trivial_povm(2 ** n, 2 ** n))))
        p = rng.uniform(0.5, 1.0, size=n)
        S = noise.ReadoutSpec(p, p)
        to_t, to_i = noise.symmetric_readout_distances(S)
        MS = noise.build_readout_povm(S)
        worst_s = max(worst_s, abs(to_t - dist.acd_povms(MS, trivial_povm(2 ** n, 2 ** n))),
                      abs(to_i - dist.acd_povms(MS, P)))
        pairs = [noise.random_readout_effects(rng, (0.5, 1.0), (0.5, 1.0), coherence=1.0)
                 for _ in range(n)]
        Mg = noise.product_povm(pairs)
        Md = dephase_povm(Mg)
        Msym = noise.build_readout_povm(noise.symmetrize_readout(noise.readout_spec_from_effects(pairs)))
        d0, d1, d2 = dist.acd_povms(Mg, P), dist.acd_povms(Md, P), dist.acd_povms(Msym, P)
        chain = min(chain, d0 - d1, d1 - d2)
    return [Check("identical readout noise: binomial evaluator vs dense (max error)", worst_h, 0.0, 1e-10),
            Check("symmetric readout: closed form vs dense (max error)", worst_s, 0.0, 1e-10),
            Check("readout noise: dephasing then symmetrizing never increases distance to ideal",
                  chain, 0.0, 1e-12, ">=")]


def pauli_channel_checks(seed=6, trials=30):
    rng = _rng(seed)
    worst = 0.0
    slack_up = slack_lo = np.inf
    for _ in range(trials):
        n = int(rng.integers(1, 4))
        spec = noise.PauliChannelSpec(rng.dirichlet(np.ones(4) * rng.uniform(0.2, 3), size=n))
        L = noise.build_pauli_channel(spec)
        d = 2 ** n
        to_dep, to_id = noise.pauli_channel_distances(spec)
        dense_dep = dist.acd_channels(L, depolarizing_channel(d))
        dense_id = dist.acd_channels(L, identity_channel(d))
        worst = max(worst, abs(to_dep - dense_dep), abs(to_id - dense_id))
        agg = noise.pauli_aggregates(spec)
        up = 0.5 * np.exp(-(1 - agg.p2_av) * n / 2)
        slack_up = min(slack_up, up - dense_dep)
        if agg.p1_av <= 0.5 ** (1 / n):
            slack_lo = min(slack_lo, dense_id - noise.lower_bound_to_ideal(agg.p1_av, n))
    return [Check("separable Pauli channel: closed forms vs dense (max error)", worst, 0.0, 1e-10),
            Check("Pauli channel: distance to depolarizing <= 0.5 exp(-(1 - p2_av) N / 2) (min slack)",
                  -slack_up, 0.0, 0.0, "<="),
            Check("Pauli channel: distance to identity >= 0.5 sqrt(1 - 2 p1_av^N) (min slack)",
                  slack_lo, 0.0, 0.0, ">=")]


def worst_case_checks():
    P, T = comp_basis_povm(1), trivial_povm(2, 2)
    ket0 = pauli_product_state("z", "+")
    return [
        Check("operational distance, basis vs trivial POVM on one qubit",
              dist.op_distance_exact(P, T), 0.5, 1e-12),
        Check("basis vs trivial POVM average-case distance on one qubit",
              dist.acd_povms(P, T), np.sqrt(2) / 4, 1e-12),
        Check("trace distance |0><0| vs I/2", dist.trace_distance(ket0, maximally_mixed(1)), 0.5, 1e-12),
        Check("Choi lower bound, identity vs depolarizing on one qubit",
              dist.diamond_lb(identity_channel(2), depolarizing_channel(2)), 0.75, 1e-12),
        Check("success probability at distance 0.1486", dist.success_probability(0.1486), 0.5743, 1e-12),
    ]


def all_checks() -> list:
    return (pure_vs_mixed_checks() + unitary_vs_depolarizing_checks() + pauli_insertion_checks()
            + pauli_state_checks() + pauli_state_bound_checks() + readout_checks()
            + pauli_channel_checks() + worst_case_checks())
