"""Seeded Monte Carlo runs of the TDD transmission loop.

Each trial starts with all M dofs missing. A round sends ``N_i`` coded
packets, charges their energy and airtime plus one ACK and the listening
window, and then updates the state from the ACK. Three receiver models are
available:

``model-faithful``
    A lost ACK wastes the whole round; the state only moves on a delivered ACK.
    This is exactly the Markov chain the analysis solves.
``persistent-dof``
    The receiver keeps what it got even when the ACK is lost; the sender only
    learns about it from a later ACK.
``symbol-level``
    Like ``model-faithful``, but delivered packets carry real random GF(2^g)
    coefficients. The state is ``M - rank``, so non-innovative packets cost
    extra rounds.

Trial ``t`` draws from its own PCG64 stream keyed by ``(seed, t)``. Results
are therefore independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codec import CodedPacket, DecoderState, get_field
from .errors import DomainError
from .markov import CodingParameters, DerivedTiming, LinkParameters, Policy

MODES = ("model-faithful", "persistent-dof", "symbol-level")
Z95 = 1.96


@dataclass(frozen=True)
class SimulationConfig:
    trials: int = 10_000
    seed: int = 0
    mode: str = "model-faithful"
    # symbol-level only; defaults to coding.coeff_bits
    field_bits: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise DomainError(f"trials must be an integer >= 1, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class SimulationResult:
    mean_energy: float
    mean_time: float
    std_energy: float
    std_time: float
    ci95_energy: float
    ci95_time: float
    trials_used: int

    @property
    def se_energy(self) -> float:
        return self.std_energy / math.sqrt(self.trials_used)

    @property
    def se_time(self) -> float:
        return self.std_time / math.sqrt(self.trials_used)

    def agrees_with(self, energy: float, time: float, k: float = 3.0) -> bool:
        """Whether both sample means are within ``k`` standard errors of the given values."""
        # slack for the zero-variance (error-free) case
        tol_e = k * self.se_energy + 1e-12 * abs(energy)
        tol_t = k * self.se_time + 1e-12 * abs(time)
        return abs(self.mean_energy - energy) <= tol_e and abs(self.mean_time - time) <= tol_t


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one trial; ``stream`` separates channel and coefficient draws."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial, stream))))


def _model_faithful(n_per_state, M, p_ok, p_ack_lost, rng):
    i, rounds, packets = M, 0, 0
    while i > 0:
        n = n_per_state[i - 1]
        draws = rng.random(n + 1)
        rounds += 1
        packets += n
        if draws[n] >= p_ack_lost:
            delivered = int(np.count_nonzero(draws[:n] < p_ok))
            i = max(0, i - delivered)
    return rounds, packets


def _persistent(n_per_state, M, p_ok, p_ack_lost, rng):
    believed, missing, rounds, packets = M, M, 0, 0
    while believed > 0:
        n = n_per_state[believed - 1]
        draws = rng.random(n + 1)
        rounds += 1
        packets += n
        missing = max(0, missing - int(np.count_nonzero(draws[:n] < p_ok)))
        if draws[n] >= p_ack_lost:
            believed = missing
    return rounds, packets


def _symbol_level(n_per_state, M, p_ok, p_ack_lost, rng, coef_rng, field):
    decoder = DecoderState(M, 0, field)
    empty = np.zeros(0, dtype=np.int64)
    i, rounds, packets = M, 0, 0
    while i > 0:
        n = n_per_state[i - 1]
        draws = rng.random(n + 1)
        coeffs = coef_rng.integers(0, field.q, size=(n, M))
        rounds += 1
        packets += n
        if draws[n] >= p_ack_lost:
            for k in np.flatnonzero(draws[:n] < p_ok):
                decoder.receive(CodedPacket(coeffs[k], empty))
            i = decoder.missing
    return rounds, packets


def run_trials(
    policy: Policy,
    link: LinkParameters,
    coding: CodingParameters,
    config: SimulationConfig,
) -> SimulationResult:
    policy = Policy.coerce(policy)
    if policy.M != coding.block_size:
        raise DomainError(f"policy covers {policy.M} states but block_size is {coding.block_size}")

    t = DerivedTiming.of(link, coding)
    M = coding.block_size
    n_per_state = policy.n_per_state
    p_ok = 1.0 - link.pkt_erasure
    p_ack_lost = link.ack_erasure
    field = None
    if config.mode == "symbol-level":
        field = get_field(config.field_bits if config.field_bits is not None else coding.coeff_bits)

    rounds = np.empty(config.trials, dtype=np.int64)
    packets = np.empty(config.trials, dtype=np.int64)
    for trial in range(config.trials):
        rng = trial_rng(config.seed, trial)
        if config.mode == "model-faithful":
            r, p = _model_faithful(n_per_state, M, p_ok, p_ack_lost, rng)
        elif config.mode == "persistent-dof":
            r, p = _persistent(n_per_state, M, p_ok, p_ack_lost, rng)
        else:
            coef_rng = trial_rng(config.seed, trial, stream=1)
            r, p = _symbol_level(n_per_state, M, p_ok, p_ack_lost, rng, coef_rng, field)
        rounds[trial] = r
        packets[trial] = p

    # every round costs N*E_p + E_ack and N*T_p + T_w, so totals follow from counts
    energy = packets * t.E_p + rounds * t.E_ack
    time = packets * t.T_p + rounds * t.T_w
    # centring on the first trial keeps identical samples at exactly zero spread
    de, dt = energy - energy[0], time - time[0]
    ddof = 1 if config.trials > 1 else 0
    std_e = float(np.std(de, ddof=ddof))
    std_t = float(np.std(dt, ddof=ddof))
    root = math.sqrt(config.trials)
    return SimulationResult(
        mean_energy=float(energy[0] + np.mean(de)),
        mean_time=float(time[0] + np.mean(dt)),
        std_energy=std_e,
        std_time=std_t,
        ci95_energy=Z95 * std_e / root,
        ci95_time=Z95 * std_t / root,
        trials_used=config.trials,
    )
