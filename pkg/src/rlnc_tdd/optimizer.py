"""Optimal packets-per-round policies for minimum energy (TDD-E) or time (TDD-T).

The cost from state ``i`` only depends on the policy in states ``1..i``, and
it grows with every lower-state cost. Minimizing state by state, from 1 up to
M, therefore gives the joint optimum with M one-dimensional searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .analysis import round_energy, round_time, state_cost
from .errors import DomainError, UnboundedSearchError
from .lambertw import lambert_w_minus1
from .markov import CodingParameters, DerivedTiming, LinkParameters, Policy

MAX_SEARCH_BOUND = 2**20
# costs closer than this (relative) count as a tie and keep the smaller N
TIE_RTOL = 1e-13

OBJECTIVES = ("energy", "time")


@dataclass(frozen=True)
class OptimizationResult:
    policy: Policy
    objective_per_state: tuple
    objective: float
    search_bound_hit: tuple
    kind: str = "energy"

    @property
    def monotone(self) -> bool:
        """True when ``N_i`` never decreases with ``i``."""
        n = self.policy.n_per_state
        return all(a <= b for a, b in zip(n, n[1:]))


def initial_bound(i: int, pkt_erasure: float) -> int:
    return max(4 * math.ceil(i / (1.0 - pkt_erasure)), i + 64)


def _search_state(i, lower, link, round_cost: Callable[[int], float]):
    best_n, best = None, math.inf

    def scan(start, stop):
        nonlocal best_n, best
        for n in range(start, stop + 1):
            c = state_cost(i, n, lower, link, round_cost(n))
            if c < best * (1.0 - TIE_RTOL):
                best_n, best = n, c

    hi = initial_bound(i, link.pkt_erasure)
    scan(i, hi)
    hit = False
    while best_n == hi:
        hit = True
        if hi >= MAX_SEARCH_BOUND:
            raise UnboundedSearchError(
                f"state {i}: optimum still at the search bound {hi}; parameters look pathological"
            )
        new_hi = min(2 * hi, MAX_SEARCH_BOUND)
        scan(hi + 1, new_hi)
        hi = new_hi
    return best_n, best, hit


def _optimize(link, coding, round_cost, kind) -> OptimizationResult:
    lower: list[float] = []
    ns, hits = [], []
    for i in range(1, coding.block_size + 1):
        n, c, hit = _search_state(i, lower, link, round_cost)
        ns.append(n)
        lower.append(c)
        hits.append(hit)
    return OptimizationResult(
        policy=Policy(tuple(ns)),
        objective_per_state=tuple(lower),
        objective=lower[-1],
        search_bound_hit=tuple(hits),
        kind=kind,
    )


def optimize_energy(link: LinkParameters, coding: CodingParameters) -> OptimizationResult:
    """Policy minimizing the mean energy to deliver the block (TDD-E)."""
    return _optimize(link, coding, round_energy(DerivedTiming.of(link, coding)), "energy")


def optimize_time(link: LinkParameters, coding: CodingParameters) -> OptimizationResult:
    """Policy minimizing the mean completion time (TDD-T)."""
    return _optimize(link, coding, round_time(DerivedTiming.of(link, coding)), "time")


def optimize(link: LinkParameters, coding: CodingParameters, objective: str) -> OptimizationResult:
    if objective == "energy":
        return optimize_energy(link, coding)
    if objective == "time":
        return optimize_time(link, coding)
    raise DomainError(f"objective must be one of {OBJECTIVES}, got {objective!r}")


def n1_closed_form(link: LinkParameters, coding: CodingParameters) -> float:
    """Continuous minimizer of the single-dof energy over ``N_1``.

    Can fall below 1 (it is exactly 0 when ACKs cost nothing); see
    :func:`clamp_n1`.
    """
    pe = link.pkt_erasure
    if not 0.0 < pe < 1.0:
        raise DomainError(f"closed form needs 0 < pkt_erasure < 1, got {pe}")
    t = DerivedTiming.of(link, coding)
    return n1_from_ratio(pe, t.E_ack / t.E_p)


def n1_from_ratio(pe: float, ack_ratio: float) -> float:
    """Same as :func:`n1_closed_form` with ``E_ack / E_p`` given directly."""
    if not 0.0 < pe < 1.0:
        raise DomainError(f"closed form needs 0 < pkt_erasure < 1, got {pe}")
    if ack_ratio < 0.0:
        raise DomainError(f"E_ack / E_p must be >= 0, got {ack_ratio}")
    log_pe = math.log(pe)
    w = lambert_w_minus1(-math.exp(-1.0 + log_pe * ack_ratio))
    return (1.0 + w) / log_pe - ack_ratio


def clamp_n1(n1: float) -> tuple[float, bool]:
    """Clamp a continuous ``N_1`` into the feasible range ``N_1 >= 1``.

    Returns the clamped value and whether clamping happened.
    """
    if n1 < 1.0:
        return 1.0, True
    return n1, False
