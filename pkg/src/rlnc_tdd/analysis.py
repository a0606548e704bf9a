"""Mean energy and completion time of a TDD policy, and the full-duplex baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import DomainError, PolicyInfeasibleError
from .markov import CodingParameters, DerivedTiming, LinkParameters, Policy, _log_binomial, log_pow


@dataclass(frozen=True)
class PerformanceReport:
    per_state_energy: tuple
    per_state_time: tuple
    total_energy: float
    total_time: float
    energy_per_bit: float


def round_energy(timing: DerivedTiming) -> Callable[[int], float]:
    """Energy of one round: ``N`` coded packets plus one ACK."""
    return lambda n: n * timing.E_p + timing.E_ack


def round_time(timing: DerivedTiming) -> Callable[[int], float]:
    """Duration of one round: ``N`` packet slots plus the listening window."""
    return lambda n: n * timing.T_p + timing.T_w


def state_cost(i: int, n_i: int, lower: Sequence[float], link: LinkParameters, cost: float) -> float:
    """Mean cost to absorption from state ``i`` when ``n_i`` packets are sent per round.

    ``lower[j - 1]`` must hold the mean cost from state ``j`` for ``j < i``.
    ``cost`` is the cost of a single round. Rounds that end in state ``i``
    again (nothing delivered, or ACK lost) are summed out in closed form.
    """
    if n_i < i:
        raise PolicyInfeasibleError(f"N_{i} = {n_i} < {i}")
    pe, pa = link.pkt_erasure, link.ack_erasure
    # 1 - Pe^N without cancellation
    p_some = -math.expm1(log_pow(pe, n_i)) if pe > 0 else 1.0
    head = cost / ((1.0 - pa) * p_some)
    if i == 1 or pe == 0.0:
        return head

    log_ok = math.log1p(-pe)
    log_pe = math.log(pe)
    logs = []
    for j in range(1, i):
        e_j = lower[j - 1]
        if e_j <= 0.0:
            continue
        logs.append(
            _log_binomial(n_i, i - j) + (i - j) * log_ok + (n_i - i + j) * log_pe + math.log(e_j)
        )
    if not logs:
        return head
    top = max(logs)
    if top == -math.inf:
        return head
    tail = math.exp(top) * math.fsum(math.exp(v - top) for v in logs)
    return head + tail / p_some


def _absorption_costs(policy, link: LinkParameters, round_cost: Callable[[int], float]) -> list[float]:
    policy = Policy.coerce(policy)
    costs: list[float] = []
    for i, n_i in enumerate(policy, start=1):
        costs.append(state_cost(i, n_i, costs, link, round_cost(n_i)))
    return costs


def expected_energy(policy: Policy | Sequence[int], link: LinkParameters, coding: CodingParameters) -> list[float]:
    """Mean energy ``[E_1, ..., E_M]`` to finish the block from each state."""
    policy = Policy.coerce(policy)
    _check_block(policy, coding)
    return _absorption_costs(policy, link, round_energy(DerivedTiming.of(link, coding)))


def expected_time(policy: Policy | Sequence[int], link: LinkParameters, coding: CodingParameters) -> list[float]:
    """Mean completion time ``[T_1, ..., T_M]`` from each state."""
    policy = Policy.coerce(policy)
    _check_block(policy, coding)
    return _absorption_costs(policy, link, round_time(DerivedTiming.of(link, coding)))


def _check_block(policy: Policy, coding: CodingParameters):
    if policy.M != coding.block_size:
        raise DomainError(f"policy covers {policy.M} states but block_size is {coding.block_size}")


def evaluate(policy: Policy | Sequence[int], link: LinkParameters, coding: CodingParameters) -> PerformanceReport:
    energy = expected_energy(policy, link, coding)
    time = expected_time(policy, link, coding)
    return PerformanceReport(
        per_state_energy=tuple(energy),
        per_state_time=tuple(time),
        total_energy=energy[-1],
        total_time=time[-1],
        energy_per_bit=energy[-1] / (coding.block_size * coding.payload_bits),
    )


def full_duplex_energy(link: LinkParameters, coding: CodingParameters, block_size: Optional[int] = None) -> float:
    """Mean energy of full-duplex streaming until the decoding ACK arrives.

    The sender keeps streaming for a round trip after the last needed packet,
    and the receiver streams ACKs back-to-back for half a round trip.
    """
    t = DerivedTiming.of(link, coding)
    M = coding.block_size if block_size is None else block_size
    return (
        t.T_rt * t.E_p / t.T_p
        + t.T_rt * t.E_ack / (2.0 * t.T_ack)
        + M * t.E_p / (1.0 - link.pkt_erasure)
        + t.E_ack / (1.0 - link.ack_erasure)
    )


def full_duplex_time(link: LinkParameters, coding: CodingParameters, block_size: Optional[int] = None) -> float:
    """Mean full-duplex completion time: streaming, one round trip, ACK delivery."""
    t = DerivedTiming.of(link, coding)
    M = coding.block_size if block_size is None else block_size
    return M * t.T_p / (1.0 - link.pkt_erasure) + t.T_rt + t.T_ack / (1.0 - link.ack_erasure)


def erasures_from_ber(ber: float, coding: CodingParameters) -> tuple[float, float]:
    """Packet and ACK erasure probabilities under i.i.d. bit errors.

    Any bit error erases the whole packet.
    """
    if not 0.0 <= ber < 1.0:
        raise DomainError(f"bit error rate must lie in [0, 1), got {ber}")
    if ber == 0.0:
        return 0.0, 0.0
    log_ok = math.log1p(-ber)
    return -math.expm1(coding.packet_bits * log_ok), -math.expm1(coding.ack_bits * log_ok)
