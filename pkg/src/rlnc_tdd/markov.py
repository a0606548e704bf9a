"""Link/coding parameter types and the absorbing Markov chain of the TDD protocol.

States count the degrees of freedom (dofs) the receiver still needs, from
``M`` down to the absorbing state ``0``. In state ``i`` the sender transmits
``N_i`` coded packets back-to-back and then waits for an ACK.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

from .errors import DomainError, PolicyInfeasibleError

# min(k, n-k) thresholds for the three log_binomial evaluation paths
_EXACT_MAX_K = 64
_SUM_MAX_K = 20_000


@dataclass(frozen=True)
class LinkParameters:
    """Channel and radio parameters of one TDD link (SI units)."""

    data_rate: float
    propagation_delay: float
    transmit_power: float
    pkt_erasure: float
    ack_erasure: float
    bit_error_rate: Optional[float] = None

    def __post_init__(self):
        if not self.data_rate > 0:
            raise DomainError(f"data_rate must be > 0, got {self.data_rate}")
        if not self.transmit_power > 0:
            raise DomainError(f"transmit_power must be > 0, got {self.transmit_power}")
        if not self.propagation_delay >= 0:
            raise DomainError(f"propagation_delay must be >= 0, got {self.propagation_delay}")
        for name in ("pkt_erasure", "ack_erasure"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise DomainError(f"{name} must lie in [0, 1), got {p}")
        if self.bit_error_rate is not None and not 0.0 <= self.bit_error_rate < 1.0:
            raise DomainError(f"bit_error_rate must lie in [0, 1), got {self.bit_error_rate}")

    def with_erasures(self, pkt_erasure: float, ack_erasure: Optional[float] = None) -> "LinkParameters":
        if ack_erasure is None:
            ack_erasure = self.ack_erasure
        return replace(self, pkt_erasure=pkt_erasure, ack_erasure=ack_erasure)


@dataclass(frozen=True)
class CodingParameters:
    """Block and packet geometry: M source packets of n bits, g-bit coefficients."""

    block_size: int
    payload_bits: int
    header_bits: int
    coeff_bits: int
    ack_bits: int

    def __post_init__(self):
        for name in ("block_size", "payload_bits", "header_bits", "coeff_bits", "ack_bits"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise DomainError(f"{name} must be an integer >= 1, got {v!r}")

    @property
    def packet_bits(self) -> int:
        """Header, payload and M coefficients: ``h + n + g*M``."""
        return self.header_bits + self.payload_bits + self.coeff_bits * self.block_size

    @property
    def field_size(self) -> int:
        return 2 ** self.coeff_bits


@dataclass(frozen=True)
class DerivedTiming:
    """Per-packet durations and energies implied by a link and a coding block.

    ``T_w`` is the listening window after a burst: one round trip plus the ACK
    airtime.
    """

    T_p: float
    T_ack: float
    E_p: float
    E_ack: float
    T_w: float
    T_rt: float

    @classmethod
    def of(cls, link: LinkParameters, coding: CodingParameters) -> "DerivedTiming":
        T_p = coding.packet_bits / link.data_rate
        T_ack = coding.ack_bits / link.data_rate
        T_rt = 2.0 * link.propagation_delay
        return cls(
            T_p=T_p,
            T_ack=T_ack,
            E_p=link.transmit_power * T_p,
            E_ack=link.transmit_power * T_ack,
            T_w=T_rt + T_ack,
            T_rt=T_rt,
        )


@dataclass(frozen=True)
class Policy:
    """Number of coded packets ``N_i`` sent in each state ``i = 1..M``.

    ``n_per_state[i - 1]`` holds ``N_i``. Construction fails when some
    ``N_i < i``: such a state can never make progress.
    """

    n_per_state: tuple = field()

    def __post_init__(self):
        values = tuple(int(v) for v in self.n_per_state)
        if not values:
            raise DomainError("policy must cover at least one state")
        object.__setattr__(self, "n_per_state", values)
        for i, n in enumerate(values, start=1):
            if n < i:
                raise PolicyInfeasibleError(f"N_{i} = {n} < {i}: state {i} cannot reach decoding")

    @property
    def M(self) -> int:
        return len(self.n_per_state)

    def n(self, i: int) -> int:
        """``N_i`` for state ``i`` (1-indexed)."""
        if not 1 <= i <= self.M:
            raise DomainError(f"state {i} outside 1..{self.M}")
        return self.n_per_state[i - 1]

    def __iter__(self):
        return iter(self.n_per_state)

    def __len__(self):
        return self.M

    @classmethod
    def coerce(cls, policy: "Policy | Sequence[int]") -> "Policy":
        return policy if isinstance(policy, cls) else cls(tuple(policy))

    @classmethod
    def minimal(cls, M: int) -> "Policy":
        """The policy ``(1, 2, ..., M)``: exactly the missing dofs each round."""
        return cls(tuple(range(1, M + 1)))


def _check_count(name, v):
    if isinstance(v, bool) or not isinstance(v, int):
        try:
            if float(v) != int(v):
                raise DomainError(f"{name} must be an integer, got {v!r}")
        except (TypeError, ValueError, OverflowError):
            raise DomainError(f"{name} must be an integer, got {v!r}") from None
        v = int(v)
    if v < 0:
        raise DomainError(f"{name} must be non-negative, got {v}")
    return v


@lru_cache(maxsize=65536)
def _log_binomial(n: int, k: int) -> float:
    k = min(k, n - k)
    if k == 0:
        return 0.0
    if k <= _EXACT_MAX_K:
        return math.log(math.comb(n, k))
    if k <= _SUM_MAX_K:
        base = n - k
        return math.fsum(math.log((base + m) / m) for m in range(1, k + 1))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_binomial(n: int, k: int) -> float:
    """Natural log of ``C(n, k)`` without forming the (possibly huge) integer."""
    n = _check_count("n", n)
    k = _check_count("k", k)
    if k > n:
        raise DomainError(f"k = {k} exceeds n = {n}")
    return _log_binomial(n, k)


def log_pow(p: float, k: int) -> float:
    """``k * ln(p)`` with the convention ``0**0 == 1``."""
    if k == 0:
        return 0.0
    if p == 0.0:
        return -math.inf
    return k * math.log(p)


def _check_transition_args(i, j, n_i):
    if i < 1:
        raise DomainError(f"state i must be >= 1, got {i}")
    if j < 0 or j > i:
        raise DomainError(f"next state j must lie in 0..{i}, got {j}")
    if n_i < 1:
        raise DomainError(f"N_i must be >= 1, got {n_i}")


def _stall_prob(n_i: int, link: LinkParameters) -> float:
    # nothing got through, or the ACK was lost
    pa = link.ack_erasure
    return (1.0 - pa) * math.exp(log_pow(link.pkt_erasure, n_i)) + pa


def _progress_prob(i: int, j: int, n_i: int, link: LinkParameters) -> float:
    """Probability of landing in ``1 <= j < i``: exactly ``i - j`` packets delivered."""
    if n_i < i:
        return 0.0
    pe, pa = link.pkt_erasure, link.ack_erasure
    log_p = (
        math.log1p(-pa)
        + _log_binomial(n_i, i - j)
        + log_pow(1.0 - pe, i - j)
        + log_pow(pe, n_i - i + j)
    )
    return math.exp(log_p)


def transition_prob(i: int, j: int, n_i: int, link: LinkParameters) -> float:
    """Probability of moving from state ``i`` to state ``j`` after one round of ``n_i`` packets.

    The decoding transition ``j = 0`` takes the remaining probability mass,
    which covers every outcome with at least ``i`` packets delivered.
    """
    _check_transition_args(i, j, n_i)
    if j == i:
        return _stall_prob(n_i, link)
    if j > 0:
        return _progress_prob(i, j, n_i, link)
    return transition_row(i, n_i, link)[0]


def transition_row(i: int, n_i: int, link: LinkParameters) -> list[float]:
    """Transition probabilities out of state ``i``, ordered by next state ``0..i``."""
    _check_transition_args(i, 0, n_i)
    row = [0.0] * (i + 1)
    row[i] = _stall_prob(n_i, link)
    for j in range(1, i):
        row[j] = _progress_prob(i, j, n_i, link)
    row[0] = max(0.0, 1.0 - math.fsum(row[1:]))
    return row
