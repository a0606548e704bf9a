"""Random linear network coding over GF(2^g): encoder, rank-tracking decoder, wire format."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ShapeError
from .gf import FieldSpec


@lru_cache(maxsize=None)
def get_field(g: int) -> FieldSpec:
    """Shared field instance with the default reduction polynomial."""
    return FieldSpec(g)


@dataclass
class CodedPacket:
    coefficients: np.ndarray
    payload: np.ndarray

    @property
    def M(self) -> int:
        return len(self.coefficients)


def _as_block(sources) -> np.ndarray:
    rows = [np.asarray(s, dtype=np.int64) for s in sources]
    if not rows:
        raise ShapeError("need at least one source packet")
    length = rows[0].shape
    for k, r in enumerate(rows):
        if r.ndim != 1 or r.shape != length:
            raise ShapeError(f"source {k} has shape {r.shape}, expected {length}")
    return np.stack(rows)


def combine(coefficients, sources, field: FieldSpec) -> np.ndarray:
    """GF sum of ``coefficients[k] * sources[k]``, symbol by symbol."""
    block = _as_block(sources)
    out = np.zeros(block.shape[1], dtype=np.int64)
    for c, src in zip(coefficients, block):
        out ^= field.scale(int(c), src)
    return out


def encode(sources: Sequence[np.ndarray], field: FieldSpec, rng) -> CodedPacket:
    """Draw uniform coefficients from ``rng`` and form the coded payload.

    ``rng`` needs the ``integers(low, high, size)`` method of
    :class:`numpy.random.Generator`.
    """
    block = _as_block(sources)
    coefficients = np.asarray(rng.integers(0, field.q, size=block.shape[0]), dtype=np.int64)
    return CodedPacket(coefficients, combine(coefficients, block, field))


class DecoderState:
    """Reduced row-echelon basis of the coded packets received so far.

    Not thread-safe; one owner mutates it.
    """

    def __init__(self, M: int, payload_len: int, field: FieldSpec):
        self.M = M
        self.payload_len = payload_len
        self.field = field
        self._pivots: list[int] = []
        self._coeffs: list[np.ndarray] = []
        self._payloads: list[np.ndarray] = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def missing(self) -> int:
        """Degrees of freedom still needed to decode."""
        return self.M - self.rank

    @property
    def complete(self) -> bool:
        return self.rank == self.M

    def receive(self, pkt: CodedPacket) -> bool:
        """Eliminate ``pkt`` against the basis; return True if it raised the rank."""
        coeffs = np.asarray(pkt.coefficients, dtype=np.int64)
        payload = np.asarray(pkt.payload, dtype=np.int64)
        if coeffs.shape != (self.M,):
            raise ShapeError(f"expected {self.M} coefficients, got shape {coeffs.shape}")
        if payload.shape != (self.payload_len,):
            raise ShapeError(f"expected payload of {self.payload_len} symbols, got shape {payload.shape}")
        if self.complete:
            return False

        f = self.field
        has_payload = self.payload_len > 0
        c, p = coeffs.copy(), payload.copy()
        for pivot, rc, rp in zip(self._pivots, self._coeffs, self._payloads):
            factor = int(c[pivot])
            if factor:
                c ^= f.scale(factor, rc)
                if has_payload:
                    p ^= f.scale(factor, rp)
        nonzero = np.flatnonzero(c)
        if nonzero.size == 0:
            return False

        pivot = int(nonzero[0])
        inv = f.inv(int(c[pivot]))
        c = f.scale(inv, c)
        if has_payload:
            p = f.scale(inv, p)
        for k, (rc, rp) in enumerate(zip(self._coeffs, self._payloads)):
            factor = int(rc[pivot])
            if factor:
                self._coeffs[k] = rc ^ f.scale(factor, c)
                if has_payload:
                    self._payloads[k] = rp ^ f.scale(factor, p)
        self._pivots.append(pivot)
        self._coeffs.append(c)
        self._payloads.append(p)
        return True

    def decode(self) -> list[np.ndarray]:
        """Source payloads in order; requires full rank."""
        if not self.complete:
            raise ShapeError(f"cannot decode at rank {self.rank} < {self.M}")
        order = np.argsort(self._pivots)
        return [self._payloads[k].copy() for k in order]


def receive(state: DecoderState, pkt: CodedPacket) -> tuple[DecoderState, bool]:
    innovative = state.receive(pkt)
    return state, innovative


def _pack_bits(fields) -> bytes:
    acc, nbits = 0, 0
    for value, width in fields:
        acc = (acc << width) | (int(value) & ((1 << width) - 1))
        nbits += width
    pad = (-nbits) % 8
    return (acc << pad).to_bytes((nbits + pad) // 8, "big")


def pack_packet(pkt: CodedPacket, field: FieldSpec, header_bits: int, header: int = 0) -> bytes:
    """Serialize as header, then M coefficients, then payload symbols.

    Every field is big-endian and bit-packed with no alignment; the stream is
    zero-padded to a whole byte at the end.
    """
    g = field.g
    fields = [(header, header_bits)]
    fields += [(c, g) for c in pkt.coefficients]
    fields += [(s, g) for s in pkt.payload]
    return _pack_bits(fields)


def unpack_packet(data: bytes, field: FieldSpec, M: int, payload_len: int, header_bits: int) -> tuple[int, CodedPacket]:
    """Inverse of :func:`pack_packet`; returns ``(header, packet)``."""
    g = field.g
    nbits = header_bits + g * (M + payload_len)
    if len(data) * 8 < nbits:
        raise ShapeError(f"need {nbits} bits, got {len(data) * 8}")
    acc = int.from_bytes(data, "big") >> (len(data) * 8 - nbits)
    mask = (1 << g) - 1
    symbols = [(acc >> (g * k)) & mask for k in range(M + payload_len)][::-1]
    header = acc >> (g * (M + payload_len))
    pkt = CodedPacket(
        np.array(symbols[:M], dtype=np.int64),
        np.array(symbols[M:], dtype=np.int64),
    )
    return header, pkt


def full_rank_probability(M: int, q: int) -> float:
    """Chance that M uniformly random vectors over GF(q) are independent."""
    prob = 1.0
    for k in range(1, M + 1):
        prob *= 1.0 - float(q) ** -k
    return prob
