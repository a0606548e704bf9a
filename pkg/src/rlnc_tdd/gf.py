"""Arithmetic in GF(2^g) using log/antilog tables."""

from __future__ import annotations

import numpy as np

from .errors import DomainError

SUPPORTED_BITS = (1, 2, 4, 8, 10, 16)

# fixed reduction polynomials so coded packets are bit-for-bit reproducible
DEFAULT_POLYNOMIALS = {
    1: 0b11,
    2: 0b111,
    4: 0b10011,
    8: 0x11B,
    10: 0x409,
    16: 0x1100B,
}


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mod(a: int, m: int) -> int:
    dm = poly_degree(m)
    while a and poly_degree(a) >= dm:
        a ^= m << (poly_degree(a) - dm)
    return a


def is_irreducible(p: int) -> bool:
    """Trial division by every polynomial of degree 1..deg(p)//2 over GF(2)."""
    d = poly_degree(p)
    if d < 1:
        return False
    for divisor in range(2, 1 << (d // 2 + 1)):
        if poly_mod(p, divisor) == 0:
            return False
    return True


def carryless_mul(a: int, b: int, poly: int, g: int) -> int:
    """Shift-and-add product of ``a`` and ``b`` reduced modulo ``poly``."""
    result = 0
    top = 1 << g
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return result


class FieldSpec:
    """GF(2^g) with a fixed reduction polynomial.

    Multiplication goes through log/antilog tables built from a generator of
    the multiplicative group. The polynomial need not be primitive (0x11B is
    not); the generator is found by search.
    """

    def __init__(self, g: int, reduction_polynomial: int | None = None):
        if g not in SUPPORTED_BITS:
            raise DomainError(f"g must be one of {SUPPORTED_BITS}, got {g}")
        poly = DEFAULT_POLYNOMIALS[g] if reduction_polynomial is None else int(reduction_polynomial)
        if poly_degree(poly) != g:
            raise DomainError(f"reduction polynomial {poly:#x} does not have degree {g}")
        if not is_irreducible(poly):
            raise DomainError(f"reduction polynomial {poly:#x} is reducible")
        self.g = g
        self.q = 1 << g
        self.reduction_polynomial = poly
        self._build_tables()

    def _build_tables(self):
        q, g, poly = self.q, self.g, self.reduction_polynomial
        order = q - 1
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        for gen in range(2 if q > 2 else 1, q):
            x = 1
            seen = 0
            ok = True
            for k in range(order):
                exp[k] = x
                if k and x == 1:
                    ok = False
                    break
                log[x] = k
                seen += 1
                x = carryless_mul(x, gen, poly, g)
            if ok and seen == order:
                self.generator = gen
                break
        exp[order:] = exp[:order]
        # log(0) points into an all-zero tail, so exp[log[a] + log[b]] is 0 when either is 0
        zero_log = 2 * order
        exp = np.concatenate([exp, np.zeros(2 * zero_log + 1 - 2 * order, dtype=np.int64)])
        log[0] = zero_log
        self.exp = exp
        self.log = log
        self._exp_list = exp.tolist()
        self._log_list = log.tolist()

    def __repr__(self):
        return f"FieldSpec(g={self.g}, reduction_polynomial={self.reduction_polynomial:#x})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.g, self.reduction_polynomial) == (
            other.g,
            other.reduction_polynomial,
        )

    def __hash__(self):
        return hash((self.g, self.reduction_polynomial))

    def mul(self, a: int, b: int) -> int:
        return self._exp_list[self._log_list[a] + self._log_list[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^g)")
        return self._exp_list[(self.q - 1 - self._log_list[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def scale(self, c: int, v: np.ndarray) -> np.ndarray:
        """Multiply every symbol of ``v`` by the scalar ``c``."""
        if c == 0:
            return np.zeros_like(v)
        return self.exp[self.log[v] + self._log_list[c]]


def field_add(a, b):
    return a ^ b


def field_mul(a: int, b: int, field: FieldSpec) -> int:
    if not (0 <= a < field.q and 0 <= b < field.q):
        raise DomainError(f"symbols must lie in [0, {field.q}), got {a}, {b}")
    return field.mul(a, b)
