"""Arithmetic in GF(2^p), elements stored as ints (bit i = coefficient of x^i)."""

from __future__ import annotations

import random
from dataclasses import dataclass, field


def clmul_portable(a: int, b: int) -> int:
    """Carry-less product, one shift-xor step per bit of ``b``."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def clmul_windowed(a: int, b: int) -> int:
    """Carry-less product using a 16-entry table of multiples of ``a``.

    Python cannot issue a hardware carry-less multiply, so this 4-bit
    windowed method is the accelerated path; it must agree bit for bit with
    :func:`clmul_portable`.
    """
    if a == 0 or b == 0:
        return 0
    a2 = a << 1
    a4 = a << 2
    a8 = a << 3
    table = (0, a, a2, a2 ^ a, a4, a4 ^ a, a4 ^ a2, a4 ^ a2 ^ a,
             a8, a8 ^ a, a8 ^ a2, a8 ^ a2 ^ a, a8 ^ a4, a8 ^ a4 ^ a, a8 ^ a4 ^ a2,
             a8 ^ a4 ^ a2 ^ a)
    out = 0
    shift = 0
    while b:
        out ^= table[b & 15] << shift
        b >>= 4
        shift += 4
    return out


def poly_mod(a: int, q: int) -> int:
    """Remainder of ``a`` modulo ``q`` over F2 (long division)."""
    dq = q.bit_length() - 1
    while a.bit_length() - 1 >= dq:
        a ^= q << (a.bit_length() - 1 - dq)
    return a


def is_irreducible(q: int) -> bool:
    """Trial division by every polynomial of degree at most deg(q)/2."""
    d = q.bit_length() - 1
    if d < 1:
        return False
    for cand in range(2, 1 << (d // 2 + 1)):
        if poly_mod(q, cand) == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int
    q_bits: int  # modulus including the x^p term
    fast: bool = True
    low: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.q_bits.bit_length() - 1 != self.p:
            raise ValueError("modulus degree does not match p")
        if self.p <= 16 and not is_irreducible(self.q_bits):
            raise ValueError(f"modulus {self.q_bits:#x} is reducible")
        object.__setattr__(self, "low", self.q_bits ^ (1 << self.p))

    @property
    def order(self) -> int:
        return 1 << self.p

    def reduce(self, a: int) -> int:
        p = self.p
        mask = (1 << p) - 1
        low = self.low
        clm = clmul_windowed if self.fast else clmul_portable
        # fold the high part down; each fold shrinks it by p - deg(low) bits
        while a >> p:
            a = (a & mask) ^ clm(a >> p, low)
        return a

    def with_path(self, fast: bool) -> "FieldSpec":
        return FieldSpec(self.p, self.q_bits, fast)


# x^64 + x^4 + x^3 + x + 1
GF64 = FieldSpec(64, (1 << 64) | 0x1B)
# x^8 + x^4 + x^3 + x + 1
GF8 = FieldSpec(8, 0x11B)
# x^16 + x^5 + x^3 + x + 1
GF16 = FieldSpec(16, (1 << 16) | 0x2B)


def add(a: int, b: int) -> int:
    return a ^ b


def mul(a: int, b: int, spec: FieldSpec = GF64) -> int:
    if spec.fast:
        return spec.reduce(clmul_windowed(a, b))
    return spec.reduce(clmul_portable(a, b))


def mul_reference(a: int, b: int, spec: FieldSpec) -> int:
    """Schoolbook shift-xor-reduce: multiply by x one step at a time."""
    out = 0
    top = 1 << spec.p
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= spec.q_bits
    return out


def power(a: int, e: int, spec: FieldSpec = GF64) -> int:
    if e < 0:
        raise ValueError("negative exponent")
    result = 1
    base = a
    while e:
        if e & 1:
            result = mul(result, base, spec)
        base = mul(base, base, spec)
        e >>= 1
    return result


def inv(a: int, spec: FieldSpec = GF64) -> int:
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return power(a, spec.order - 2, spec)


def random_elem(rng: random.Random, spec: FieldSpec = GF64) -> int:
    return rng.getrandbits(spec.p)
