"""Convolution over Z4^m and the fast Cut&Count join built on it.

Tables are dense sequences of length 4^m; index ``sum(d_i * 4**i)`` holds the
value at the digit vector ``(d_0, ..., d_{m-1})``.

The fast path cannot divide by 4^m inside GF(2^p), so every field element is
lifted to an integer polynomial (its bits become 0/1 coefficients), the
transform runs over Gaussian-integer polynomials, and only the final result
is reduced mod 2 and mod Q.  A lifted polynomial is packed into one Python
int with fixed-width signed slots (Kronecker substitution), which turns
polynomial addition and multiplication into single big-int operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from gmpy2 import mpz

from .cutcount import CCTable, DEG, _purge
from .gf2p import GF64, FieldSpec, mul


class InexactDivision(ArithmeticError):
    pass


@dataclass
class Z4Table:
    m: int
    values: list

    def __post_init__(self):
        if len(self.values) != 4 ** self.m:
            raise ValueError(f"Z4 table of dimension {self.m} needs {4 ** self.m} values")


def digits(index: int, m: int) -> list[int]:
    return [(index >> (2 * i)) & 3 for i in range(m)]


def add_index(a: int, b: int, m: int) -> int:
    out = 0
    for i in range(m):
        out |= ((((a >> 2 * i) & 3) + ((b >> 2 * i) & 3)) & 3) << (2 * i)
    return out


def naive_z4_convolution(f: Z4Table, g: Z4Table, add: Callable, mul: Callable, zero=0) -> Z4Table:
    """The defining double sum (f*g)(x) = sum_y f(y) g(x - y)."""
    if f.m != g.m:
        raise ValueError("dimension mismatch")
    m = f.m
    out = [zero] * (4 ** m)
    gnz = [(j, v) for j, v in enumerate(g.values) if v != zero]
    for i, fv in enumerate(f.values):
        if fv == zero:
            continue
        for j, gv in gnz:
            x = add_index(i, j, m)
            out[x] = add(out[x], mul(fv, gv))
    return Z4Table(m, out)


# --- packed Gaussian-integer polynomials ------------------------------------------------


class _Packing:
    def __init__(self, p: int, m: int, zslots: int):
        # Only the final packed values are decoded.  They equal 4^m times the
        # integer convolution, whose coefficients sum at most p products of
        # 0/1 values for each of the 4^m shifts (the z degree is fixed by the
        # slot), so p * 4^(2m) bounds every decoded coefficient.  Intermediate
        # values may overflow slots freely: packing is linear and exact.
        self.bound = p * 4 ** (2 * m)
        self.cap_bits = self.bound.bit_length()
        self.K = self.cap_bits + 2
        self.p = p
        self.poly_slots = 2 * p
        self.zslots = zslots

    def lift(self, value: int, zdeg: int = 0):
        out = mpz(0)
        base = zdeg * self.poly_slots
        i = 0
        while value:
            if value & 1:
                out = out.bit_set(self.K * (base + i))
            value >>= 1
            i += 1
        return out

    def block(self, x: int, start: int, count: int) -> list[int]:
        """Signed coefficients of slots ``start .. start+count-1`` of ``x``."""
        K = self.K
        if start:
            shift = K * start
            low = x & ((1 << shift) - 1)
            if low >> (shift - 1):
                low -= 1 << shift
            x = (x - low) >> shift
        total = K * count
        bits = mpz(x & ((1 << total) - 1)).digits(2).zfill(total)
        half = 1 << (K - 1)
        full = 1 << K
        out = []
        carry = 0
        for i in range(count):
            r = int(bits[total - K * (i + 1): total - K * i], 2) + carry
            if r >= half:
                r -= full
                carry = 1
            else:
                carry = 0
            out.append(r)
        return out


def _dft4(re: np.ndarray, im: np.ndarray, axis: int, inverse: bool):
    r0, r1, r2, r3 = (np.take(re, k, axis=axis) for k in range(4))
    s0, s1, s2, s3 = (np.take(im, k, axis=axis) for k in range(4))
    e_r, e_s = r0 + r2, s0 + s2
    d_r, d_s = r0 - r2, s0 - s2
    o_r, o_s = r1 + r3, s1 + s3
    q_r, q_s = r1 - r3, s1 - s3
    # omega = i for the forward transform, -i for the inverse
    if inverse:
        q_r, q_s = -q_r, -q_s
    out_r = [e_r + o_r, d_r - q_s, e_r - o_r, d_r + q_s]
    out_s = [e_s + o_s, d_s + q_r, e_s - o_s, d_s - q_r]
    return (np.stack(out_r, axis=axis, dtype=object),
            np.stack(out_s, axis=axis, dtype=object))


def _transform(re: np.ndarray, im: np.ndarray, m: int, inverse: bool = False):
    for axis in range(m):
        re, im = _dft4(re, im, axis, inverse)
    return re, im


def _as_grid(values: Sequence[int], m: int) -> np.ndarray:
    # axis j carries digit m-1-j; all axes get the same transform, so order is irrelevant
    arr = np.empty(len(values), dtype=object)
    arr[:] = list(values)
    return arr.reshape((4,) * m) if m else arr.reshape(())


def _lifted_product(fa: list, fb: list, m: int):
    """Transform both packed tables, multiply pointwise, transform back."""
    zeros = np.full((4,) * m, mpz(0), dtype=object)
    ar, ai = _transform(_as_grid(fa, m), zeros.copy(), m)
    br, bi = _transform(_as_grid(fb, m), zeros.copy(), m)
    rr = ar * br
    ii = ai * bi
    pr = rr - ii
    pi = (ar + ai) * (br + bi) - rr - ii
    re, im = _transform(pr, pi, m, inverse=True)
    return np.asarray(re, dtype=object), np.asarray(im, dtype=object)


def _lower(re: int, im: int, pk: _Packing, scale: int, zdeg: int,
           spec: FieldSpec, stats: Optional[dict]) -> int:
    """Exact division by ``scale`` of one z-block, then reduction mod 2 and mod Q."""
    if im:
        raise InexactDivision("imaginary part survived the inverse transform")
    if re.bit_length() > pk.K * pk.poly_slots * pk.zslots:
        raise OverflowError("packed value exceeds slot range")
    coeffs = pk.block(re, zdeg * pk.poly_slots, pk.poly_slots)
    top = max(map(abs, coeffs)).bit_length()
    value = 0
    for i, c in enumerate(coeffs):
        if c % scale:
            raise InexactDivision(f"coefficient {c} not divisible by {scale}")
        if (c // scale) & 1:
            value |= 1 << i
    if top > pk.cap_bits:
        raise OverflowError(f"coefficient of {top} bits exceeds cap {pk.cap_bits}")
    if stats is not None:
        stats["max_coeff_bits"] = max(stats.get("max_coeff_bits", 0), top)
    return spec.reduce(value)


def fast_z4_convolution(f: Z4Table, g: Z4Table, spec: FieldSpec = GF64,
                        stats: Optional[dict] = None) -> Z4Table:
    if f.m != g.m:
        raise ValueError("dimension mismatch")
    m = f.m
    pk = _Packing(spec.p, m, 1)
    fa = [pk.lift(v) for v in f.values]
    fb = [pk.lift(v) for v in g.values]
    re, im = _lifted_product(fa, fb, m)
    scale = 4 ** m
    out = [_lower(r, i, pk, scale, 0, spec, stats)
           for r, i in zip(re.reshape(-1).tolist(), im.reshape(-1).tolist())]
    return Z4Table(m, out)


def _index(state: tuple) -> int:
    return sum(d << (2 * i) for i, d in enumerate(state))


def cc_join_fast(ta: CCTable, tb: CCTable, spec: FieldSpec = GF64,
                 stats: Optional[dict] = None) -> CCTable:
    """Cut&Count join through one Z4^m convolution.

    Digit-wise addition mod 4 maps every valid pair of vertex states to the
    right combined state; the invalid pairs (opposite sides, or degree 2
    meeting a non-zero degree) all lose degree in the sum.  Tracking the total
    degree of both sides with an extra packed variable z therefore separates
    them: an output state of degree D keeps only the z^D coefficient.
    """
    if ta.bag != tb.bag:
        raise ValueError("join children must share the bag")
    m = len(ta.bag)
    if not ta.values or not tb.values:
        return CCTable(ta.bag, {})
    if m == 0:
        return CCTable((), _purge({(): mul(ta.values[()], tb.values[()], spec)}))
    zslots = 4 * m + 1
    pk = _Packing(spec.p, m, zslots)
    size = 4 ** m
    fa = [mpz(0)] * size
    fb = [mpz(0)] * size
    for s, v in ta.values.items():
        fa[_index(s)] = pk.lift(v, sum(DEG[d] for d in s))
    for s, v in tb.values.items():
        fb[_index(s)] = pk.lift(v, sum(DEG[d] for d in s))
    re, im = _lifted_product(fa, fb, m)
    re = re.reshape(-1).tolist()
    im = im.reshape(-1).tolist()
    scale = 4 ** m
    out = {}
    for idx in range(size):
        if not re[idx] and not im[idx]:
            continue
        ds = [(idx >> (2 * i)) & 3 for i in range(m)]
        val = _lower(re[idx], im[idx], pk, scale, sum(DEG[d] for d in ds), spec, stats)
        if val:
            out[tuple(ds)] = val
    return CCTable(ta.bag, out)
