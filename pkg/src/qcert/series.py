"""Truncated power series with coefficients in Z/mZ.

A :class:`ModSeries` knows its coefficients for exponents ``0 .. L-1``.
Binary operations truncate to the shorter operand and never invent
coefficients beyond what both inputs determine.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

import numpy as np

from . import ntt
from .errors import CacheCorruption, ModulusMismatch, NotAUnit, TruncationError

MAX_MODULUS = 2**63 - 1
# Below this truncation length the direct product beats the transforms.
SCHOOLBOOK_CUTOFF = 64

_U64 = np.uint64


class ProgressionSelector(NamedTuple):
    """The arithmetic progression ``n = r (mod t)``."""

    t: int
    r: int

    def validate(self) -> "ProgressionSelector":
        if self.t < 1 or not 0 <= self.r < self.t:
            raise ValueError(f"invalid selector: need 0 <= r < t, got t={self.t}, r={self.r}")
        return self


class InfiniteWithinTruncation(NamedTuple):
    """Sentinel order: every known coefficient vanishes."""

    length: int


@dataclass(frozen=True, eq=False)
class ModSeries:
    modulus: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 2 <= self.modulus <= MAX_MODULUS:
            raise ValueError(f"modulus must be in [2, 2**63-1], got {self.modulus}")
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("a series needs at least one coefficient")
        if self.coeffs.dtype != _U64:
            raise TypeError("coefficients must be stored as uint64 residues")
        self.coeffs.setflags(write=False)

    @property
    def length(self) -> int:
        return int(self.coeffs.size)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, n: int) -> int:
        return int(self.coeffs[n])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModSeries):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.length == other.length
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        head = ", ".join(str(int(c)) for c in self.coeffs[:8])
        more = ", ..." if self.length > 8 else ""
        return f"ModSeries(m={self.modulus}, L={self.length}, [{head}{more}])"

    def __add__(self, other: "ModSeries") -> "ModSeries":
        return add(self, other)

    def __sub__(self, other: "ModSeries") -> "ModSeries":
        return add(self, negate(other))

    def __mul__(self, other: "ModSeries") -> "ModSeries":
        return mul(self, other)

    def __pow__(self, e: int) -> "ModSeries":
        return power(self, e)

    def tolist(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    def truncate(self, length: int) -> "ModSeries":
        if not 1 <= length <= self.length:
            raise TruncationError(f"cannot truncate length {self.length} to {length}")
        return ModSeries(self.modulus, self.coeffs[:length].copy())

    def reduce(self, modulus: int) -> "ModSeries":
        """Reinterpret the coefficients modulo a divisor of the current modulus."""
        if self.modulus % modulus:
            raise ModulusMismatch(f"{modulus} does not divide {self.modulus}")
        return ModSeries(modulus, self.coeffs % _U64(modulus))


def _residues(values: Iterable[int], modulus: int) -> np.ndarray:
    return np.array([v % modulus for v in values], dtype=_U64)


def from_coefficients(modulus: int, values: Iterable[int]) -> ModSeries:
    """Series whose coefficient list is ``values`` (integers of any sign)."""
    return ModSeries(modulus, _residues(values, modulus))


def zeros(modulus: int, length: int) -> ModSeries:
    if length < 1:
        raise ValueError("length must be at least 1")
    return ModSeries(modulus, np.zeros(length, dtype=_U64))


def one(modulus: int, length: int) -> ModSeries:
    return make_series(modulus, length, [(0, 1)])


def make_series(modulus: int, length: int, entries: Iterable[tuple[int, int]]) -> ModSeries:
    """Sparse constructor; duplicate exponents accumulate mod ``modulus``."""
    if modulus < 2:
        raise ValueError(f"modulus must be at least 2, got {modulus}")
    if length < 1:
        raise ValueError("length must be at least 1")
    acc: dict[int, int] = {}
    for e, c in entries:
        if not 0 <= e < length:
            raise IndexError(f"exponent {e} outside [0, {length})")
        acc[e] = (acc.get(e, 0) + c) % modulus
    coeffs = np.zeros(length, dtype=_U64)
    for e, c in acc.items():
        coeffs[e] = c
    return ModSeries(modulus, coeffs)


def _check_pair(a: ModSeries, b: ModSeries) -> int:
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"moduli differ: {a.modulus} vs {b.modulus}")
    return min(a.length, b.length)


def add(a: ModSeries, b: ModSeries) -> ModSeries:
    n = _check_pair(a, b)
    m = _U64(a.modulus)
    # a, b < m <= 2**63 - 1, so the sum fits in uint64.
    s = a.coeffs[:n] + b.coeffs[:n]
    np.minimum(s, s - m, out=s)
    return ModSeries(a.modulus, s)


def negate(a: ModSeries) -> ModSeries:
    m = _U64(a.modulus)
    return ModSeries(a.modulus, (m - a.coeffs) % m)


def scale(a: ModSeries, c: int) -> ModSeries:
    m = a.modulus
    c %= m
    if m < (1 << 32):
        return ModSeries(m, a.coeffs * _U64(c) % _U64(m))
    return ModSeries(m, _residues((int(x) * c for x in a.coeffs), m))


def _mul_arrays(x: np.ndarray, y: np.ndarray | None, length: int, modulus: int, method: str) -> np.ndarray:
    if method == "auto":
        method = "schoolbook" if length <= SCHOOLBOOK_CUTOFF else "ntt"
    if method == "schoolbook":
        return ntt.schoolbook(x, x if y is None else y, length, modulus)
    if method == "ntt":
        return ntt.ntt_convolve(x, y, length, modulus)
    raise ValueError(f"unknown multiplication method {method!r}")


def mul(a: ModSeries, b: ModSeries, method: str = "auto") -> ModSeries:
    """Cauchy product truncated to the shorter length.

    ``method`` is ``"auto"``, ``"schoolbook"`` or ``"ntt"``; all three return
    identical coefficients.
    """
    n = _check_pair(a, b)
    y = None if a is b else b.coeffs
    return ModSeries(a.modulus, _mul_arrays(a.coeffs, y, n, a.modulus, method))


def _unit_inverse(c: int, modulus: int) -> int:
    if math.gcd(c, modulus) != 1:
        raise NotAUnit(f"constant term {c} is not a unit mod {modulus}")
    return pow(c, -1, modulus)


def invert(a: ModSeries, method: str = "auto") -> ModSeries:
    """Multiplicative inverse by Newton iteration, doubling the precision each step."""
    m = a.modulus
    L = a.length
    g = np.zeros(L, dtype=_U64)
    g[0] = _unit_inverse(int(a.coeffs[0]), m)
    mm = _U64(m)
    k = 1
    while k < L:
        k2 = min(2 * k, L)
        # g is correct mod q^k, so a*g = 1 + q^k * err (mod q^k2).
        prod = _mul_arrays(a.coeffs[:k2], g[:k], k2, m, method)
        err = prod[k:k2]
        corr = _mul_arrays(g[: k2 - k], err, k2 - k, m, method)
        g[k:k2] = (mm - corr) % mm
        k = k2
    return ModSeries(m, g)


def power(a: ModSeries, e: int, method: str = "auto") -> ModSeries:
    """``a**e`` by repeated squaring; negative ``e`` inverts ``a**(-e)``."""
    if e < 0:
        return invert(power(a, -e, method), method)
    result: ModSeries | None = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else mul(result, base, method)
        e >>= 1
        if e:
            base = mul(base, base, method)
    return one(a.modulus, a.length) if result is None else result


def shift(a: ModSeries, s: int) -> ModSeries:
    """Multiply by ``q**s`` keeping the length; terms past the window are dropped."""
    if s < 0:
        raise ValueError("shift amount must be nonnegative")
    out = np.zeros(a.length, dtype=_U64)
    if s < a.length:
        out[s:] = a.coeffs[: a.length - s]
    return ModSeries(a.modulus, out)


def sieve(a: ModSeries, sel: ProgressionSelector | tuple[int, int]) -> ModSeries:
    """Keep the coefficients at exponents ``r (mod t)`` in place, zero the rest."""
    t, r = ProgressionSelector(*sel).validate()
    out = np.zeros(a.length, dtype=_U64)
    out[r::t] = a.coeffs[r::t]
    return ModSeries(a.modulus, out)


def u_operator(a: ModSeries, t: int) -> ModSeries:
    """``sum a(t n) q^n``; the result has ``ceil(L / t)`` coefficients."""
    if t < 1:
        raise ValueError("U-operator step must be positive")
    return ModSeries(a.modulus, a.coeffs[::t].copy())


def ord_mod(a: ModSeries, l: int) -> Union[int, InfiniteWithinTruncation]:
    """Smallest exponent whose coefficient is nonzero mod ``l``."""
    if l < 2 or a.modulus % l:
        raise ModulusMismatch(f"order mod {l} is undefined for coefficients mod {a.modulus}")
    hits = np.flatnonzero(a.coeffs % _U64(l))
    if hits.size == 0:
        return InfiniteWithinTruncation(a.length)
    return int(hits[0])


# Binary dump ---------------------------------------------------------------

MAGIC = b"QSER1"
_HEADER = struct.Struct("<5sQQB")


def coefficient_width(modulus: int) -> int:
    return max(1, math.ceil((modulus - 1).bit_length() / 8))


def dumps(a: ModSeries) -> bytes:
    """Serialize as QSER1: magic, u64 modulus, u64 length, u8 width, packed coefficients."""
    w = coefficient_width(a.modulus)
    raw = a.coeffs.astype("<u8").view(np.uint8).reshape(-1, 8)[:, :w]
    return _HEADER.pack(MAGIC, a.modulus, a.length, w) + raw.tobytes()


def loads(data: bytes) -> ModSeries:
    if len(data) < _HEADER.size:
        raise CacheCorruption("truncated QSER1 header")
    magic, modulus, length, w = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheCorruption(f"bad magic {magic!r}")
    if w != coefficient_width(modulus):
        raise CacheCorruption(f"width {w} does not match modulus {modulus}")
    body = data[_HEADER.size :]
    if len(body) != length * w:
        raise CacheCorruption(f"expected {length * w} payload bytes, found {len(body)}")
    packed = np.frombuffer(body, dtype=np.uint8).reshape(length, w)
    full = np.zeros((length, 8), dtype=np.uint8)
    full[:, :w] = packed
    coeffs = full.view("<u8").reshape(length).astype(_U64)
    if length and int(coeffs.max()) >= modulus:
        raise CacheCorruption("coefficient out of range for declared modulus")
    return ModSeries(int(modulus), coeffs)
