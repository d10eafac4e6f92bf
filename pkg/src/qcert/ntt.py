"""Exact truncated convolution of residue arrays.

Two routes are provided:

* :func:`schoolbook` -- the direct O(L^2) Cauchy product, one shifted
  row at a time.  Used for short inputs and as the reference route.
* :func:`ntt_convolve` -- number-theoretic transforms over a handful of
  word-size primes ``p = c * 2^k + 1`` (k >= 25), recombined with Garner's
  algorithm and reduced to the target modulus.

No-overflow bound
-----------------
Inputs are residues in ``[0, m)``.  A coefficient of the truncated product of
length ``L`` is a sum of at most ``L`` products, so its exact integer value is
at most ``L * (m - 1)**2``.  :func:`primes_for` picks primes until their
product exceeds that bound, so the CRT reconstruction is the exact integer
and no wraparound can reach the result.  Every prime is below ``2**31``,
hence any product of two residues is below ``2**62`` and fits in ``uint64``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

# (prime, primitive root); all satisfy 2**25 | p - 1 and p < 2**31.
NTT_PRIMES: tuple[tuple[int, int], ...] = (
    (2113929217, 5),
    (2013265921, 31),
    (1811939329, 13),
    (1711276033, 29),
    (1107296257, 10),
    (469762049, 3),
    (167772161, 3),
)
MAX_TRANSFORM_LOG2 = 25
MAX_TRANSFORM = 1 << MAX_TRANSFORM_LOG2

_U64 = np.uint64


def primes_for(length: int, modulus: int) -> tuple[tuple[int, int], ...]:
    """Smallest prefix of NTT_PRIMES whose product exceeds ``length * (modulus-1)**2``."""
    bound = max(1, length) * (modulus - 1) ** 2
    chosen = []
    prod = 1
    for p, g in NTT_PRIMES:
        chosen.append((p, g))
        prod *= p
        if prod > bound:
            return tuple(chosen)
    raise OverflowError(f"convolution bound {bound} exceeds the CRT range")


@lru_cache(maxsize=32)
def _twiddles(p: int, g: int, n: int, inverse: bool) -> np.ndarray:
    root = pow(g, (p - 1) // n, p)
    if inverse:
        root = pow(root, p - 2, p)
    half = max(1, n // 2)
    tw = np.empty(half, dtype=_U64)
    tw[0] = 1
    k = 1
    while k < half:
        tw[k : 2 * k] = tw[:k] * _U64(pow(root, k, p)) % _U64(p)
        k *= 2
    tw.setflags(write=False)
    return tw


# Conditional subtraction below relies on uint64 wraparound: for s < 2p,
# min(s, s - p) is s - p when s >= p and s otherwise.


def _forward(a: np.ndarray, p: int, g: int) -> None:
    # Decimation in frequency: natural order in, bit-reversed order out.
    n = a.size
    tw = _twiddles(p, g, n, False)
    pp = _U64(p)
    h = n // 2
    while h >= 1:
        blk = a.reshape(-1, 2, h)
        u = blk[:, 0, :].copy()
        v = blk[:, 1, :]
        s = u + v
        np.minimum(s, s - pp, out=s)
        u += pp
        u -= v
        u *= tw[:: n // (2 * h)]
        u %= pp
        blk[:, 0, :] = s
        blk[:, 1, :] = u
        h //= 2


def _inverse(a: np.ndarray, p: int, g: int) -> None:
    # Decimation in time: bit-reversed order in, natural order out.
    n = a.size
    tw = _twiddles(p, g, n, True)
    pp = _U64(p)
    h = 1
    while h < n:
        blk = a.reshape(-1, 2, h)
        u = blk[:, 0, :].copy()
        v = blk[:, 1, :] * tw[:: n // (2 * h)]
        v %= pp
        s = u + v
        np.minimum(s, s - pp, out=s)
        u += pp
        u -= v
        np.minimum(u, u - pp, out=u)
        blk[:, 0, :] = s
        blk[:, 1, :] = u
        h *= 2
    a *= _U64(pow(n, p - 2, p))
    a %= pp


def _cyclic_mod_prime(x: np.ndarray, y: np.ndarray | None, n: int, length: int, p: int, g: int) -> np.ndarray:
    pp = _U64(p)
    fx = np.zeros(n, dtype=_U64)
    fx[: x.size] = x % pp
    _forward(fx, p, g)
    if y is None:
        fx *= fx
    else:
        fy = np.zeros(n, dtype=_U64)
        fy[: y.size] = y % pp
        _forward(fy, p, g)
        fx *= fy
        del fy
    fx %= pp
    _inverse(fx, p, g)
    return fx[:length].copy()


def _mulmod_u64(x: np.ndarray, c: int, m: int) -> np.ndarray:
    # x < 2**31 elementwise and c < m < 2**32, so x * c < 2**63.
    return x * _U64(c) % _U64(m)


def _garner(residues: list[np.ndarray], primes: list[int], modulus: int) -> np.ndarray:
    """Reconstruct the exact integers from residues and reduce them mod ``modulus``."""
    k = len(primes)
    digits: list[np.ndarray] = []
    for i in range(k):
        p = primes[i]
        pp = _U64(p)
        t = residues[i].copy()
        for j in range(i):
            t += pp - digits[j] % pp
            t *= _U64(pow(primes[j], -1, p))
            t %= pp
        digits.append(t)
    # Mixed-radix value: sum_i digit_i * prod_{j<i} p_j, reduced mod m.
    if modulus < (1 << 32):
        m = _U64(modulus)
        out = digits[0] % m
        radix = 1
        for i in range(1, k):
            radix *= primes[i - 1]
            out += _mulmod_u64(digits[i], radix % modulus, modulus)
            out %= m
        return out
    out_obj = digits[0].astype(object)
    radix = 1
    for i in range(1, k):
        radix *= primes[i - 1]
        out_obj = out_obj + digits[i].astype(object) * (radix % modulus)
    out_obj = out_obj % modulus
    return np.array([int(v) for v in out_obj], dtype=_U64)


def ntt_convolve(x: np.ndarray, y: np.ndarray | None, length: int, modulus: int) -> np.ndarray:
    """First ``length`` coefficients of ``x * y`` mod ``modulus`` (``y=None`` squares ``x``)."""
    x = x[:length]
    ys = x if y is None else y[:length]
    if x.size == 0 or ys.size == 0:
        return np.zeros(length, dtype=_U64)
    full = x.size + ys.size - 1
    n = 1 << max(1, math.ceil(math.log2(full)))
    if n > MAX_TRANSFORM:
        raise OverflowError(f"transform length {n} exceeds 2**{MAX_TRANSFORM_LOG2}")
    out_len = min(length, full)
    primes = primes_for(min(x.size, ys.size), modulus)
    residues = [
        _cyclic_mod_prime(x, None if y is None else ys, n, out_len, p, g) for p, g in primes
    ]
    res = _garner(residues, [p for p, _ in primes], modulus)
    out = np.zeros(length, dtype=_U64)
    out[:out_len] = res
    return out


def schoolbook(x: np.ndarray, y: np.ndarray, length: int, modulus: int) -> np.ndarray:
    """Direct Cauchy product mod ``modulus``, truncated to ``length``."""
    x = x[:length]
    y = y[:length]
    if modulus < (1 << 31):
        m = _U64(modulus)
        acc = np.zeros(length, dtype=_U64)
        for i in np.flatnonzero(x):
            span = min(y.size, length - i)
            if span <= 0:
                continue
            acc[i : i + span] += x[i] * y[:span]
            acc[i : i + span] %= m
        return acc
    acc_obj = np.zeros(length, dtype=object)
    xo = x.astype(object)
    yo = y.astype(object)
    for i in np.flatnonzero(x):
        span = min(y.size, length - i)
        if span <= 0:
            continue
        acc_obj[i : i + span] = (acc_obj[i : i + span] + xo[i] * yo[:span]) % modulus
    return np.array([int(v) for v in acc_obj], dtype=_U64)
