"""Eta-quotients: sparse expansions, modularity conditions and cusp orders.

An eta-quotient ``prod_{delta | N} eta(delta z)^{r_delta}`` has the q-expansion
``q^e * prod_delta prod_n (1 - q^{delta n})^{r_delta}`` with
``e = sum(delta r_delta) / 24``.  Everything here that gates a mathematical
claim (weights, the four level conditions, cusp orders) is exact rational
arithmetic.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import PrefactorError, QuotientParseError
from .series import ModSeries, invert, mul, power


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (levels are small)."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True, init=False)
class EtaQuotient:
    level: int
    exponents: tuple[tuple[int, int], ...]

    def __init__(self, level: int, exponents: Mapping[int, int] | Iterable[tuple[int, int]]):
        items = dict(exponents).items()
        if level < 1:
            raise ValueError(f"level must be positive, got {level}")
        cleaned = tuple(sorted((int(d), int(r)) for d, r in items if r != 0))
        for d, _ in cleaned:
            if d < 1 or level % d:
                raise ValueError(f"{d} does not divide the level {level}")
        if not cleaned:
            raise ValueError("an eta-quotient needs at least one nonzero exponent")
        object.__setattr__(self, "level", int(level))
        object.__setattr__(self, "exponents", cleaned)

    def r(self, delta: int) -> int:
        return dict(self.exponents).get(delta, 0)

    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        level = math.lcm(self.level, other.level)
        total = Counter(dict(self.exponents))
        total.update(dict(other.exponents))
        return EtaQuotient(level, dict(total))

    def __str__(self) -> str:
        return f"{self.level} : " + " * ".join(f"{d}^{r}" for d, r in self.exponents)

    @property
    def sum_delta_r(self) -> int:
        return sum(d * r for d, r in self.exponents)

    @property
    def sum_n_over_delta_r(self) -> int:
        return sum((self.level // d) * r for d, r in self.exponents)

    @property
    def prefactor_exponent(self) -> int | None:
        s = self.sum_delta_r
        return s // 24 if s % 24 == 0 else None


_FACTOR = re.compile(r"^(\d+)(?:\^([+-]?\d+))?$")


def parse_quotient(text: str) -> EtaQuotient:
    """Parse ``"N : d1^r1 * d2^r2 * ..."`` (whitespace-insensitive)."""
    compact = re.sub(r"\s+", "", text)
    if compact.count(":") != 1:
        raise QuotientParseError(f"expected 'N : factors', got {text!r}")
    head, body = compact.split(":")
    if not head.isdigit():
        raise QuotientParseError(f"bad level {head!r}")
    exps: Counter[int] = Counter()
    for part in body.split("*"):
        mt = _FACTOR.match(part)
        if not mt:
            raise QuotientParseError(f"bad factor {part!r} in {text!r}")
        exps[int(mt.group(1))] += int(mt.group(2) or 1)
    try:
        return EtaQuotient(int(head), dict(exps))
    except ValueError as exc:
        raise QuotientParseError(str(exc)) from exc


# Sparse expansions -----------------------------------------------------------


def pentagonal_series(scale: int, modulus: int, length: int) -> ModSeries:
    """``prod_{n>=1} (1 - q^{scale n})`` from Euler's pentagonal number theorem."""
    if scale < 1:
        raise ValueError("scale must be positive")
    coeffs = np.zeros(length, dtype=np.uint64)
    neg = modulus - 1
    coeffs[0] = 1
    k = 1
    while True:
        lo = scale * k * (3 * k - 1) // 2
        if lo >= length:
            break
        c = 1 if k % 2 == 0 else neg
        coeffs[lo] = c
        hi = scale * k * (3 * k + 1) // 2
        if hi < length:
            coeffs[hi] = c
        k += 1
    return ModSeries(modulus, coeffs)


def jacobi_cube_series(scale: int, modulus: int, length: int) -> ModSeries:
    """``prod_{n>=1} (1 - q^{scale n})^3 = sum_k (-1)^k (2k+1) q^{scale k(k+1)/2}``."""
    if scale < 1:
        raise ValueError("scale must be positive")
    coeffs = np.zeros(length, dtype=np.uint64)
    k = 0
    while (e := scale * k * (k + 1) // 2) < length:
        coeffs[e] = ((-1) ** k * (2 * k + 1)) % modulus
        k += 1
    return ModSeries(modulus, coeffs)


def euler_power(scale: int, r: int, modulus: int, length: int) -> ModSeries:
    """``prod (1 - q^{scale n})^r`` for any integer ``r``."""
    base = pentagonal_series(scale, modulus, length)
    if r >= 0:
        return power(base, r)
    return invert(power(base, -r))


def expand(eq: EtaQuotient, modulus: int, length: int) -> ModSeries:
    """q-expansion of ``eq`` with coefficients mod ``modulus`` on exponents ``< length``."""
    e = eq.prefactor_exponent
    if e is None:
        raise PrefactorError(
            f"prefactor exponent {eq.sum_delta_r}/24 is not integral for {eq}"
        )
    if e >= length:
        raise PrefactorError(f"prefactor q^{e} lies beyond the window of length {length}")
    if e < 0:
        raise PrefactorError(f"negative prefactor q^{e} needs Laurent series")
    inner = length - e
    acc: ModSeries | None = None
    for delta, r in eq.exponents:
        factor = euler_power(delta, r, modulus, inner)
        acc = factor if acc is None else mul(acc, factor)
    assert acc is not None
    out = np.zeros(length, dtype=np.uint64)
    out[e:] = acc.coeffs
    return ModSeries(modulus, out)


# Modularity bookkeeping ------------------------------------------------------


def weight(eq: EtaQuotient) -> Fraction:
    return Fraction(sum(r for _, r in eq.exponents), 2)


@dataclass(frozen=True)
class CuspLabel:
    c: int
    d: int

    def __post_init__(self):
        if self.d < 1 or math.gcd(self.c, self.d) != 1:
            raise ValueError(f"cusp {self.c}/{self.d} needs d >= 1 and gcd(c, d) = 1")


@dataclass(frozen=True)
class CuspOrderTable:
    entries: tuple[tuple[CuspLabel, Fraction], ...]
    hypotheses_hold: bool

    @property
    def min_order(self) -> Fraction:
        return min(order for _, order in self.entries)

    @property
    def negative(self) -> list[tuple[CuspLabel, Fraction]]:
        return [(c, o) for c, o in self.entries if o < 0]

    def order_at(self, d: int) -> Fraction:
        for cusp, order in self.entries:
            if cusp.d == d:
                return order
        raise KeyError(d)


@dataclass(frozen=True)
class ModularityReport:
    weight: Fraction
    weight_in_2z: bool
    sum_delta_r: int
    cond_24_delta: bool
    sum_n_over_delta_r: int
    cond_24_n_over_delta: bool
    product_factorization: dict[int, int]
    product_is_rational_square: bool
    prefactor_exponent: int | None
    cusp_orders: CuspOrderTable
    advisories: tuple[str, ...] = field(default=())

    @property
    def conditions_hold(self) -> bool:
        return (
            self.weight_in_2z
            and self.cond_24_delta
            and self.cond_24_n_over_delta
            and self.product_is_rational_square
        )

    @property
    def holomorphic(self) -> bool:
        return self.cusp_orders.min_order >= 0

    def product_text(self) -> str:
        if not self.product_factorization:
            return "1"
        return "*".join(f"{p}^{e}" for p, e in sorted(self.product_factorization.items()))

    def to_dict(self) -> dict:
        return {
            "weight": str(self.weight),
            "weight_in_2Z": self.weight_in_2z,
            "sum_delta_r": self.sum_delta_r,
            "cond24_delta": self.cond_24_delta,
            "sum_N_over_delta_r": self.sum_n_over_delta_r,
            "cond24_N_over_delta": self.cond_24_n_over_delta,
            "product": self.product_text(),
            "square": self.product_is_rational_square,
            "prefactor_exponent": self.prefactor_exponent,
            "holomorphic": self.holomorphic,
            "cusp_orders": [
                {"c": cusp.c, "d": cusp.d, "order_num": o.numerator, "order_den": o.denominator}
                for cusp, o in self.cusp_orders.entries
            ],
            "advisories": list(self.advisories),
        }


def _level_conditions(eq: EtaQuotient) -> bool:
    k = weight(eq)
    prod = _product_factorization(eq)
    return (
        k.denominator == 1
        and k.numerator % 2 == 0
        and eq.sum_delta_r % 24 == 0
        and eq.sum_n_over_delta_r % 24 == 0
        and all(e % 2 == 0 for e in prod.values())
    )


def _product_factorization(eq: EtaQuotient) -> dict[int, int]:
    total: Counter[int] = Counter()
    for delta, r in eq.exponents:
        for p, e in factorize(delta).items():
            total[p] += e * r
    return {p: e for p, e in sorted(total.items()) if e}


def cusp_order(eq: EtaQuotient, cusp: CuspLabel) -> Fraction:
    """Ligozat's order of vanishing of ``eq`` at the cusp ``c/d``.

    The numerator ``c`` does not enter the formula.  The value is returned
    whether or not the level conditions hold; :func:`cusp_order_table`
    records which.
    """
    N = eq.level
    d = cusp.d
    if N % d:
        raise ValueError(f"cusp denominator {d} does not divide the level {N}")
    g = math.gcd(d, N // d)
    total = sum(Fraction(math.gcd(d, delta) ** 2 * r, g * d * delta) for delta, r in eq.exponents)
    return Fraction(N, 24) * total


def cusp_order_table(eq: EtaQuotient) -> CuspOrderTable:
    entries = []
    for d in divisors(eq.level):
        cusp = CuspLabel(1, d)
        entries.append((cusp, cusp_order(eq, cusp)))
    return CuspOrderTable(tuple(entries), _level_conditions(eq))


def check_gordon_ligozat(eq: EtaQuotient) -> ModularityReport:
    """Evaluate the four level conditions and attach the cusp-order table."""
    k = weight(eq)
    prod = _product_factorization(eq)
    table = cusp_order_table(eq)
    advisories = []
    if k.denominator == 1 and k.numerator % 2:
        advisories.append(
            f"weight {k} is an odd integer: the even-weight test fails, "
            "though the form may still be modular with a character"
        )
    if table.negative:
        worst = ", ".join(f"d={c.d}: {o}" for c, o in table.negative)
        advisories.append(f"not holomorphic per Ligozat's cusp-order formula ({worst})")
    return ModularityReport(
        weight=k,
        weight_in_2z=k.denominator == 1 and k.numerator % 2 == 0,
        sum_delta_r=eq.sum_delta_r,
        cond_24_delta=eq.sum_delta_r % 24 == 0,
        sum_n_over_delta_r=eq.sum_n_over_delta_r,
        cond_24_n_over_delta=eq.sum_n_over_delta_r % 24 == 0,
        product_factorization=prod,
        product_is_rational_square=all(e % 2 == 0 for e in prod.values()),
        prefactor_exponent=eq.prefactor_exponent,
        cusp_orders=table,
        advisories=tuple(advisories),
    )


# The eta-quotient eta(15z)^7 eta(45z)^9 / (eta(z)^3 eta(3z)) whose sieved
# parts carry the a(15n+6), a(15n+12) congruences mod 5.
F_QUOTIENT = EtaQuotient(45, {1: -3, 3: -1, 15: 7, 45: 9})
