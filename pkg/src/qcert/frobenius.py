"""Three-colored Frobenius partitions and the a(n) sequence.

``a(n)`` is defined by ``sum a(n) q^n = prod 1 / ((1 - q^{3n}) (1 - q^n)^3)``,
indexed from ``a(0) = 1``.  The three-colored Frobenius partition function
satisfies

    sum cphi3(n) q^n = sum p(n/3) q^n + 9 q prod (1 - q^{9n})^3 / ((1 - q^{3n}) (1 - q^n)^3)

with ``p(x) = 0`` for non-integral ``x``.  Expanding the cube by Jacobi's
identity writes ``cphi3(45n + j)`` for ``j`` in ``{7, 22, 37}`` as a short
signed sum of ``a``-values, each of which vanishes mod 5 for a checkable
reason; :func:`jacobi_decomposition` replays that case analysis.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .certifier import CongruenceClaim, ProgressionSelector, verify_progression
from .errors import ConsistencyError, TruncationError
from .eta import jacobi_cube_series, pentagonal_series
from .series import ModSeries, invert, mul, power, scale, shift

GF_ERRATUM = (
    "erratum: the first summand of the cphi3 generating function is printed as "
    "'sum p(n)^n'; it is read as sum_n p(n/3) q^n (p(x) = 0 for non-integral x), "
    "which matches Frobenius-symbol enumeration"
)
DISPLAY_ERRATUM = (
    "erratum: the display for cphi3(45n+37) has cphi3'(45n+22) on its right-hand "
    "side; 45n+37 is used, matching the summation that follows it"
)

CPHI3_CLASSES = (7, 22, 37)
DEFAULT_ENUMERATION_CAP = 14


# Oracles ----------------------------------------------------------------------


def partition_oracle(nmax: int) -> list[int]:
    """Exact ``p(0..nmax)`` by the dynamic program over part sizes."""
    p = [1] + [0] * nmax
    for part in range(1, nmax + 1):
        for n in range(part, nmax + 1):
            p[n] += p[n - part]
    return p


def colored_partition_oracle(nmax: int, colors: int = 3) -> list[int]:
    """Partitions of ``n`` where every part size comes in ``colors`` colors."""
    c = [1] + [0] * nmax
    for part in range(1, nmax + 1):
        for _ in range(colors):
            for n in range(part, nmax + 1):
                c[n] += c[n - part]
    return c


def a_oracle(nmax: int) -> list[int]:
    """Exact ``a(n) = sum_m c3(n - 3m) p(m)`` from the two partition oracles."""
    c3 = colored_partition_oracle(nmax, 3)
    p = partition_oracle(nmax // 3)
    return [sum(c3[n - 3 * m] * p[m] for m in range(n // 3 + 1)) for n in range(nmax + 1)]


def cphi3_exact(nmax: int) -> list[int]:
    """Exact ``cphi3(0..nmax)`` as Python integers (oracle-built ``a`` values)."""
    a = a_oracle(nmax)
    p = partition_oracle(nmax // 3)
    out = []
    for n in range(nmax + 1):
        total = p[n // 3] if n % 3 == 0 else 0
        k = 0
        while (e := 1 + 9 * k * (k + 1) // 2) <= n:
            total += 9 * (-1) ** k * (2 * k + 1) * a[n - e]
            k += 1
        out.append(total)
    return out


# Series -----------------------------------------------------------------------


def a_series(modulus: int, length: int) -> ModSeries:
    """``a(n)`` mod ``modulus`` for ``n < length``."""
    denom = mul(pentagonal_series(3, modulus, length), power(pentagonal_series(1, modulus, length), 3))
    return invert(denom)


def _cphi3_from_a(a: ModSeries) -> ModSeries:
    m, L = a.modulus, a.length
    p = invert(pentagonal_series(1, m, (L + 2) // 3))
    p_in_q3 = np.zeros(L, dtype=np.uint64)
    p_in_q3[::3] = p.coeffs[: len(p_in_q3[::3])]
    tail = scale(shift(mul(jacobi_cube_series(9, m, L), a), 1), 9)
    return ModSeries(m, p_in_q3) + tail


def cphi3_series(modulus: int, length: int) -> ModSeries:
    """``cphi3(n)`` mod ``modulus`` for ``n < length``."""
    return _cphi3_from_a(a_series(modulus, length))


# Frobenius symbols --------------------------------------------------------------

ColoredPart = tuple[int, int]


@dataclass(frozen=True)
class FrobeniusSymbol:
    top: tuple[ColoredPart, ...]
    bottom: tuple[ColoredPart, ...]

    def __post_init__(self):
        if len(self.top) != len(self.bottom):
            raise ValueError("rows must have equal length")
        for row in (self.top, self.bottom):
            if len(set(row)) != len(row):
                raise ValueError("colored entries within a row must be distinct")
            if any(v < 0 or c not in (0, 1, 2) for v, c in row):
                raise ValueError("entries are (value >= 0, color in {0, 1, 2})")

    @property
    def weight(self) -> int:
        return len(self.top) + sum(v for v, _ in self.top) + sum(v for v, _ in self.bottom)


def _rows(budget: int) -> Iterator[tuple[ColoredPart, ...]]:
    """All rows (sets of colored values, sorted) with ``size + sum <= budget``."""
    items = [(v, c) for v in range(budget) for c in range(3)]

    def grow(start: int, room: int, row: tuple[ColoredPart, ...]):
        yield row
        for i in range(start, len(items)):
            v, _ = items[i]
            if v + 1 > room:
                break
            yield from grow(i + 1, room - v - 1, row + (items[i],))

    yield from grow(0, budget, ())


def _check_budget(n: int, cap: int) -> None:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise ValueError(f"enumeration of weight {n} exceeds the cap {cap}")


def iter_frobenius_symbols(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[FrobeniusSymbol]:
    """Every three-colored Frobenius symbol of weight ``n``."""
    _check_budget(n, cap)
    rows = list(_rows(n))
    for top, bottom in itertools.product(rows, rows):
        if len(top) == len(bottom):
            sym = FrobeniusSymbol(top, bottom)
            if sym.weight == n:
                yield sym


def cphi3_bruteforce(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """Count three-colored Frobenius symbols of weight ``n`` by enumerating rows.

    Rows are tallied by (size, value sum); since rows are independent the
    symbol count is the sum over sizes ``r`` of matching row pairs.
    """
    _check_budget(n, cap)
    tally: dict[tuple[int, int], int] = {}
    for row in _rows(n):
        key = (len(row), sum(v for v, _ in row))
        tally[key] = tally.get(key, 0) + 1
    return sum(
        cnt * tally.get((r, n - r - s), 0)
        for (r, s), cnt in tally.items()
    )


# Jacobi case analysis ----------------------------------------------------------


class VanishingReason(str, enum.Enum):
    FACTOR = "factor-divisible-by-5"
    CLASS_6 = "a-term-in-class-6-mod-15"
    CLASS_12 = "a-term-in-class-12-mod-15"


def jacobi_shift(k: int) -> int:
    return 1 + 9 * k * (k + 1) // 2


@dataclass(frozen=True)
class JacobiTermRecord:
    k: int
    sign: int
    factor: int
    exponent_shift: int
    residue_class_mod45: int
    a_index: int
    a_value: int
    vanishing_reason: VanishingReason

    @property
    def value(self) -> int:
        """``9 (-1)^k (2k+1) a(index)`` with ``a`` read mod the series modulus."""
        return 9 * self.sign * self.factor * self.a_value


@dataclass(frozen=True)
class Decomposition:
    j: int
    n: int
    terms: tuple[JacobiTermRecord, ...]
    recomposed: int
    expected: int | None
    modulus: int


def residue_classification(kmax: int) -> dict[int, int]:
    """``k -> (1 + 9k(k+1)/2) mod 45`` for ``0 <= k <= kmax``, with its structure checked."""
    table = {k: jacobi_shift(k) % 45 for k in range(kmax + 1)}
    if not set(table.values()) <= {1, 10, 28}:
        raise ConsistencyError(f"unexpected residues {set(table.values())}")
    pattern = (1, 10, 28, 10, 1)
    for k, v in table.items():
        if v != pattern[k % 5]:
            raise ConsistencyError(f"residue at k={k} breaks the period-5 pattern")
    return table


def jacobi_decomposition(j: int, n: int, a: ModSeries, cphi3: ModSeries | None = None) -> Decomposition:
    """Write ``cphi3(45n + j)`` as ``9 sum_k (-1)^k (2k+1) a(45n + j - 1 - 9k(k+1)/2)``.

    Each term gets the reason it vanishes mod 5; a term fitting none of the
    three reasons raises :class:`ConsistencyError`.  If ``cphi3`` is given, the
    recomposed sum is checked against its coefficient.
    """
    if j not in CPHI3_CLASSES:
        raise ValueError(f"j must be one of {CPHI3_CLASSES}")
    target = 45 * n + j
    if target - 1 >= a.length:
        raise TruncationError(f"a-series of length {a.length} cannot reach index {target - 1}")
    m = a.modulus
    terms = []
    k = 0
    while (e := jacobi_shift(k)) <= target:
        index = target - e
        factor = 2 * k + 1
        if factor % 5 == 0:
            reason = VanishingReason.FACTOR
        elif index % 15 == 6:
            reason = VanishingReason.CLASS_6
        elif index % 15 == 12:
            reason = VanishingReason.CLASS_12
        else:
            raise ConsistencyError(f"term k={k} of cphi3({target}) has a-index {index} with no vanishing reason")
        terms.append(JacobiTermRecord(k, (-1) ** k, factor, e, e % 45, index, a[index], reason))
        k += 1
    recomposed = sum(t.value for t in terms) % m
    expected = None
    if cphi3 is not None:
        expected = cphi3[target]
        if expected != recomposed:
            raise ConsistencyError(f"cphi3({target}) = {expected} but the Jacobi sum gives {recomposed}")
    return Decomposition(j, n, tuple(terms), recomposed, expected, m)


def verify_cphi3_congruences(
    nmax: int, decomposition_limit: int = 50, l: int = 5
) -> tuple[list[CongruenceClaim], list[Decomposition]]:
    """Scan ``cphi3(45n + j)`` mod 5 for ``n <= nmax`` and replay the case analysis.

    The decomposition is replayed for ``n <= min(nmax, decomposition_limit)``;
    every class-6 and class-12 ``a``-value it uses must itself vanish mod 5.
    """
    length = 45 * nmax + 38
    a = a_series(l, length)
    c = _cphi3_from_a(a)
    claims = []
    for j in CPHI3_CLASSES:
        claim = verify_progression(c, ProgressionSelector(45, j), l, nmax + 1, source="cphi3(n)")
        claim.notes.extend([GF_ERRATUM, DISPLAY_ERRATUM])
        claims.append(claim)
    decompositions = []
    for n in range(min(nmax, decomposition_limit) + 1):
        for j in CPHI3_CLASSES:
            dec = jacobi_decomposition(j, n, a, c)
            for term in dec.terms:
                if term.vanishing_reason is not VanishingReason.FACTOR and term.a_value % l:
                    raise ConsistencyError(f"a({term.a_index}) is not 0 mod {l}")
            decompositions.append(dec)
    return claims, decompositions
