"""Command-line entry point.

Exit codes: 0 success or verified, 1 usage or internal error, 2 a scan found
a counterexample.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .certifier import (
    BOUND_DISCREPANCY_NOTE,
    F_SHIFT,
    ClaimStatus,
    CongruenceClaim,
    certify_a_congruences,
    search_congruences,
    sieve_level,
    sturm_bound_gamma0,
    sturm_bound_gamma1,
    sturm_context_for,
    verify_progression,
)
from .errors import QCertError
from .eta import (
    F_QUOTIENT,
    EtaQuotient,
    check_gordon_ligozat,
    cusp_order_table,
    expand,
    parse_quotient,
    pentagonal_series,
)
from .frobenius import GF_ERRATUM, a_oracle, a_series, cphi3_exact, cphi3_series, verify_cphi3_congruences
from .series import ModSeries, dumps, invert, loads
from .storage import SeriesCache, csv_table, to_json

log = logging.getLogger("qcert")

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2
DEFAULT_VERIFY_TERMS = 10**5
DEFAULT_ELLS = (2, 3, 5, 7, 11, 13)
FORMATS = {
    "expand": ("csv", "json", "binary"),
    "cusps": ("json", "csv"),
    "cphi3": ("csv", "json"),
}


@dataclass
class RunConfig:
    command: str
    source: str | None = None
    modulus: int | None = None
    length: int | None = None
    terms: int | None = None
    t: int | None = None
    r: int | None = None
    l: int | None = None
    output_format: str = "json"
    out: Path | None = None
    cache_dir: Path | None = None
    use_cache: bool = True
    full: bool = False
    t_max: int = 60
    ells: tuple[int, ...] = DEFAULT_ELLS
    series: str = "cphi3"
    level: int | None = None
    weight: Fraction | None = None

    def validate(self) -> "RunConfig":
        if self.length is not None and self.length < 1:
            raise ValueError("length must be at least 1")
        if self.terms is not None and self.terms < 1:
            raise ValueError("term count must be at least 1")
        allowed = FORMATS.get(self.command, ("json",))
        if self.output_format not in allowed:
            raise ValueError(f"format {self.output_format!r} is not available for {self.command} (choose from {allowed})")
        return self


# Sources ------------------------------------------------------------------------

NAMED_SOURCES = {
    "a": a_series,
    "cphi3": cphi3_series,
    "partition": lambda m, L: invert(pentagonal_series(1, m, L)),
}


def resolve_source(source: str, modulus: int, length: int, cache: SeriesCache | None = None) -> tuple[ModSeries, EtaQuotient | None]:
    """Series for a named source, a ``file:`` dump, or an eta-quotient text."""
    if source.startswith("file:"):
        return loads(Path(source[5:]).read_bytes()), None
    if source in NAMED_SOURCES:
        build = lambda: NAMED_SOURCES[source](modulus, length)  # noqa: E731
        quotient = None
        key = f"named:{source}"
    else:
        quotient = parse_quotient(source)
        build = lambda: expand(quotient, modulus, length)  # noqa: E731
        key = f"eta:{quotient}"
    if cache is None:
        return build(), quotient
    series, _ = cache.fetch(key, modulus, length, build)
    return series, quotient


def _associated_form(source: str) -> tuple[EtaQuotient, int] | None:
    """Eta-quotient whose expansion carries the source's coefficients, with the index shift."""
    if source == "a":
        return F_QUOTIENT, F_SHIFT
    try:
        return parse_quotient(source), 0
    except QCertError:
        return None


def _context(source: str, t: int, r: int):
    form = _associated_form(source)
    if form is None:
        return None, None
    quotient, offset = form
    report = check_gordon_ligozat(quotient)
    k = report.weight
    if k.denominator != 1 or k < 0:
        return None, report
    return sturm_context_for(quotient.level, k, t, (r + offset) % t), report


# Commands -----------------------------------------------------------------------


def _emit(cfg: RunConfig, payload: str | bytes) -> None:
    if cfg.out is not None:
        mode = "wb" if isinstance(payload, bytes) else "w"
        with open(cfg.out, mode) as fh:
            fh.write(payload)
    elif isinstance(payload, bytes):
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        sys.stdout.write(payload)


def _cache(cfg: RunConfig) -> SeriesCache | None:
    return SeriesCache(cfg.cache_dir) if cfg.use_cache else None


def cmd_expand(cfg: RunConfig) -> int:
    series, _ = resolve_source(cfg.source, cfg.modulus, cfg.length, _cache(cfg))
    if cfg.output_format == "binary":
        _emit(cfg, dumps(series))
    elif cfg.output_format == "csv":
        _emit(cfg, csv_table(series.tolist(), cfg.l or series.modulus))
    else:
        _emit(cfg, to_json({"source": cfg.source, "modulus": series.modulus, "length": series.length, "coefficients": series.tolist()}))
    return EXIT_OK


def cmd_eta_check(cfg: RunConfig) -> int:
    eq = parse_quotient(cfg.source)
    _emit(cfg, to_json({"quotient": str(eq), "level": eq.level, **check_gordon_ligozat(eq).to_dict()}))
    return EXIT_OK


def cmd_cusps(cfg: RunConfig) -> int:
    table = cusp_order_table(parse_quotient(cfg.source))
    if cfg.output_format == "csv":
        lines = ["c,d,order_num,order_den"]
        lines += [f"{c.c},{c.d},{o.numerator},{o.denominator}" for c, o in table.entries]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, to_json({
            "cusp_orders": [{"c": c.c, "d": c.d, "order_num": o.numerator, "order_den": o.denominator} for c, o in table.entries],
            "min_order": str(table.min_order),
            "hypotheses_hold": table.hypotheses_hold,
        }))
    return EXIT_OK


def cmd_sturm(cfg: RunConfig) -> int:
    N, k = cfg.level, cfg.weight
    out: dict = {"level": N, "weight": str(k), "gamma0_bound": sturm_bound_gamma0(N, k)}
    out["gamma1_bound"] = sturm_bound_gamma1(N, k) if N >= 3 else None
    if cfg.t is not None:
        book = sieve_level(N, cfg.t, cfg.r or 0, k)
        out["sieve"] = {
            "t": book.t, "r": book.r, "d": book.d, "sieved_level": book.sieved_level, "group": book.group,
            "gamma0_bound": sturm_bound_gamma0(book.sieved_level, k),
            "gamma1_bound": sturm_bound_gamma1(book.sieved_level, k) if book.sieved_level >= 3 else None,
        }
    _emit(cfg, to_json(out))
    return EXIT_OK


def _status_code(claims: list[CongruenceClaim]) -> int:
    return EXIT_REFUTED if any(c.status is ClaimStatus.REFUTED for c in claims) else EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    t, r, l = cfg.t, cfg.r, cfg.l
    terms = cfg.terms or DEFAULT_VERIFY_TERMS
    length = r + t * (terms - 1) + 1
    series, _ = resolve_source(cfg.source, cfg.modulus or l, length, _cache(cfg))
    sturm, report = _context(cfg.source, t, r)
    claim = verify_progression(series, (t, r), l, terms, source=cfg.source, sturm=sturm, modularity=report)
    if report is not None:
        claim.notes.extend(report.advisories)
    _emit(cfg, to_json(claim.to_certificate()))
    return _status_code([claim])


def cmd_certify(cfg: RunConfig) -> int:
    if cfg.source == "theorem-1.1":
        claims, equivalence = certify_a_congruences(cfg.terms, full=cfg.full)
        payload = {
            "target": "a(15n+6) = a(15n+12) = 0 (mod 5)",
            "claims": [c.to_certificate() for c in claims],
            "equivalence": None if equivalence is None else equivalence.to_dict(),
            "notes": [BOUND_DISCREPANCY_NOTE],
        }
    elif cfg.source == "theorem-1.2":
        if cfg.full:
            raise ValueError("--full applies to theorem-1.1 only")
        claims, decompositions = verify_cphi3_congruences(cfg.terms - 1)
        payload = {
            "target": "cphi3(45n+7) = cphi3(45n+22) = cphi3(45n+37) = 0 (mod 5)",
            "claims": [c.to_certificate() for c in claims],
            "decomposition": {
                "replayed": len(decompositions),
                "max_n": max(d.n for d in decompositions),
                "reasons": sorted({t.vanishing_reason.value for d in decompositions for t in d.terms}),
            },
            "notes": claims[0].notes,
        }
    else:
        raise ValueError(f"unknown certification target {cfg.source!r} (theorem-1.1 or theorem-1.2)")
    for note in payload["notes"]:
        log.warning("%s", note)
    _emit(cfg, to_json(payload))
    return _status_code(claims)


def cmd_cphi3(cfg: RunConfig) -> int:
    nmax = cfg.length - 1
    values = a_oracle(nmax) if cfg.series == "a" else cphi3_exact(nmax)
    if cfg.series == "cphi3":
        log.warning("%s", GF_ERRATUM)
    if cfg.output_format == "csv":
        _emit(cfg, csv_table(values, 5))
    else:
        _emit(cfg, to_json({"series": cfg.series, "values": values}))
    return EXIT_OK


def cmd_search(cfg: RunConfig) -> int:
    terms = cfg.terms or 1000
    t_values = [cfg.t] if cfg.t is not None else list(range(1, cfg.t_max + 1))
    modulus = math.lcm(*cfg.ells)
    series, _ = resolve_source(cfg.source, modulus, max(t_values) * terms, _cache(cfg))
    rows = []
    for cand in search_congruences(series, t_values, cfg.ells, terms):
        row = {"t": cand.t, "r": cand.r, "l": cand.l, "primitive": cand.primitive, "sieved_level": None, "bound": None}
        sturm, _ = _context(cfg.source, cand.t, cand.r)
        if sturm is not None:
            row["sieved_level"] = sturm.level
            row["bound"] = sturm.bound
        rows.append(row)
    _emit(cfg, to_json({"source": cfg.source, "terms": terms, "candidates": rows}))
    return EXIT_OK


COMMANDS = {
    "expand": cmd_expand,
    "eta-check": cmd_eta_check,
    "cusps": cmd_cusps,
    "sturm": cmd_sturm,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "cphi3": cmd_cphi3,
    "search": cmd_search,
}


# Argument parsing -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _ells(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt="json"):
        p.add_argument("--out", type=Path, help="write output to this file instead of stdout")
        p.add_argument("--format", dest="output_format", default=fmt)
        p.add_argument("-q", "--quiet", action="store_true", help="suppress progress output")

    def caching(p):
        p.add_argument("--cache-dir", type=Path, help="cache directory (default: $QCERT_CACHE_DIR or ~/.cache/qcert)")
        p.add_argument("--no-cache", dest="use_cache", action="store_false")

    p = sub.add_parser("expand", help="expand an eta-quotient or named series")
    p.add_argument("source", help="'N : d^r * ...', or one of a, cphi3, partition")
    p.add_argument("--mod", dest="modulus", type=int, required=True)
    p.add_argument("--len", dest="length", type=int, required=True)
    p.add_argument("--l", type=int, help="modulus for the value_mod column (default: --mod)")
    common(p, "csv")
    caching(p)

    for name, help_ in (("eta-check", "level conditions and cusp orders"), ("cusps", "cusp-order table")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("source", help="'N : d^r * ...'")
        common(p)

    p = sub.add_parser("sturm", help="Sturm-type bounds and sieve levels")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--weight", type=Fraction, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--r", type=int)
    common(p)

    p = sub.add_parser("verify", help="scan one progression for a congruence")
    p.add_argument("source")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--l", type=int, default=5)
    p.add_argument("--mod", dest="modulus", type=int, help="working modulus (default: --l)")
    p.add_argument("--terms", type=int, default=DEFAULT_VERIFY_TERMS)
    common(p)
    caching(p)

    p = sub.add_parser("certify", help="certify the built-in congruence families")
    p.add_argument("source", choices=("theorem-1.1", "theorem-1.2"))
    p.add_argument("--terms", type=int, default=DEFAULT_VERIFY_TERMS)
    p.add_argument("--full", action="store_true", help="scan up to the larger of the computed and quoted bounds")
    common(p)

    p = sub.add_parser("cphi3", help="exact cphi3(n) or a(n) table")
    p.add_argument("--len", dest="length", type=int, default=100)
    p.add_argument("--series", choices=("cphi3", "a"), default="cphi3")
    common(p, "csv")

    p = sub.add_parser("search", help="look for progressions vanishing mod small primes")
    p.add_argument("source")
    p.add_argument("--terms", type=int, default=1000)
    p.add_argument("--t", type=int, help="single step to test")
    p.add_argument("--t-max", type=int, default=60)
    p.add_argument("--ells", type=_ells, default=DEFAULT_ELLS)
    common(p)
    caching(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    return RunConfig(**fields).validate()


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if ns.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (QCertError, ValueError, OSError) as exc:
        print(f"qcert: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
