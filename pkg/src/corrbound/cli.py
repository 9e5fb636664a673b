"""Command-line driver: certified bounds, bound tables, the closed-form
two-point kernel, and cache maintenance.

Exit codes are part of the contract: 0 success, 1 configuration error,
2 numeric failure (singular system, tail tolerance), 3 cache corruption
or a failed cache verification.  Reports are deterministic: two runs with
the same configuration produce byte-identical JSON except for the top-level
"timing" block, which callers should strip before comparing.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
import time
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import _hexint
from .arith import Interval, as_fraction
from .errors import (
    CacheCorruptError,
    ConfigError,
    CorrboundError,
    NumericError,
)
from .functionals import (
    DEFAULT_TAIL_TOLERANCE,
    TruncationParams,
    _cache_path,
    _load_cache,
    _ShiftEvaluator,
    assemble_gram,
    default_shift,
    nu3_poly,
)
from .kernel2 import k00, kernel2_eval
from .solver import certify_bound, fraction_bound, solve_rank1
from .symmetry import invariant_poly_basis, invariant_shift_basis

__all__ = [
    "RunConfig",
    "ceil_decimal",
    "floor_decimal",
    "cmd_bound",
    "cmd_table",
    "cmd_kernel2",
    "cmd_cache",
    "main",
]

DEFAULT_PRECISION = 256
CACHE_ENV = "CORRBOUND_CACHE_DIR"

# Default truncation scale by n.  n = 4 grids grow cubically with C, so its
# default stays small; n = 2 and 3 afford a wider box.
_DEFAULT_C = {2: 200, 3: 200, 4: 25}


def ceil_decimal(value, places: int = 9) -> str:
    """Decimal string rounded up at `places` digits; the safe direction for
    an upper bound.  Intervals contribute their upper endpoint."""
    x = value.hi_fraction if isinstance(value, Interval) else as_fraction(value)
    q = 10**places
    n = math.ceil(x * q)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return "%s%d.%0*d" % (sign, n // q, places, n % q)


def floor_decimal(value, places: int = 9) -> str:
    """Decimal string rounded down at `places` digits; the safe direction
    for a lower bound.  Intervals contribute their lower endpoint."""
    x = value.lo_fraction if isinstance(value, Interval) else as_fraction(value)
    q = 10**places
    n = math.floor(x * q)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return "%s%d.%0*d" % (sign, n // q, places, n % q)


def _dec(x: Fraction, digits: int = 30) -> str:
    with localcontext() as ctx:
        ctx.prec = max(digits, 2)
        d = Decimal(int(x.numerator)) / Decimal(int(x.denominator))
        return format(d, "f")


def _sci(x: Fraction, digits: int = 3) -> str:
    if x == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(int(x.numerator)) / Decimal(int(x.denominator))
        return format(d, "E")


def _scalar_fields(value) -> Dict:
    """mid/rad/hi/lo decimal strings plus the exact rational when there is
    one; every report embeds bounds through this single shape."""
    if isinstance(value, Fraction):
        return {
            "mid": _dec(value),
            "rad": "0",
            "lo": _dec(value),
            "hi": _dec(value),
            "exact": "%d/%d" % (value.numerator, value.denominator),
        }
    return {
        "mid": _dec(value.mid_fraction),
        "rad": _sci(value.rad_fraction),
        "lo": _dec(value.lo_fraction),
        "hi": _dec(value.hi_fraction),
        "exact": None,
    }


@dataclass(frozen=True)
class RunConfig:
    """One bound computation, fully pinned.

    parametrization 'poly' is the exact route and exists for (n, m) = (3, 1)
    with even d (d counts the degree of the basis products, so the underlying
    polynomial basis runs to d/2).  parametrization 'shift' covers
    n in {2, 3, 4} and reads d as the L1 radius of the shift lattice.
    """

    n: int
    m: int
    parametrization: str = "shift"
    d: int = 0
    C: Optional[int] = None
    precision: int = DEFAULT_PRECISION
    output: str = "text"
    cache_dir: Optional[str] = None
    s: Tuple[Fraction, ...] = ()
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    jobs: int = 1

    def __post_init__(self):
        if self.parametrization not in ("poly", "shift"):
            raise ConfigError("parametrization must be 'poly' or 'shift'")
        if self.parametrization == "poly":
            if (self.n, self.m) != (3, 1):
                raise ConfigError(
                    "polynomial parametrization is implemented for "
                    "n = 3, m = 1 only"
                )
            if self.d % 2:
                raise ConfigError(
                    "d is the product degree on the polynomial route and "
                    "must be even"
                )
            if self.C is not None:
                raise ConfigError("the polynomial route is exact; C does not apply")
            if self.s:
                raise ConfigError("the polynomial route takes no shift")
        else:
            if self.n not in (2, 3, 4):
                raise ConfigError("shift parametrization supports n in {2, 3, 4}")
            if self.m < 1:
                raise ConfigError("m must be a positive integer")
        if self.d < 0:
            raise ConfigError("d must be nonnegative")
        if self.precision < 16:
            raise ConfigError("precision below 16 bits is not supported")
        if self.output not in ("text", "json", "csv"):
            raise ConfigError("output must be text, json, or csv")
        if self.jobs < 1:
            raise ConfigError("jobs must be a positive integer")

    @property
    def effective_C(self) -> int:
        if self.C is not None:
            return self.C
        return _DEFAULT_C[self.n]

    def provenance(self) -> Dict:
        """The config block reports embed.  Worker count and cache location
        are orchestration, not inputs, so they stay out."""
        out: Dict = {
            "n": self.n,
            "m": self.m,
            "param": self.parametrization,
            "d": self.d,
            "precision": self.precision,
        }
        if self.parametrization == "shift":
            s = self.s or default_shift(self.n, self.m)
            out["C"] = self.effective_C
            out["s"] = [str(as_fraction(c)) for c in s]
            out["tail_tolerance"] = self.tail_tolerance
        return out


def _build_system(config: RunConfig):
    if config.parametrization == "poly":
        basis = invariant_poly_basis(3, config.d // 2)
        params = None
    else:
        basis = invariant_shift_basis(config.n, config.m, config.d)
        params = TruncationParams(
            n=config.n,
            m=config.m,
            C=config.effective_C,
            s=config.s,
            tail_tolerance=config.tail_tolerance,
        )
    system = assemble_gram(
        config.n,
        config.m,
        basis,
        params=params,
        cache_dir=config.cache_dir,
        jobs=config.jobs,
    )
    return system, basis


def _basis_block(basis) -> Dict:
    if basis.kind == "polynomial":
        return {
            "kind": "polynomial",
            "size": len(basis),
            "degrees": [p.degree() for p in basis.functions],
        }
    return {
        "kind": "shift",
        "size": len(basis),
        "orbit_representatives": [list(orbit[0]) for orbit in basis.functions],
    }


def _solve_row(config: RunConfig) -> Dict:
    system, basis = _build_system(config)
    dropped: List[int] = []
    coeffs = solve_rank1(system, dropped)
    cert = certify_bound(system, coeffs)
    cert.dropped = dropped
    return {
        "basis": _basis_block(basis),
        "bound": dict(_scalar_fields(cert.bound), printed=ceil_decimal(cert.bound)),
        "fraction": dict(
            _scalar_fields(cert.fraction), printed=floor_decimal(cert.fraction)
        ),
        "coefficients": [
            "%d/%d" % (c.numerator, c.denominator) for c in cert.c
        ],
        "dropped": dropped,
    }


def cmd_bound(config: RunConfig) -> Tuple[Dict, int]:
    start = time.monotonic()
    row = _solve_row(config)
    report = {
        "command": "bound",
        "config": config.provenance(),
    }
    report.update(row)
    report["timing"] = {"seconds": round(time.monotonic() - start, 3)}
    return report, 0


def cmd_table(config: RunConfig, d_values: Sequence[int]) -> Tuple[Dict, int]:
    """One bound per requested d.  A row that fails numerically is reported
    in place and the sweep continues; the run exits nonzero if any row
    failed and zero otherwise (an empty sweep is a success).  The polynomial
    route only defines even product degrees, so a sweep there keeps the even
    values of the range."""
    start = time.monotonic()
    if config.parametrization == "poly":
        d_values = [d for d in d_values if d % 2 == 0]
    rows = []
    failed = 0
    for d in d_values:
        row_config = RunConfig(
            n=config.n,
            m=config.m,
            parametrization=config.parametrization,
            d=d,
            C=config.C,
            precision=config.precision,
            output=config.output,
            cache_dir=config.cache_dir,
            s=config.s,
            tail_tolerance=config.tail_tolerance,
            jobs=config.jobs,
        )
        try:
            row = _solve_row(row_config)
        except NumericError as exc:
            rows.append({"d": d, "error": str(exc)})
            failed += 1
            continue
        rows.append(
            {
                "d": d,
                "bound": row["bound"],
                "fraction": row["fraction"],
                "basis_size": row["basis"]["size"],
                "dropped": row["dropped"],
            }
        )
    report = {
        "command": "table",
        "config": config.provenance(),
        "rows": rows,
        "failed_rows": failed,
        "timing": {"seconds": round(time.monotonic() - start, 3)},
    }
    return report, (2 if failed else 0)


def cmd_kernel2(
    m: int,
    x: Optional[Fraction] = None,
    y: Optional[Fraction] = None,
    precision: int = DEFAULT_PRECISION,
) -> Tuple[Dict, int]:
    if (x is None) != (y is None):
        raise ConfigError("--x and --y must be given together")
    start = time.monotonic()
    value, bound = k00(m, precision)
    fraction = fraction_bound(2, bound)
    report: Dict = {
        "command": "kernel2",
        "config": {"m": m, "precision": precision},
        "k00": _scalar_fields(value),
        "bound": dict(_scalar_fields(bound), printed=ceil_decimal(bound)),
        "fraction": dict(
            _scalar_fields(fraction), printed=floor_decimal(fraction)
        ),
        "note": (
            "two-point multiplicity bounds sharper than this construction "
            "are known from other methods; the fraction line certifies only "
            "what the kernel value yields"
        ),
    }
    if x is not None:
        kxy = kernel2_eval(m, x, y, precision)
        report["kxy"] = dict(_scalar_fields(kxy), x=str(x), y=str(y))
    report["timing"] = {"seconds": round(time.monotonic() - start, 3)}
    return report, 0


# ----------------------------------------------------------------------
# cache maintenance


def _cache_files(cache_dir: str) -> List[str]:
    if not os.path.isdir(cache_dir):
        return []
    names = [
        f
        for f in os.listdir(cache_dir)
        if f.startswith("gram-") and f.endswith(".ndjson")
    ]
    return sorted(names)


def _read_meta(path: str) -> Dict:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
    try:
        rec = json.loads(first)
        meta = rec["meta"]
    except (json.JSONDecodeError, KeyError, TypeError):
        raise CacheCorruptError("%s: missing or malformed metadata line" % path)
    for key in ("n", "m", "param", "d"):
        if key not in meta:
            raise CacheCorruptError("%s: metadata lacks %r" % (path, key))
    return meta


def _meta_summary(meta: Dict) -> str:
    bits = ["n=%d" % meta["n"], "m=%d" % meta["m"], meta["param"],
            "d=%d" % meta["d"]]
    if meta["param"] == "shift":
        bits.append("C=%d" % meta["C"])
    return " ".join(bits)


def _rebuild_basis(meta: Dict):
    if meta["param"] == "poly":
        return invariant_poly_basis(meta["n"], meta["d"])
    return invariant_shift_basis(meta["n"], meta["m"], meta["d"])


def _verify_file(cache_dir: str, name: str, sample: float, rng) -> Dict:
    """Recompute a random sample of one file's entries at equal settings
    and check that fresh and cached enclosures overlap.  Exact entries must
    match exactly.  Any disagreement marks the entry stale."""
    path = os.path.join(cache_dir, name)
    meta = _read_meta(path)
    basis = _rebuild_basis(meta)
    funcs = list(basis.functions)
    entries = _load_cache(path, meta, len(funcs))
    keys = sorted(entries)
    count = max(1, round(sample * len(keys))) if keys else 0
    picked = sorted(rng.sample(keys, count)) if count else []
    stale = []
    if meta["param"] == "poly":
        tables = _hexint.pair_tables(meta["d"]) if picked else None
        for i, ip in picked:
            fresh = nu3_poly(funcs[i], funcs[ip], tables)
            if fresh != entries[(i, ip)]:
                stale.append([i, ip])
    else:
        params = TruncationParams(
            n=meta["n"],
            m=meta["m"],
            C=meta["C"],
            s=tuple(Fraction(c) for c in meta["s"]),
            tail_tolerance=meta["tail_tolerance"],
        )
        evaluator = _ShiftEvaluator(meta["n"], meta["m"], params)
        diag = [
            abs(v.mid_fraction) for (i, ip), v in entries.items() if i == ip
        ]
        hint = max(diag) / evaluator.prefactor if diag else None
        for i, ip in picked:
            fresh = evaluator.entry(
                funcs[i], funcs[ip], None if i == ip else hint
            )
            old = entries[(i, ip)]
            overlap = (
                fresh.lo_fraction <= old.hi_fraction
                and old.lo_fraction <= fresh.hi_fraction
            )
            if not overlap:
                stale.append([i, ip])
    return {
        "file": name,
        "config": _meta_summary(meta),
        "records": len(keys),
        "checked": len(picked),
        "stale": stale,
    }


def cmd_cache(
    action: str,
    cache_dir: Optional[str],
    sample: float = 0.05,
    seed: int = 0,
) -> Tuple[Dict, int]:
    if not cache_dir:
        raise ConfigError(
            "no cache directory: pass --cache-dir or set %s" % CACHE_ENV
        )
    start = time.monotonic()
    names = _cache_files(cache_dir)
    report: Dict = {"command": "cache", "action": action, "dir": cache_dir}
    code = 0
    if action == "list":
        files = []
        for name in names:
            path = os.path.join(cache_dir, name)
            meta = _read_meta(path)
            with open(path, "r", encoding="utf-8") as fh:
                records = sum(1 for line in fh if line.strip()) - 1
            files.append(
                {"file": name, "config": _meta_summary(meta), "records": records}
            )
        report["files"] = files
    elif action == "verify":
        rng = random.Random(seed)
        files = [_verify_file(cache_dir, name, sample, rng) for name in names]
        report["files"] = files
        report["stale_entries"] = sum(len(f["stale"]) for f in files)
        if report["stale_entries"]:
            code = 3
    elif action == "clear":
        for name in names:
            os.remove(os.path.join(cache_dir, name))
        report["removed"] = len(names)
    else:
        raise ConfigError("cache action must be list, verify, or clear")
    report["timing"] = {"seconds": round(time.monotonic() - start, 3)}
    return report, code


# ----------------------------------------------------------------------
# rendering


def _render_text(report: Dict) -> str:
    lines: List[str] = []
    cmd = report["command"]
    if cmd in ("bound", "table"):
        cfg = report["config"]
        head = "n=%d m=%d %s" % (cfg["n"], cfg["m"], cfg["param"])
        if "C" in cfg:
            head += " C=%d s=%s" % (cfg["C"], ",".join(cfg["s"]))
        head += " precision=%d" % cfg["precision"]
    if cmd == "bound":
        lines.append(head + " d=%d" % report["config"]["d"])
        basis = report["basis"]
        drop = report["dropped"]
        lines.append(
            "basis size %d%s"
            % (basis["size"], ", dropped %s" % drop if drop else "")
        )
        b = report["bound"]
        lines.append(
            "bound    <= %s   [mid %s, rad %s]"
            % (b["printed"], b["mid"][:20], b["rad"])
        )
        f = report["fraction"]
        lines.append(
            "fraction >= %s   [mid %s, rad %s]"
            % (f["printed"], f["mid"][:20], f["rad"])
        )
    elif cmd == "table":
        lines.append(head)
        lines.append("%6s  %-13s %-11s %-13s %s" % (
            "d", "bound<=", "rad", "fraction>=", "basis"))
        for row in report["rows"]:
            if "error" in row:
                lines.append("%6d  failed: %s" % (row["d"], row["error"]))
                continue
            lines.append(
                "%6d  %-13s %-11s %-13s %d"
                % (
                    row["d"],
                    row["bound"]["printed"],
                    row["bound"]["rad"],
                    row["fraction"]["printed"],
                    row["basis_size"],
                )
            )
    elif cmd == "kernel2":
        cfg = report["config"]
        lines.append("m=%d precision=%d" % (cfg["m"], cfg["precision"]))
        lines.append(
            "kernel at origin     K(0,0) = %s [rad %s]"
            % (report["k00"]["mid"][:28], report["k00"]["rad"])
        )
        lines.append(
            "two-point bound    1/K(0,0) <= %s" % report["bound"]["printed"]
        )
        frac = report["fraction"]
        vacuous = " (vacuous)" if frac["lo"].startswith("-") else ""
        lines.append(
            "fraction (n=2)     >= %s%s" % (frac["printed"], vacuous)
        )
        lines.append("note: %s" % report["note"])
        if "kxy" in report:
            kxy = report["kxy"]
            lines.append(
                "K(%s, %s) = %s [rad %s]"
                % (kxy["x"], kxy["y"], kxy["mid"][:28], kxy["rad"])
            )
    elif cmd == "cache":
        lines.append("cache dir %s" % report["dir"])
        if report["action"] == "clear":
            lines.append("removed %d file(s)" % report["removed"])
        else:
            for f in report["files"]:
                extra = ""
                if report["action"] == "verify":
                    extra = ", checked %d" % f["checked"]
                    if f["stale"]:
                        extra += ", STALE %s" % f["stale"]
                lines.append(
                    "%s  %s  records %d%s"
                    % (f["file"], f["config"], f["records"], extra)
                )
            if report["action"] == "verify":
                lines.append(
                    "stale entries: %d" % report["stale_entries"]
                )
            elif not report["files"]:
                lines.append("no cache files")
    lines.append("time %.3fs" % report["timing"]["seconds"])
    return "\n".join(lines)


_CSV_BOUND = ["n", "m", "param", "d", "C", "bound_printed", "bound_mid",
              "bound_rad", "fraction_printed", "basis_size", "error"]


def _csv_bound_row(cfg: Dict, d: int, row: Dict) -> List:
    if "error" in row:
        return [cfg["n"], cfg["m"], cfg["param"], d, cfg.get("C", ""),
                "", "", "", "", "", row["error"]]
    return [
        cfg["n"], cfg["m"], cfg["param"], d, cfg.get("C", ""),
        row["bound"]["printed"], row["bound"]["mid"], row["bound"]["rad"],
        row["fraction"]["printed"],
        row["basis_size"] if "basis_size" in row else row["basis"]["size"],
        "",
    ]


def _render_csv(report: Dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    cmd = report["command"]
    if cmd == "bound":
        writer.writerow(_CSV_BOUND)
        writer.writerow(_csv_bound_row(report["config"],
                                       report["config"]["d"], report))
    elif cmd == "table":
        writer.writerow(_CSV_BOUND)
        for row in report["rows"]:
            writer.writerow(_csv_bound_row(report["config"], row["d"], row))
    elif cmd == "kernel2":
        writer.writerow(["m", "k00_mid", "k00_rad", "bound_printed",
                         "fraction_printed"])
        writer.writerow([
            report["config"]["m"], report["k00"]["mid"], report["k00"]["rad"],
            report["bound"]["printed"], report["fraction"]["printed"],
        ])
    elif cmd == "cache":
        if report["action"] == "clear":
            writer.writerow(["removed"])
            writer.writerow([report["removed"]])
        else:
            writer.writerow(["file", "config", "records", "checked", "stale"])
            for f in report["files"]:
                writer.writerow([
                    f["file"], f["config"], f["records"],
                    f.get("checked", ""), json.dumps(f.get("stale", [])),
                ])
    return out.getvalue().rstrip("\n")


def _render(report: Dict, output: str) -> str:
    if output == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    if output == "csv":
        return _render_csv(report)
    return _render_text(report)


# ----------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    """argparse exits with its own code 2 on bad flags; remap onto the
    configuration-error slot of the exit contract."""

    def error(self, message):
        raise ConfigError(message)


def _parse_fraction_arg(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ConfigError("not a rational: %r" % text)


def _parse_shift_arg(text: str) -> Tuple[Fraction, ...]:
    return tuple(_parse_fraction_arg(part) for part in text.split(","))


def _parse_d_range(text: str) -> List[int]:
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            return [int(lo)]
        return list(range(int(lo), int(hi) + 1))
    except ValueError:
        raise ConfigError("d range must look like a:b, got %r" % text)


def _add_run_flags(sub, with_d: bool):
    sub.add_argument("--n", type=int, default=3, help="correlation order")
    sub.add_argument("--m", type=int, default=1, help="band parameter")
    sub.add_argument("--param", choices=("poly", "shift"), default="shift",
                     help="parametrization of the trial space")
    if with_d:
        sub.add_argument("--d", type=int, default=0,
                         help="product degree (poly) or L1 radius (shift)")
    sub.add_argument("--C", type=int, default=None,
                     help="truncation scale (shift route)")
    sub.add_argument("--s", type=str, default=None,
                     help="comma-separated rational shift coordinates")
    sub.add_argument("--tail-tolerance", type=float,
                     default=DEFAULT_TAIL_TOLERANCE,
                     help="relative tail budget for lattice sums")
    sub.add_argument("--jobs", type=int, default=1,
                     help="worker threads for Gram assembly")


def _add_common_flags(sub):
    sub.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                     help="working precision in bits")
    sub.add_argument("--format", choices=("text", "json", "csv"),
                     default="text", help="report format")
    sub.add_argument("--cache-dir", type=str,
                     default=os.environ.get(CACHE_ENV),
                     help="entry cache directory (default: $%s)" % CACHE_ENV)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="corrbound",
        description="Certified bounds on sine-kernel correlation functionals.",
    )
    subs = parser.add_subparsers(dest="cmd", required=True)

    p_bound = subs.add_parser("bound", help="certify one bound")
    _add_run_flags(p_bound, with_d=True)
    _add_common_flags(p_bound)

    p_table = subs.add_parser("table", help="certify bounds over a d range")
    _add_run_flags(p_table, with_d=False)
    p_table.add_argument("--d-range", type=str, required=True,
                         help="inclusive range a:b (b < a gives no rows)")
    _add_common_flags(p_table)

    p_k2 = subs.add_parser("kernel2",
                           help="closed-form two-point kernel and bound")
    p_k2.add_argument("--m", type=int, default=1, help="band parameter")
    p_k2.add_argument("--x", type=str, default=None, help="first argument")
    p_k2.add_argument("--y", type=str, default=None, help="second argument")
    _add_common_flags(p_k2)

    p_cache = subs.add_parser("cache", help="inspect or maintain the cache")
    p_cache.add_argument("action", choices=("list", "verify", "clear"))
    p_cache.add_argument("--sample", type=float, default=0.05,
                         help="fraction of entries verify recomputes")
    p_cache.add_argument("--seed", type=int, default=0,
                         help="sampling seed for verify")
    _add_common_flags(p_cache)
    return parser


def _config_from_args(args, d: int) -> RunConfig:
    return RunConfig(
        n=args.n,
        m=args.m,
        parametrization=args.param,
        d=d,
        C=args.C,
        precision=args.precision,
        output=args.format,
        cache_dir=args.cache_dir,
        s=_parse_shift_arg(args.s) if args.s else (),
        tail_tolerance=args.tail_tolerance,
        jobs=args.jobs,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse still exits directly for --help; keep its code 0.
            return int(exc.code or 0)
        if args.cmd == "bound":
            report, code = cmd_bound(_config_from_args(args, args.d))
            fmt = args.format
        elif args.cmd == "table":
            config = _config_from_args(args, 0)
            report, code = cmd_table(config, _parse_d_range(args.d_range))
            fmt = args.format
        elif args.cmd == "kernel2":
            if args.m < 1:
                raise ConfigError("m must be a positive integer")
            x = _parse_fraction_arg(args.x) if args.x is not None else None
            y = _parse_fraction_arg(args.y) if args.y is not None else None
            report, code = cmd_kernel2(args.m, x, y, args.precision)
            fmt = args.format
        else:
            report, code = cmd_cache(
                args.action, args.cache_dir, args.sample, args.seed
            )
            fmt = args.format
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except CacheCorruptError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except NumericError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except CorrboundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    print(_render(report, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
