"""Command-line front end: ``staircase {gf,check,scan,asymptotics,irwinhall,lemma,jm}``.

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 usage or
input error, 3 numerical precision failure (including cache mismatches).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exact import (
    BULK_TAU,
    IntegerPolynomial,
    StaircaseShape,
    bulk_window,
    check_log_concave,
    check_unimodal,
    staircase_gf_dp,
    staircase_gf_family,
)
from .piecewise import (
    GaussianDensity,
    HypothesisError,
    irwin_hall_derivatives,
    irwin_hall_lemma_case,
    lemma1_check,
    log_concavity_margin,
    parse_rational,
    rational_str,
)
from .saddle import (
    PrecisionError,
    QuadratureConfig,
    convergence_study,
    empirical_orders,
    jm_integral,
)

log = logging.getLogger("staircase")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3
SCHEMA_VERSION = 1


def schema(name: str) -> str:
    return f"staircase.{name}/{SCHEMA_VERSION}"


class CacheMismatch(Exception):
    pass


@dataclass
class ScanResult:
    b: int
    n_range: tuple[int, int]
    failures: list[int]
    peaks: dict[int, int | None]
    clamped: list[int] = field(default_factory=list)
    runtime_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "schema": schema("scan"),
            "b": self.b,
            "n_range": list(self.n_range),
            "failures": self.failures,
            "peaks": {str(n): p for n, p in self.peaks.items()},
            "clamped": self.clamped,
            "runtime_ms": self.runtime_ms,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ScanResult":
        return cls(
            d["b"],
            tuple(d["n_range"]),
            list(d["failures"]),
            {int(n): p for n, p in d["peaks"].items()},
            list(d["clamped"]),
            d["runtime_ms"],
        )


@dataclass
class CacheRecord:
    n: int
    b: int
    coefficients: list[str]
    created_at: str
    version: str

    @property
    def key(self) -> tuple[int, int, str]:
        return self.n, self.b, self.version


class ResultCache:
    """Append-only JSON-lines store of generating polynomials.

    Records are keyed by ``(n, b, version)``; a new toolkit version simply
    never matches old lines.
    """

    def __init__(self, path, version: str = __version__):
        self.path = Path(path)
        self.version = version
        self._records: dict[tuple[int, int, str], CacheRecord] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = CacheRecord(**json.loads(line))
                        self._records[rec.key] = rec

    def get(self, n: int, b: int) -> IntegerPolynomial | None:
        rec = self._records.get((n, b, self.version))
        return IntegerPolynomial.from_strings(rec.coefficients) if rec else None

    def put(self, n: int, b: int, poly: IntegerPolynomial) -> None:
        rec = CacheRecord(
            n, b, poly.to_strings(),
            datetime.now(timezone.utc).isoformat(timespec="seconds"),
            self.version,
        )
        self._records[rec.key] = rec
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(asdict(rec)) + "\n")


def staircase_poly(shape: StaircaseShape, cache: ResultCache | None = None,
                   verify: bool = False) -> IntegerPolynomial:
    if cache is None:
        return staircase_gf_dp(shape)
    cached = cache.get(shape.n, shape.b)
    if cached is None:
        poly = staircase_gf_dp(shape)
        cache.put(shape.n, shape.b, poly)
        return poly
    if verify:
        fresh = staircase_gf_dp(shape)
        if fresh != cached:
            diff = [
                (i, cached[i], fresh[i])
                for i in range(max(len(fresh), len(cached)))
                if cached[i] != fresh[i]
            ]
            raise CacheMismatch(
                f"cache entry for n={shape.n}, b={shape.b} differs at "
                + ", ".join(f"l={i}: cached {c} != fresh {f}" for i, c, f in diff[:10])
            )
    return cached


def _scan_chunk(b: int, n_lo: int, n_hi: int):
    out = []
    for n, poly in enumerate(staircase_gf_family(b, n_hi), start=1):
        if n >= n_lo:
            out.append((n, check_unimodal(poly).peak_index))
    return out


def run_scan(b: int, n_min: int, n_max: int, jobs: int = 1) -> ScanResult:
    """Unimodality of every ``n`` in ``[n_min, n_max]`` at fixed ``b``.

    Chunks run in separate processes when ``jobs > 1``; results are ordered
    by ``n`` regardless of completion order.
    """
    if n_min < 1 or b < 1:
        raise ValueError("need n_min >= 1 and b >= 1")
    if n_min > n_max:
        raise ValueError(f"empty range [{n_min}, {n_max}]")
    start = time.perf_counter()
    jobs = max(1, min(jobs, n_max - n_min + 1))
    if jobs == 1:
        rows = _scan_chunk(b, n_min, n_max)
    else:
        edges = [n_min + (n_max - n_min + 1) * k // jobs for k in range(jobs + 1)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_scan_chunk, [b] * jobs, edges[:-1],
                             [e - 1 for e in edges[1:]])
            rows = [row for part in parts for row in part]
    rows.sort()
    peaks = dict(rows)
    failures = [n for n, p in rows if p is None]
    clamped = [n for n, _ in rows if b > n]
    return ScanResult(b, (n_min, n_max), failures, peaks, clamped,
                      round((time.perf_counter() - start) * 1000, 3))


# -- output ------------------------------------------------------------------

def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


class Emitter:
    def __init__(self, fmt: str, out: str | None):
        self.fmt = fmt
        self.out = out

    def emit(self, record: dict, header: list[str], rows: list[list], pretty: str):
        if self.fmt == "json":
            text = json.dumps(record, indent=2) + "\n"
        elif self.fmt == "csv":
            text = _csv_text(header, rows)
        else:
            text = pretty.rstrip("\n") + "\n"
        if self.out:
            Path(self.out).write_text(text)
        else:
            sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------

def _shape(args) -> StaircaseShape:
    return StaircaseShape(args.n, args.b)


def _cache(args) -> ResultCache | None:
    return ResultCache(args.cache) if args.cache else None


def cmd_gf(args, em: Emitter) -> int:
    shape = _shape(args)
    poly = staircase_poly(shape, _cache(args), args.verify_cache)
    coeffs = poly.to_strings()
    record = {
        "schema": schema("gf"), "n": shape.n, "b": shape.b,
        "clamped_b": shape.effective_b if shape.clamped else None,
        "degree": poly.degree, "coefficients": coeffs,
    }
    em.emit(record, ["ell", "coefficient"], [[i, c] for i, c in enumerate(coeffs)],
            "[" + ",".join(coeffs) + "]")
    return EXIT_OK


def cmd_check(args, em: Emitter) -> int:
    shape = _shape(args)
    poly = staircase_poly(shape, _cache(args), args.verify_cache)
    record = {"schema": schema("check"), "n": shape.n, "b": shape.b,
              "mode": args.mode, "length": len(poly),
              "clamped_b": shape.effective_b if shape.clamped else None}
    if args.mode == "unimodal":
        rep = check_unimodal(poly)
        ok = rep.is_unimodal
        record["report"] = rep.to_dict()
        verdict = (f"unimodal, peak at {rep.peak_index}" if ok
                   else f"NOT unimodal, violations at {list(rep.violations)}")
    else:
        tau = parse_rational(args.bulk_tau)
        lo, hi = bulk_window(shape, tau)
        lo, hi = max(lo, 1), min(hi, poly.degree - 1)
        rep = check_log_concave(poly, lo, hi)
        ok = rep.holds
        record["bulk_tau"] = rational_str(tau)
        record["report"] = rep.to_dict()
        verdict = (f"log-concave on [{lo}, {hi}]" if ok
                   else f"NOT log-concave on [{lo}, {hi}], violations at {list(rep.violations)}")
    record["passed"] = ok
    pretty = f"n={shape.n} b={shape.b} ({len(poly)} coefficients): {verdict}"
    em.emit(record, ["n", "b", "mode", "passed", "violations"],
            [[shape.n, shape.b, args.mode, ok, list(record["report"]["violations"])]],
            pretty)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scan(args, em: Emitter) -> int:
    res = run_scan(args.b, args.n_min, args.n_max, args.jobs)
    rows = [[n, p is not None, p] for n, p in res.peaks.items()]
    pretty = (f"b={res.b}, n in [{res.n_range[0]}, {res.n_range[1]}]: "
              f"failures {res.failures or 'none'} ({res.runtime_ms:.0f} ms)")
    em.emit(res.to_json(), ["n", "unimodal", "peak_index"], rows, pretty)
    return EXIT_OK


def _cfg(args) -> QuadratureConfig:
    return QuadratureConfig(alpha=args.alpha, alpha_scale=args.alpha_scale,
                            panels=args.panels)


def cmd_asymptotics(args, em: Emitter) -> int:
    n_list = [int(s) for s in args.n_list.split(",")]
    rows = convergence_study(args.b, args.m, args.x0, n_list, _cfg(args))
    orders = empirical_orders(rows)
    record = {"schema": schema("asymptotics"), "b": args.b, "m": args.m,
              "x0": args.x0, "rows": [r.to_json() for r in rows],
              "empirical_orders": orders}
    header = ["n", "b", "ell", "m", "jm", "main_term", "ratio", "error"]
    table = [[r.n, r.b, r.ell, r.m, r.jm, r.main_term, r.ratio, r.error] for r in rows]
    pretty = "\n".join(
        f"n={r.n:6d} ell={r.ell:7d} J={r.jm:.10g} main={r.main_term:.10g} error={r.error:.3e}"
        for r in rows
    ) + "\norders: " + ", ".join(f"{o:.3f}" for o in orders)
    em.emit(record, header, table, pretty)
    decreasing = all(r1.error < r0.error for r0, r1 in zip(rows, rows[1:]))
    return EXIT_OK if decreasing else EXIT_FAIL


def cmd_irwinhall(args, em: Emitter) -> int:
    density = irwin_hall_derivatives(args.b, args.derivative)
    record = {"schema": schema("irwinhall"), "b": args.b, "derivative": args.derivative}
    rows, lines = [], []
    for raw in args.eval or []:
        x = parse_rational(raw)
        v = density.evaluate(x)
        rows.append([rational_str(x), rational_str(v), float(v)])
        lines.append(f"I_{args.b}^({args.derivative})({x}) = {v}")
    record["values"] = [{"x": r[0], "value": r[1]} for r in rows]
    if args.margin:
        u, v, step = (parse_rational(s) for s in args.margin)
        rep = log_concavity_margin(args.b, u, v, step)
        record["margin"] = rep.to_json()
        lines.append(f"min (-log I)'' on [{u}, {v}] step {step}: "
                     f"{float(rep.min_value):.12g} at {rep.argmin}")
    if args.dump or not (args.eval or args.margin):
        record["density"] = density.to_json()
        lines.append(json.dumps(density.to_json()))
    em.emit(record, ["x", "value", "value_float"], rows, "\n".join(lines))
    return EXIT_OK


def cmd_lemma(args, em: Emitter) -> int:
    step = parse_rational(args.step)
    if args.gaussian:
        A, B = (parse_rational(s) for s in args.gaussian)
        grid = [Fraction(k, 4) for k in range(-20, 21)]
        rep = lemma1_check(GaussianDensity(A), GaussianDensity(B), A, B, grid)
        label = f"gaussian variances {A}, {B}"
    else:
        b1, b2 = args.irwin_hall
        rep = irwin_hall_lemma_case(b1, b2, step)
        label = f"Irwin-Hall orders {b1}, {b2}"
    record = {"schema": schema("lemma"), "case": label, **rep.to_json()}
    pretty = (f"{label}: bound 1/(A+B) = {float(rep.bound):.12g}, "
              f"min slack {float(rep.min_slack):.12g} at {rep.argmin} -> "
              + ("holds" if rep.holds else "FAILS"))
    em.emit(record, ["case", "holds", "min_slack", "argmin"],
            [[label, rep.holds, float(rep.min_slack), rational_str(rep.argmin)]], pretty)
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_jm(args, em: Emitter) -> int:
    shape = _shape(args)
    est = jm_integral(shape, args.ell, args.m, _cfg(args))
    record = {"schema": schema("jm"), "n": shape.n, "b": shape.b, "ell": args.ell,
              **asdict(est)}
    if args.m == 0 and float(args.ell).is_integer():
        record["exact"] = str(staircase_gf_dp(shape)[int(args.ell)])
    pretty = (f"J_{args.m}({args.ell}) = {est.value:.17g} "
              f"(imag residual {est.imag_residual:.2e}, {est.node_count} nodes)")
    em.emit(record, ["n", "b", "ell", "m", "value", "imag_residual"],
            [[shape.n, shape.b, args.ell, args.m, est.value, est.imag_residual]], pretty)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "pretty"], default="pretty")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--cache", metavar="FILE", help="JSON-lines result cache")
    common.add_argument("--verify-cache", action="store_true",
                        help="recompute cached entries and fail on mismatch")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    quad = argparse.ArgumentParser(add_help=False)
    quad.add_argument("--alpha", type=float, default=None, help="contour offset")
    quad.add_argument("--alpha-scale", type=float, default=0.5,
                      help="offset as a multiple of 1/n (default 0.5)")
    quad.add_argument("--panels", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="staircase",
        description="Distinct-part partitions in truncated staircases.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gf", parents=[common], help="generating polynomial coefficients")
    p.add_argument("n", type=int)
    p.add_argument("b", type=int)
    p.set_defaults(func=cmd_gf)

    p = sub.add_parser("check", parents=[common], help="unimodality or log-concavity")
    p.add_argument("n", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--mode", choices=["unimodal", "logconcave"], default="unimodal")
    p.add_argument("--bulk-tau", default=rational_str(BULK_TAU))
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scan", parents=[common], help="scan n for failures of unimodality")
    p.add_argument("b", type=int)
    p.add_argument("n_min", type=int)
    p.add_argument("n_max", type=int)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("asymptotics", parents=[common, quad],
                       help="convergence of J_m to its leading-order term")
    p.add_argument("b", type=int)
    p.add_argument("m", type=int, choices=[0, 1, 2])
    p.add_argument("x0", type=float)
    p.add_argument("n_list", help="comma-separated, e.g. 128,256,512")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("irwinhall", parents=[common], help="exact Irwin-Hall density")
    p.add_argument("b", type=int)
    p.add_argument("--eval", nargs="+", metavar="X", help="rationals such as 3/2")
    p.add_argument("--derivative", type=int, default=0)
    p.add_argument("--margin", nargs=3, metavar=("U", "V", "STEP"))
    p.add_argument("--random-points", type=int, default=0,
                   help="also evaluate at this many random rationals (see --seed)")
    p.add_argument("--dump", action="store_true", help="print the piecewise form")
    p.set_defaults(func=cmd_irwinhall)

    p = sub.add_parser("lemma", parents=[common], help="convolution log-concavity bound")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gaussian", nargs=2, metavar=("A", "B"),
                   help="Gaussian factors with these variances")
    g.add_argument("--irwin-hall", nargs=2, type=int, metavar=("B1", "B2"))
    p.add_argument("--step", default="1/64")
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("jm", parents=[common, quad], help="J_m by contour quadrature")
    p.add_argument("n", type=int)
    p.add_argument("b", type=int)
    p.add_argument("ell", type=float)
    p.add_argument("m", type=int, choices=[0, 1, 2])
    p.set_defaults(func=cmd_jm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "random_points", 0):
        rng = random.Random(args.seed)
        args.eval = list(args.eval or []) + [
            rational_str(Fraction(rng.randrange(1, 1000 * args.b), 1000))
            for _ in range(args.random_points)
        ]
    em = Emitter(args.format, args.out)
    try:
        return args.func(args, em)
    except CacheMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except PrecisionError as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except HypothesisError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
