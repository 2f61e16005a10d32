"""Command line front end.

Subcommands:

  optimal   construct the D-optimal design for a region, certify it, report it
  verify    run the equivalence-theorem check on a design file
  tables    regenerate the reference tables of optimal designs (wide/narrow)
  expand    list every supported design point with its weight

Design file format (JSON, orbit weights, not point weights):

  {"k": 6, "lower": 2, "upper": 4,
   "orbits": [{"k": 2, "weight": 0.3865}, ...]}

Exit codes: 0 success / check passed, 2 usage or file error,
3 singular or non-estimable region, 4 equivalence check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .construct import (
    _threshold_discriminant,
    narrow_design,
    threshold_b,
    wide_design,
)
from .exceptions import (
    OrbitDesignError,
    SingularDesignError,
    UnsupportedRegionError,
)
from .info_matrix import log_det_symmetric, model_dims
from .moments import MomentSet, design_moments
from .orbits import OrbitDesign, Region, enumerate_orbit, orbit_size
from .verify import KwReport, kw_check

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SINGULAR = 3
EXIT_KW_FAIL = 4

SOFT_MAX_K = 22

WIDE_TABLE_K = tuple(range(4, 13)) + (22,)
NARROW_TABLE_K = tuple(range(4, 23))


@dataclass(frozen=True)
class OrbitRow:
    k: int
    orbit_weight: float
    point_weight: float
    orbit_size: int


@dataclass(frozen=True)
class DesignReport:
    """Everything the optimal command prints for one design."""

    k_factors: int
    lower: int
    upper: int
    p: int
    regime: str
    orbits: list[OrbitRow]
    moments: MomentSet
    log_det: float
    d_efficiency: float
    kw_max_violation: float
    passed: bool


def _generate(k_factors: int, lower: int, upper: int, ell: Optional[int]):
    """Dispatch to the constructor matching the region; returns (design, regime)."""
    K = k_factors
    region = Region(K, lower, upper)
    disc = _threshold_discriminant(K) if K >= 2 else 0

    if not region.symmetric():
        effective = max(lower, K - upper)
        if K > 3:
            t = K - 2 * effective
            if t * t < disc:
                raise UnsupportedRegionError(
                    f"asymmetric bounds [{lower}, {upper}] are narrower than the "
                    f"threshold B_{K} = {threshold_b(K):.4f}; only wide asymmetric "
                    "bounds are supported"
                )
        spec = wide_design(K, effective, ell)
        return spec.design, _wide_regime_name(K, effective, disc)

    if K <= 3:
        spec = wide_design(K, lower, None)
        return spec.design, "full-factorial"

    t2 = (K - 2 * lower) ** 2
    if t2 >= disc:
        spec = wide_design(K, lower, ell)
        return spec.design, _wide_regime_name(K, lower, disc)
    if ell is not None:
        raise OrbitDesignError("--ell applies to the wide regime only")
    narrow = narrow_design(K, lower)
    return narrow.design, "narrow"


def _wide_regime_name(k_factors: int, lower: int, disc: int) -> str:
    if k_factors <= 3:
        return "full-factorial"
    return "threshold" if (k_factors - 2 * lower) ** 2 == disc else "wide"


def _build_report(
    design: OrbitDesign, lower: int, upper: int, regime: str, tol: float
) -> DesignReport:
    K = design.k_factors
    m = design_moments(design)
    dims = model_dims(K)
    ld = log_det_symmetric(K, m)
    eff = 0.0 if ld == -math.inf else math.exp(ld / dims.p)
    kw = kw_check(design, lower, upper, tol)
    rows = []
    for k, w in sorted(design.weights().items()):
        size = orbit_size(K, k)
        rows.append(OrbitRow(k, float(w), float(w) / size, size))
    return DesignReport(
        k_factors=K,
        lower=lower,
        upper=upper,
        p=dims.p,
        regime=regime,
        orbits=rows,
        moments=m.as_floats(),
        log_det=ld,
        d_efficiency=eff,
        kw_max_violation=kw.max_violation,
        passed=kw.passed,
    )


def _print_report(report: DesignReport, tol: float) -> None:
    print(
        f"K = {report.k_factors}  region: {report.lower} <= active <= "
        f"{report.upper}  p = {report.p}"
    )
    print(f"regime: {report.regime}")
    print(f"{'k':>4} {'orbit_weight':>14} {'point_weight':>14} {'size':>6}")
    for row in report.orbits:
        print(
            f"{row.k:>4} {row.orbit_weight:>14.8f} "
            f"{row.point_weight:>14.8f} {row.orbit_size:>6}"
        )
    m = report.moments
    print(f"moments: m1={m.m1:.8g} m2={m.m2:.8g} m3={m.m3:.8g} m4={m.m4:.8g}")
    print(f"log det = {report.log_det:.12g}   D-efficiency = {report.d_efficiency:.6f}")
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"KW check: max(psi - p) = {report.kw_max_violation:.3e} "
        f"(tol {tol:.0e}) -> {verdict}"
    )


def _design_payload(design: OrbitDesign, lower: int, upper: int) -> dict:
    return {
        "k": design.k_factors,
        "lower": lower,
        "upper": upper,
        "orbits": [
            {"k": k, "weight": float(w)} for k, w in sorted(design.weights().items())
        ],
    }


def _write_design_json(path: str, design: OrbitDesign, lower: int, upper: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_design_payload(design, lower, upper), fh, indent=2)
        fh.write("\n")


def _write_design_csv(path: str, design: OrbitDesign) -> None:
    K = design.k_factors
    lines = ["k,orbit_weight,point_weight,orbit_size"]
    for k, w in sorted(design.weights().items()):
        size = orbit_size(K, k)
        lines.append(f"{k},{float(w):.17g},{float(w) / size:.17g},{size}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _load_design_file(path: str, *, fold_symmetric: bool):
    """Parse and validate a design file; returns (design, k, lower, upper).

    Unknown keys are rejected, weights must be nonnegative and sum to 1
    within 1e-9 (then renormalized), and every orbit must lie inside the
    declared region.  With fold_symmetric=True the weight map must be
    mirror-symmetric and is folded into a structurally symmetric design.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise OrbitDesignError(f"cannot read design file {path}: {exc}") from exc

    if not isinstance(raw, dict):
        raise OrbitDesignError("design file must hold a JSON object")
    expected = {"k", "lower", "upper", "orbits"}
    if set(raw) != expected:
        unknown = set(raw) - expected
        missing = expected - set(raw)
        parts = []
        if unknown:
            parts.append(f"unknown keys {sorted(unknown)}")
        if missing:
            parts.append(f"missing keys {sorted(missing)}")
        raise OrbitDesignError("design file: " + ", ".join(parts))

    k_factors, lower, upper = raw["k"], raw["lower"], raw["upper"]
    for name, value in (("k", k_factors), ("lower", lower), ("upper", upper)):
        if not isinstance(value, int) or isinstance(value, bool):
            raise OrbitDesignError(f"design file: {name} must be an integer")
    Region(k_factors, lower, upper)

    if not isinstance(raw["orbits"], list) or not raw["orbits"]:
        raise OrbitDesignError("design file: orbits must be a nonempty list")
    weights: dict[int, float] = {}
    for entry in raw["orbits"]:
        if not isinstance(entry, dict) or set(entry) != {"k", "weight"}:
            raise OrbitDesignError(
                "design file: each orbit needs exactly the keys 'k' and 'weight'"
            )
        k, w = entry["k"], entry["weight"]
        if not isinstance(k, int) or isinstance(k, bool):
            raise OrbitDesignError("design file: orbit index must be an integer")
        if not isinstance(w, (int, float)) or isinstance(w, bool) or w < 0:
            raise OrbitDesignError(f"design file: invalid weight {w!r} at k={k}")
        if k in weights:
            raise OrbitDesignError(f"design file: duplicate orbit index {k}")
        if not lower <= k <= upper:
            raise OrbitDesignError(
                f"design file: orbit {k} outside the region [{lower}, {upper}]"
            )
        weights[k] = float(w)

    total = sum(weights.values())
    if abs(total - 1) > 1e-9:
        raise OrbitDesignError(f"design file: orbit weights sum to {total:.12g}, not 1")
    weights = {k: w / total for k, w in weights.items()}

    if not fold_symmetric:
        return OrbitDesign(k_factors, weights), k_factors, lower, upper

    folded: dict[int, float] = {}
    for k, w in weights.items():
        mirror = k_factors - k
        if abs(w - weights.get(mirror, 0.0)) > 1e-12:
            raise OrbitDesignError(
                "design file: weights are not sign-symmetric "
                f"(w[{k}] != w[{mirror}]); only symmetric designs can be verified"
            )
        low = min(k, mirror)
        folded[low] = (w + weights.get(mirror, 0.0)) / 2
    design = OrbitDesign(k_factors, folded, symmetric=True)
    return design, k_factors, lower, upper


def _cmd_optimal(args: argparse.Namespace) -> int:
    if args.k > SOFT_MAX_K:
        print(
            f"warning: K = {args.k} exceeds the tested range (K <= {SOFT_MAX_K}); "
            "proceeding anyway",
            file=sys.stderr,
        )
    upper = args.upper if args.upper is not None else args.k - args.lower
    design, regime = _generate(args.k, args.lower, upper, args.ell)
    report = _build_report(design, args.lower, upper, regime, args.tol)
    _print_report(report, args.tol)
    if args.json:
        _write_design_json(args.json, design, args.lower, upper)
    if args.csv:
        _write_design_csv(args.csv, design)
    return EXIT_OK if report.passed else EXIT_KW_FAIL


def _cmd_verify(args: argparse.Namespace) -> int:
    design, k_factors, lower, upper = _load_design_file(args.file, fold_symmetric=True)
    if args.lower is not None:
        lower = args.lower
    if args.upper is not None:
        upper = args.upper
    report = kw_check(design, lower, upper, args.tol)
    print(f"design: K = {k_factors}, region {lower} <= active <= {upper}")
    print(f"{'k':>4} {'psi(k)':>20} {'psi(k) - p':>14}")
    for k in sorted(report.per_orbit):
        value = report.per_orbit[k]
        print(f"{k:>4} {value:>20.12f} {value - report.p:>14.3e}")
    print("KW check: " + report.summary())
    return EXIT_OK if report.passed else EXIT_KW_FAIL


def _format_weight(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4f}"


def _wide_rows(k_factors: int) -> list[tuple]:
    """Rows (K, L, ell, c, w_L, w_ell, w_c, B_K) of the wide-bounds table."""
    K = k_factors
    disc = _threshold_discriminant(K)
    ells = [
        ell
        for ell in range(K // 2 + 1)
        if K <= (K - 2 * ell) ** 2 <= disc
    ]
    lowers = [low for low in range(K // 2 + 1) if (K - 2 * low) ** 2 >= disc]
    center = K // 2 if K % 2 == 0 else (K - 1) // 2
    rows = []
    for low in lowers:
        for ell in ells:
            if ell < low:
                continue
            # ell == low happens only when low sits exactly at the threshold;
            # that is the two-orbit row, printed without an ell entry.
            spec = wide_design(K, low, None if ell == low else ell)
            design = spec.design
            w_low = float(design.weight(low)) if design.weight(low) else None
            w_ell = None
            if ell != low and design.weight(ell):
                w_ell = float(design.weight(ell))
            rows.append(
                (
                    K,
                    low,
                    None if ell == low else ell,
                    center,
                    w_low,
                    w_ell,
                    float(design.weight(center)),
                    threshold_b(K),
                )
            )
    return rows


def _narrow_rows(k_factors: int) -> list[tuple]:
    """Rows (K, L, c, w_L, w_c, efficiency, B_K) of the narrow-bounds table.

    Lower bounds range over (K - sqrt(3K - 2))/2 < L < K/2; for odd K the
    value L with (K - 2L)^2 = 3K - 2 is excluded here (matching the
    published listing) although narrow_design handles it.
    """
    K = k_factors
    center = K // 2 if K % 2 == 0 else (K - 1) // 2
    rows = []
    for low in range(K // 2 + 1):
        if (K - 2 * low) ** 2 >= 3 * K - 2:
            continue
        if low >= center:
            continue
        spec = narrow_design(K, low)
        rows.append(
            (
                K,
                low,
                center,
                spec.w_star,
                float(spec.design.weight(center)),
                spec.d_efficiency,
                threshold_b(K),
            )
        )
    return rows


def _cmd_tables(args: argparse.Namespace) -> int:
    if args.k is not None and not 4 <= args.k <= 22:
        raise OrbitDesignError(f"tables cover 4 <= K <= 22, got {args.k}")
    lines: list[str] = []
    if args.which in ("wide", "both"):
        lines.append("K L ell c w_L w_ell w_c B_K")
        ks = (args.k,) if args.k is not None else WIDE_TABLE_K
        for key in ks:
            for row in _wide_rows(key):
                K, low, ell, center, w_low, w_ell, w_c, b_k = row
                lines.append(
                    f"{K} {low} {'-' if ell is None else ell} {center} "
                    f"{_format_weight(w_low)} {_format_weight(w_ell)} "
                    f"{_format_weight(w_c)} {b_k:.2f}"
                )
    if args.which in ("narrow", "both"):
        lines.append("K L c w_L w_c efficiency B_K")
        ks = (args.k,) if args.k is not None else NARROW_TABLE_K
        for key in ks:
            for row in _narrow_rows(key):
                K, low, center, w_low, w_c, eff, b_k = row
                lines.append(
                    f"{K} {low} {center} {w_low:.4f} {w_c:.4f} {eff:.4f} {b_k:.2f}"
                )
    output = "\n".join(lines) + "\n"
    sys.stdout.write(output)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(line.replace(" ", ",") for line in lines) + "\n")
    return EXIT_OK


def _point_string(x: Sequence[int]) -> str:
    return "".join("+" if entry == 1 else "-" for entry in x)


def _cmd_expand(args: argparse.Namespace) -> int:
    if args.file is not None:
        design, k_factors, lower, upper = _load_design_file(
            args.file, fold_symmetric=False
        )
    else:
        if args.k is None or args.lower is None:
            raise OrbitDesignError("expand needs either a design file or --k and --lower")
        k_factors = args.k
        upper = args.upper if args.upper is not None else k_factors - args.lower
        design, _ = _generate(k_factors, args.lower, upper, args.ell)

    header = "k,point,point_weight"
    if args.n is not None:
        header += ",count"
    lines = [header]
    total_count = 0
    for k in design.support():
        weight = float(design.weight(k)) / orbit_size(k_factors, k)
        for x in enumerate_orbit(k_factors, k):
            line = f"{k},{_point_string(x)},{weight:.17g}"
            if args.n is not None:
                count = round(args.n * weight)
                total_count += count
                line += f",{count}"
            lines.append(line)
    output = "\n".join(lines) + "\n"
    sys.stdout.write(output)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(output)
    if args.n is not None:
        note = (
            f"note: naive rounded counts sum to {total_count} "
            f"(target N = {args.n}); optimal rounding to an exact design "
            "is out of scope"
        )
        print(note, file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitdesign",
        description=(
            "D-optimal designs for two-level interaction models when the "
            "number of active factors is bounded from both sides"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimal", help="construct and certify the optimal design")
    p_opt.add_argument("--k", type=int, required=True, help="number of factors K")
    p_opt.add_argument(
        "--lower", type=int, required=True, help="minimal number of active factors"
    )
    p_opt.add_argument(
        "--upper", type=int, default=None,
        help="maximal number of active factors (default: K - lower)",
    )
    p_opt.add_argument(
        "--ell", type=int, default=None,
        help="intermediate orbit index for the wide regime (default: smallest admissible)",
    )
    p_opt.add_argument("--tol", type=float, default=1e-9, help="KW check tolerance")
    p_opt.add_argument("--json", metavar="PATH", help="write the design file here")
    p_opt.add_argument("--csv", metavar="PATH", help="write orbit weights as CSV")

    p_ver = sub.add_parser("verify", help="equivalence-theorem check of a design file")
    p_ver.add_argument("file", help="design file (JSON)")
    p_ver.add_argument("--lower", type=int, default=None, help="override region lower bound")
    p_ver.add_argument("--upper", type=int, default=None, help="override region upper bound")
    p_ver.add_argument("--tol", type=float, default=1e-9, help="KW check tolerance")

    p_tab = sub.add_parser("tables", help="regenerate the optimal-design tables")
    p_tab.add_argument(
        "--which", choices=("wide", "narrow", "both"), default="both",
        help="which table to print",
    )
    p_tab.add_argument("--k", type=int, default=None, help="restrict to one K")
    p_tab.add_argument("--csv", metavar="PATH", help="also write CSV here")

    p_exp = sub.add_parser("expand", help="list all supported design points")
    p_exp.add_argument("file", nargs="?", help="design file (JSON); omit to construct one")
    p_exp.add_argument("--k", type=int, default=None, help="number of factors K")
    p_exp.add_argument("--lower", type=int, default=None, help="minimal active count")
    p_exp.add_argument("--upper", type=int, default=None, help="maximal active count")
    p_exp.add_argument("--ell", type=int, default=None, help="intermediate orbit (wide regime)")
    p_exp.add_argument("--n", type=int, default=None, help="sample size for rounded counts")
    p_exp.add_argument("--csv", metavar="PATH", help="also write CSV here")
    return parser


_HANDLERS = {
    "optimal": _cmd_optimal,
    "verify": _cmd_verify,
    "tables": _cmd_tables,
    "expand": _cmd_expand,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (SingularDesignError, UnsupportedRegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except OrbitDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
