"""Command-line front end.

Every command prints a JSON report to stdout. With ``--out DIR`` the report
is also written to ``DIR/report.json`` and any curve to ``DIR/curve.csv``.

Exit codes: 0 success, 2 usage or validation error, 1 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .densities import FAMILIES as DENSITY_FAMILIES
from .densities import make_density
from .digitcore import canonicalize, empirical_block_freq, empirical_profile
from .embridge import em_decompose, profile_from_density
from .errors import LeadDigitsError, ValidationError
from .inversion import BoxSumProblem, invert_box_sum
from .profile import format_curve, parse_curve
from .profiles import ANALYTIC_FAMILIES, WindowSpec, benford_profile, first_digit_vector, make_profile, windowed_profile_from_cdf
from .statfit import MIN_BOOT, chi_square_benford, first_digit_table, fit_report, kl_benford, sample

MIN_GRID = 11
_ALIASES = {"power-law": "powerlaw"}
_THOUSANDS = re.compile(r"^\s*[+-]?\d{1,3}(,\d{3})+(\.\d*)?\s*$")


class UsageError(Exception):
    """Bad flags or inputs; maps to exit code 2."""


# input ------------------------------------------------------------------------


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def read_column(path: str, column: str | None) -> tuple[list[str], bytes]:
    """Read one column of a headed CSV file as raw text cells."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    text = raw.decode("utf-8-sig")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise UsageError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if column is None:
        idx = 0
    elif column in header:
        idx = header.index(column)
    elif column.isdigit() and int(column) < len(header):
        idx = int(column)
    else:
        raise UsageError(f"column {column!r} not found; header is {header}")
    cells = [r[idx] if idx < len(r) else "" for r in rows[1:]]
    for c in cells:
        if _THOUSANDS.match(c):
            raise UsageError(f"thousands separators are not accepted: {c!r}")
    return cells, raw


def _parse_params(text: str | None) -> dict:
    params: dict = {}
    if not text:
        return params
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not of the form key=value")
        key, value = (p.strip() for p in item.split("=", 1))
        try:
            num = float(value)
            params[key] = int(num) if num.is_integer() and re.fullmatch(r"[+-]?\d+", value) else num
        except ValueError:
            params[key] = value
    return params


def _provenance(input_hash: str, seed) -> dict:
    return {"input_sha256": input_hash, "seed": seed, "version": __version__}


def _emit(args, report: dict, curve: str | None = None) -> None:
    text = json.dumps(report, indent=2)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n", encoding="utf-8")
        if curve is not None:
            (out / "curve.csv").write_text(curve, encoding="utf-8")
    print(text)


def _grid(args) -> int:
    if args.grid < MIN_GRID:
        raise UsageError(f"--grid must be at least {MIN_GRID}")
    return args.grid


# commands ---------------------------------------------------------------------


def _digit_report(data, m: int, grid: int) -> tuple[dict, str]:
    if len(data) == 0:
        raise UsageError("no usable values after canonicalization")
    table = first_digit_table(data)
    blocks = empirical_block_freq(data, m)
    prof = empirical_profile(data)
    s, g = prof.curve(grid)
    report = {
        "n_kept": len(data),
        "n_dropped": data.n_dropped,
        "first_digits": table.to_dict(),
        "chi2": chi_square_benford(table),
        "kl": kl_benford(table),
        "blocks": {"order": m, "entries": {str(k): v for k, v in blocks.entries.items()}},
        "sup_distance_to_benford": prof.sup_distance(benford_profile()),
    }
    return report, format_curve(s, g)


def cmd_analyze(args) -> None:
    cells, raw = read_column(args.input, args.column)
    data = canonicalize(cells)
    report, curve = _digit_report(data, args.block_len, _grid(args))
    report = {"command": "analyze", **report, "provenance": _provenance(_sha256(raw), None)}
    _emit(args, report, curve)


def _family_profile(family: str, params: dict):
    family = _ALIASES.get(family, family)
    if family in ANALYTIC_FAMILIES:
        return make_profile(family, params)
    if family in DENSITY_FAMILIES:
        if family == "product-uniforms" and "N" in params:
            params = {"n_factors": params.pop("N"), **params}
        return profile_from_density(make_density(family, **params))
    raise UsageError(f"unknown family {family!r}")


def _params_hash(*parts) -> str:
    return _sha256(json.dumps(parts, sort_keys=True, default=str).encode())


def cmd_profile(args) -> None:
    if not args.family:
        raise UsageError("--family is required")
    params = _parse_params(args.params)
    prof = _family_profile(args.family, dict(params))
    s, g = prof.curve(_grid(args))
    report = {
        "command": "profile",
        "family": args.family,
        "params": params,
        "first_digit_vector": dict(zip(range(1, 10), first_digit_vector(prof).tolist())),
        "G_half": float(prof(0.5)),
        "provenance": _provenance(_params_hash(args.family, params, args.grid), None),
    }
    _emit(args, report, format_curve(s, g))


def cmd_invert(args) -> None:
    if args.window is None:
        raise UsageError("--window m n is required")
    try:
        window = WindowSpec(*args.window)
    except LeadDigitsError as exc:
        raise UsageError(str(exc)) from None
    if args.input:
        raw = Path(args.input).read_bytes() if Path(args.input).exists() else None
        if raw is None:
            raise UsageError(f"cannot read {args.input}")
        target = parse_curve(raw.decode("utf-8-sig"))
        digest = _sha256(raw)
    elif args.family:
        params = _parse_params(args.params)
        dens = make_density(args.family, **params)
        target = windowed_profile_from_cdf(dens.cdf, window, dens.pdf)
        digest = _params_hash(args.family, params, args.window)
    else:
        raise UsageError("give a target curve with --input or a density with --family")
    rec = invert_box_sum(BoxSumProblem(window, target, args.grid))
    report = {"command": "invert", **rec.to_dict(), "provenance": _provenance(digest, None)}
    _emit(args, report)


def cmd_fit(args) -> None:
    for flag, value in (("--boot-ks", args.boot_ks), ("--boot-chi2", args.boot_chi2)):
        if value < MIN_BOOT:
            raise UsageError(f"{flag} must be at least {MIN_BOOT} for a stable bootstrap p-value")
    cells, raw = read_column(args.input, args.column)
    data = canonicalize(cells)
    if len(data) < 3:
        raise UsageError("fitting needs at least 3 usable values")
    rep = fit_report(data, args.boot_ks, args.boot_chi2, args.bins, args.seed)
    report = {"command": "fit", **rep.to_dict(), "provenance": _provenance(_sha256(raw), args.seed)}
    _emit(args, report)


def cmd_em(args) -> None:
    if not args.family:
        raise UsageError("--family is required")
    params = _parse_params(args.params)
    p = dict(params)
    if args.family == "product-uniforms" and "N" in p:
        p = {"n_factors": p.pop("N"), **p}
    dens = make_density(_ALIASES.get(args.family, args.family), **p)
    lo, hi = args.k
    if not 1 <= lo <= hi:
        raise UsageError("--k needs 1 <= first <= last")
    rows = [em_decompose(dens, k, args.tol).to_dict() for k in range(lo, hi + 1)]
    report = {
        "command": "em",
        "family": args.family,
        "params": params,
        "tol": args.tol,
        "rows": rows,
        "provenance": _provenance(_params_hash(args.family, params, args.k, args.tol), None),
    }
    _emit(args, report)


def cmd_simulate(args) -> None:
    if not args.family:
        raise UsageError("--family is required")
    params = _parse_params(args.params)
    data = sample(args.family, args.n, args.seed, **dict(params))
    report, curve = _digit_report(data, args.block_len, _grid(args))
    report = {
        "command": "simulate",
        "family": args.family,
        "params": params,
        "n": args.n,
        **report,
        "provenance": _provenance(_params_hash(args.family, params, args.n), args.seed),
    }
    _emit(args, report, curve)


# parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leaddigits", description="Leading-digit analysis toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, grid=1001):
        p.add_argument("--out", help="directory for report.json and curve.csv")
        p.add_argument("--grid", type=int, default=grid, help="curve points (inversion: points per decade)")

    p = sub.add_parser("analyze", help="first-digit table, chi2, KL, block table and profile of a CSV column")
    p.add_argument("--input", required=True)
    p.add_argument("--column")
    p.add_argument("--block-len", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("profile", help="curve and digit vector of a named family")
    p.add_argument("--family")
    p.add_argument("--params")
    common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("invert", help="reconstruct a CDF from a windowed profile")
    p.add_argument("--input", help="target curve CSV with header s,G")
    p.add_argument("--family", help="build the target from a density instead")
    p.add_argument("--params")
    p.add_argument("--window", nargs=2, type=int, metavar=("M", "N"))
    common(p, grid=2048)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("fit", help="Weibull fit with bootstrap goodness of fit")
    p.add_argument("--input", required=True)
    p.add_argument("--column")
    p.add_argument("--boot-ks", type=int, default=300)
    p.add_argument("--boot-chi2", type=int, default=400)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("em", help="J1/J3 decomposition of block frequencies")
    p.add_argument("--family")
    p.add_argument("--params")
    p.add_argument("--k", nargs=2, type=int, default=(1, 9), metavar=("FIRST", "LAST"))
    p.add_argument("--tol", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=cmd_em)

    p = sub.add_parser("simulate", help="sample a family and analyze the sample")
    p.add_argument("--family")
    p.add_argument("--params")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--block-len", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", 1.0) <= 0 or not math.isfinite(getattr(args, "tol", 1.0)):
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (UsageError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except (LeadDigitsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
