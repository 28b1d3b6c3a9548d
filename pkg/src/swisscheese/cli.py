"""Command line: ``swisscheese build | verify | render | witness``."""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path
from typing import Sequence

from .construction import EmptyWermerProvider, StubWermerProvider, assemble_theorem_one, build_regular_cheese
from .errors import BudgetError, DomainError, ResourceError, SearchExhausted
from .persist import FormatError, dumps_report, read_config, write_config
from .render import Window, family_window, render_config, render_level
from . import verify as V

EXIT_OK, EXIT_IO, EXIT_BUDGET, EXIT_RESOURCE, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4, 5
EXIT_DOMAIN = 2

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"^([+-]?{_NUM})$")
_IMAG = re.compile(rf"^([+-]?)({_NUM})?[ij]$")
_FULL = re.compile(rf"^([+-]?{_NUM})([+-])({_NUM})?[ij]$")

DEFAULT_RANGES = {
    "h-bounds": range(3, 9),
    "level-family": range(3, 9),
    "convergence": range(4, 8),
    "nonvanishing": range(4, 9),
    "residue-oracle": range(0, 1),
}
DEFAULT_SAMPLES = {"convergence": 1000, "nonvanishing": 100, "residue-oracle": 100}


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` literals: ``0.5``, ``-2i``, ``i``, ``1e-3-2.5e-2i`` (``j`` also accepted)."""
    t = text.strip().replace(" ", "")
    if m := _REAL.match(t):
        return complex(float(m.group(1)), 0.0)
    if m := _IMAG.match(t):
        im = float(m.group(2)) if m.group(2) else 1.0
        return complex(0.0, -im if m.group(1) == "-" else im)
    if m := _FULL.match(t):
        im = float(m.group(3)) if m.group(3) else 1.0
        return complex(float(m.group(1)), -im if m.group(2) == "-" else im)
    raise ValueError(f"malformed complex literal {text!r}")


def parse_range(text: str) -> range:
    """``3..6`` (inclusive) or a single integer."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
    else:
        lo = hi = int(text)
    if hi < lo:
        raise ValueError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _print_ledger(cfg, out) -> None:
    led = cfg.ledger
    print(f"C = {cfg.C!r}, C0 = {cfg.C0!r}, L = {cfg.L}, levels = {cfg.n_levels}, n_cap = {cfg.n_cap}", file=out)
    print(f"families: {led.families} (materialized discs {led.materialized_discs})", file=out)
    print(f"McKissick cross budget: {led.mckissick_cross!r}", file=out)
    print(f"McKissick boundary budget: {led.mckissick_boundary!r} (< C0 = {cfg.C0!r})", file=out)
    print(f"Wermer discs: {led.wermer_discs}, boundary budget {led.wermer_boundary!r}", file=out)
    print(f"sum c_n/s_n^2: {led.combined_integral!r}; 2 * sum = {led.integral_bound_factor!r}", file=out)


def cmd_build(args) -> int:
    provider = EmptyWermerProvider() if args.provider == "none" else StubWermerProvider(args.seed)
    desc = {"kind": "none"} if args.provider == "none" else {
        "kind": "stub", "seed": provider.seed, "per_level": provider.per_level, "fill": provider.fill
    }
    try:
        cfg = assemble_theorem_one(args.C, args.L, args.levels, provider, args.n_cap, args.seed)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    try:
        write_config(args.out, cfg, desc)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    _print_ledger(cfg, sys.stdout)
    return EXIT_OK


def _load(path):
    try:
        return read_config(path), None
    except (OSError, FormatError) as exc:
        return None, f"cannot read configuration {path}: {exc}"
    except BudgetError as exc:
        return None, f"configuration fails its budget invariant: {exc}"


def cmd_verify(args) -> int:
    suites = [V.suite_name(args.suite)]
    if suites == ["all"]:
        suites = [s for s in V.SUITES if s not in V.CONFIG_SUITES or args.config]
    cfg = None
    if any(s in V.CONFIG_SUITES for s in suites):
        if not args.config:
            print("this suite needs --config", file=sys.stderr)
            return EXIT_IO
        cfg, err = _load(args.config)
        if err:
            print(err, file=sys.stderr)
            return EXIT_IO
    reports = []
    for s in suites:
        if s in V.CONFIG_SUITES:
            reports.extend(V.config_reports(s, cfg))
            continue
        n_range = args.n if args.n is not None else DEFAULT_RANGES[s]
        samples = args.samples if args.samples is not None else DEFAULT_SAMPLES.get(s, V.DEFAULT_SAMPLES)
        reports.extend(V.run_jobs(V.suite_jobs(s, n_range, samples, args.seed), args.workers))
    text = dumps_report(args.suite, reports)
    try:
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        if args.figures:
            from .figures import level_sup_figure, margin_figure

            fig_dir = Path(args.figures)
            fig_dir.mkdir(parents=True, exist_ok=True)
            margin_figure(reports, fig_dir / "margins.png", title=args.suite)
            level_sup_figure(reports, fig_dir / "level_sups.png")
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in reports:
        print(f"{r.verdict.upper():12s} {r.check_id} {r.params}", file=sys.stderr)
    verdicts = {r.verdict for r in reports}
    if V.FAIL in verdicts:
        return EXIT_FAIL
    if V.INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _parse_window(text: str) -> Window:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise ValueError("window needs xmin,xmax,ymin,ymax")
    return Window(*parts)


def cmd_render(args) -> int:
    try:
        window = _parse_window(args.window) if args.window else None
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    if args.level is not None:
        try:
            svg = render_level(args.level, window)
        except ResourceError as exc:
            print(f"resource error: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
    else:
        if not args.config:
            print("render needs --config or --level", file=sys.stderr)
            return EXIT_IO
        cfg, err = _load(args.config)
        if err:
            print(err, file=sys.stderr)
            return EXIT_IO
        if args.family is not None:
            try:
                window = family_window(cfg, args.family)
            except ValueError as exc:
                print(str(exc), file=sys.stderr)
                return EXIT_IO
        svg = render_config(cfg, window, color_by_provenance=not args.no_color)
    try:
        Path(args.out).write_text(svg, encoding="utf-8")
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_witness(args) -> int:
    try:
        z0 = parse_complex(args.z0)
        B = [parse_complex(b) for item in args.B for b in item.split(",") if b.strip()]
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    if args.config:
        cfg, err = _load(args.config)
        if err:
            print(err, file=sys.stderr)
            return EXIT_IO
    else:
        cfg = build_regular_cheese(1.0, 8)
    try:
        w = V.regularity_witness(z0, B, cfg, args.cap)
    except SearchExhausted as exc:
        print(f"search exhausted: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(f"index l = {w.index}")
    print(f"disc D_l = {w.target} ({w.cls.value})")
    print(f"m = {w.m}, n_max = {w.n_max}")
    print(f"log10 |f_l(z0)| >= {w.log10_lower_z0!r}")
    print(f"log10 max_B |f_l,n_max| <= {w.log10_max_B!r}")
    print(f"separation {w.separation!r} decades: {'success' if w.success else 'not reached'}")
    return EXIT_OK if w.success else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swisscheese", description="Swiss-cheese set construction and certification.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a configuration file")
    b.add_argument("--C", type=float, default=4 * math.pi, help="integral budget constant (C0 = C/(4 pi))")
    b.add_argument("--L", type=int, default=8, help="number of enumerated target discs")
    b.add_argument("--n-cap", type=int, default=None, help="truncation level (default: each family's start index)")
    b.add_argument("--levels", type=int, default=0, help="number of Wermer-layer scale levels")
    b.add_argument("--provider", choices=("stub", "none"), default="stub")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run a certification suite")
    v.add_argument("--config")
    v.add_argument("--suite", default="all", choices=list(V.SUITES) + list(V.SUITE_ALIASES) + ["all"])
    v.add_argument("--n", type=parse_range, default=None, help="level range such as 3..6")
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--workers", type=int, default=None, help="default: $SWISSCHEESE_WORKERS or 1")
    v.add_argument("--out", help="report path (default: standard output)")
    v.add_argument("--figures", help="directory for PNG figures")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="write an SVG picture")
    r.add_argument("--config")
    r.add_argument("--level", type=int, default=None, help="draw the level family A(n) instead of a configuration")
    r.add_argument("--family", type=int, default=None, help="zoom onto the family with this index")
    r.add_argument("--window", help="xmin,xmax,ymin,ymax")
    r.add_argument("--no-color", action="store_true", help="do not color discs by provenance")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)

    w = sub.add_parser("witness", help="find a regularity witness")
    w.add_argument("--config")
    w.add_argument("--z0", required=True)
    w.add_argument("--B", action="append", required=True, help="points of B, comma separated or repeated")
    w.add_argument("--cap", type=int, default=1000, help="enumeration search cap")
    w.set_defaults(func=cmd_witness)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
