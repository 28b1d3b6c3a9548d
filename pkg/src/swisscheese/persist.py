"""Configuration (JSON) and report (CSV) files.

Floats are written with ``repr`` (shortest round-trip decimal), rationals as
``"p/q"`` strings and complex numbers as ``[re, im]`` pairs, so reading a file back
rebuilds an equal :class:`CheeseConfig`. Neither format carries timestamps: equal
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import platform
from fractions import Fraction
from importlib import metadata
from pathlib import Path
from typing import Iterable

import numpy as np

from .construction import (
    CheeseConfig,
    Deletion,
    Ledger,
    LevelRecord,
    McKissick,
    TransplantedFamily,
    Wermer,
)
from .geometry import Disc, DiscClass, RationalDisc, Square
from .verify import CertReport

CONFIG_FORMAT = "swisscheese-config"
CONFIG_VERSION = 1
REPORT_VERSION = 1
REPORT_COLUMNS = (
    "check_id", "params", "measured", "bound", "margin", "verdict",
    "sense", "scale", "samples", "seed", "notes",
)


class FormatError(ValueError):
    pass


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _family_to_dict(f: TransplantedFamily) -> dict:
    return {
        "index": f.index,
        "target": {"x": _frac(f.target.x), "y": _frac(f.target.y), "r": _frac(f.target.r)},
        "class": f.cls.value,
        "epsilon": f.epsilon,
        "unit_epsilon": f.unit_epsilon,
        "m": f.m,
        "n_max": f.n_max,
        "levels": [
            {"level": lv.level, "cross": lv.cross_budget, "boundary": lv.boundary_budget,
             "method": lv.method, "retained": lv.retained}
            for lv in f.levels
        ],
        "tail_cross": f.tail_cross,
        "tail_boundary": f.tail_boundary,
    }


def _family_from_dict(d: dict) -> TransplantedFamily:
    t = d["target"]
    return TransplantedFamily(
        d["index"],
        RationalDisc(Fraction(t["x"]), Fraction(t["y"]), Fraction(t["r"])),
        DiscClass(d["class"]),
        d["epsilon"],
        d["unit_epsilon"],
        d["m"],
        d["n_max"],
        tuple(LevelRecord(lv["level"], lv["cross"], lv["boundary"], lv["method"], lv["retained"]) for lv in d["levels"]),
        d["tail_cross"],
        d["tail_boundary"],
    )


def _deletion_to_dict(d: Deletion) -> dict:
    p = d.provenance
    prov = {"tag": "wermer", "n": p.n, "k": p.k} if isinstance(p, Wermer) else {"tag": "mckissick", "l": p.l, "level": p.level}
    return {"center": _c(d.disc.center), "radius": d.disc.radius, "provenance": prov}


def _deletion_from_dict(d: dict) -> Deletion:
    p = d["provenance"]
    prov = Wermer(p["n"], p["k"]) if p["tag"] == "wermer" else McKissick(p["l"], p["level"])
    return Deletion(Disc(complex(*d["center"]), d["radius"]), prov)


def config_to_dict(cfg: CheeseConfig, provider: dict | None = None) -> dict:
    led = cfg.ledger
    return {
        "format": CONFIG_FORMAT,
        "version": CONFIG_VERSION,
        "parameters": {
            "C": cfg.C, "C0": cfg.C0, "L": cfg.L, "n_levels": cfg.n_levels,
            "n_cap": cfg.n_cap, "seed": cfg.seed, "provider": provider,
        },
        "square": {"center": _c(cfg.square.center), "half_width": cfg.square.half_width},
        "families": [_family_to_dict(f) for f in cfg.families],
        "deletions": [_deletion_to_dict(d) for d in cfg.deletions],
        "ledger": {
            "mckissick_cross": led.mckissick_cross,
            "mckissick_boundary": led.mckissick_boundary,
            "wermer_lengths": list(led.wermer_lengths),
            "wermer_boundary": led.wermer_boundary,
            "combined_integral": led.combined_integral,
            "families": led.families,
            "materialized_discs": led.materialized_discs,
            "wermer_discs": led.wermer_discs,
        },
    }


def config_from_dict(d: dict) -> CheeseConfig:
    if d.get("format") != CONFIG_FORMAT:
        raise FormatError("not a configuration file")
    if d.get("version") != CONFIG_VERSION:
        raise FormatError(f"unsupported configuration version {d.get('version')!r}")
    p, led, sq = d["parameters"], d["ledger"], d["square"]
    ledger = Ledger(
        led["mckissick_cross"], led["mckissick_boundary"], tuple(led["wermer_lengths"]),
        led["wermer_boundary"], led["combined_integral"], led["families"],
        led["materialized_discs"], led["wermer_discs"],
    )
    return CheeseConfig(
        p["C"], p["C0"], p["L"], p["n_levels"], p["n_cap"], p["seed"],
        tuple(_family_from_dict(f) for f in d["families"]),
        tuple(_deletion_from_dict(x) for x in d["deletions"]),
        ledger,
        Square(complex(*sq["center"]), sq["half_width"]),
    )


def dumps_config(cfg: CheeseConfig, provider: dict | None = None) -> str:
    return json.dumps(config_to_dict(cfg, provider), sort_keys=True, indent=1, allow_nan=False) + "\n"


def loads_config(text: str) -> CheeseConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(str(exc)) from exc
    try:
        return config_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed configuration: {exc}") from exc


def write_config(path, cfg: CheeseConfig, provider: dict | None = None) -> None:
    Path(path).write_text(dumps_config(cfg, provider), encoding="utf-8")


def read_config(path) -> CheeseConfig:
    return loads_config(Path(path).read_text(encoding="utf-8"))


# -- reports --------------------------------------------------------------------------


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def environment() -> dict[str, str]:
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {"package": version, "python": platform.python_version(), "numpy": np.__version__}


def dumps_report(suite: str, reports: Iterable[CertReport]) -> str:
    buf = io.StringIO()
    buf.write(f"# swisscheese-report version {REPORT_VERSION}\n")
    buf.write(f"# suite {suite}\n")
    for k, v in environment().items():
        buf.write(f"# {k} {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow([
            r.check_id,
            json.dumps(r.params, sort_keys=True),
            _num(r.measured),
            _num(r.bound),
            _num(r.margin),
            r.verdict,
            r.sense,
            r.scale,
            r.samples,
            _num(r.seed),
            r.notes,
        ])
    return buf.getvalue()


def write_report(path, suite: str, reports: Iterable[CertReport]) -> None:
    Path(path).write_text(dumps_report(suite, reports), encoding="utf-8")


def loads_report(text: str) -> tuple[dict[str, str], list[CertReport]]:
    """Header metadata and rows of a report file."""
    meta: dict[str, str] = {}
    pos = 0
    # header lines come first; quoted fields below may contain newlines
    while text.startswith("# ", pos):
        end = text.find("\n", pos)
        end = len(text) if end < 0 else end
        key, _, value = text[pos + 2 : end].partition(" ")
        meta[key] = value
        pos = end + 1
    rows = list(csv.DictReader(io.StringIO(text[pos:], newline="")))
    out = []
    for row in rows:
        verdict = row["verdict"]
        out.append(CertReport(
            row["check_id"],
            json.loads(row["params"]),
            float(row["measured"]),
            float(row["bound"]),
            int(row["samples"]),
            int(row["seed"]) if row["seed"] else None,
            row["sense"],
            row["scale"],
            row["notes"],
            verdict if verdict in ("inconclusive", "inapplicable") else None,
        ))
    return meta, out


def read_report(path) -> tuple[dict[str, str], list[CertReport]]:
    return loads_report(Path(path).read_text(encoding="utf-8"))
