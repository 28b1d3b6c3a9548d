from __future__ import annotations

import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swisscheese.cli import (
    EXIT_DOMAIN,
    EXIT_FAIL,
    EXIT_IO,
    EXIT_OK,
    EXIT_RESOURCE,
    main,
    parse_complex,
    parse_range,
)
from swisscheese.persist import read_config, read_report


@pytest.mark.parametrize(
    "text,value",
    [("0.5", 0.5), ("-2i", -2j), ("i", 1j), ("-i", -1j), ("1e-3-2.5e-2i", 1e-3 - 2.5e-2j),
     ("1+i", 1 + 1j), (" 3 - 4j ", 3 - 4j), (".5+.25i", 0.5 + 0.25j)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "1+", "i1", "1+2", "2ii", "abc"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_parse_complex_round_trip(a, b):
    text = f"{a!r}{'+' if math.copysign(1, b) > 0 else '-'}{abs(b)!r}i"
    assert parse_complex(text) == complex(a, b)


def test_parse_range():
    assert parse_range("3..6") == range(3, 7)
    assert parse_range("5") == range(5, 6)
    with pytest.raises(ValueError):
        parse_range("6..3")


def test_build_and_render(tmp_path, capsys):
    cfg = tmp_path / "x.json"
    assert main(["build", "--L", "4", "--levels", "2", "--out", str(cfg)]) == EXIT_OK
    assert "McKissick boundary budget" in capsys.readouterr().out
    assert read_config(cfg).L == 4
    svg = tmp_path / "x.svg"
    assert main(["render", "--config", str(cfg), "--out", str(svg)]) == EXIT_OK
    assert svg.read_text().count("<circle") == 8
    assert main(["render", "--config", str(cfg), "--family", "2", "--out", str(svg)]) == EXIT_OK
    assert main(["render", "--level", "3", "--out", str(svg)]) == EXIT_OK
    assert svg.read_text().count("<circle") == 192
    assert main(["render", "--level", "14", "--out", str(svg)]) == EXIT_RESOURCE
    assert main(["render", "--out", str(svg)]) == EXIT_IO
    assert main(["render", "--config", str(tmp_path / "missing.json"), "--out", str(svg)]) == EXIT_IO


def test_verify_exit_codes(tmp_path):
    out = tmp_path / "r.csv"
    figs = tmp_path / "figs"
    # clauses (iii) and (iv) fail at small n, so the level-family suite exits with 4
    code = main(["verify", "--suite", "lemma2.4", "--n", "3..4", "--samples", "256",
                 "--out", str(out), "--figures", str(figs)])
    assert code == EXIT_FAIL
    meta, reports = read_report(out)
    assert meta["suite"] == "lemma2.4"
    failed = {r.check_id for r in reports if r.verdict == "fail"}
    assert failed == {"level.iii", "level.iv"}
    assert (figs / "margins.png").exists() and (figs / "level_sups.png").exists()
    assert main(["verify", "--suite", "h-bounds", "--n", "3..4", "--samples", "256", "--out", str(out)]) == EXIT_OK
    assert main(["verify", "--suite", "budget"]) == EXIT_IO


def test_verify_config_suites(tmp_path):
    cfg = tmp_path / "x.json"
    assert main(["build", "--C", str(4 * math.pi), "--L", "8", "--levels", "4", "--out", str(cfg)]) == EXIT_OK
    out = tmp_path / "r.csv"
    assert main(["verify", "--config", str(cfg), "--suite", "budget", "--out", str(out)]) == EXIT_OK
    assert main(["verify", "--config", str(cfg), "--suite", "derivation", "--out", str(out)]) == EXIT_OK
    _, reports = read_report(out)
    assert [r.check_id for r in reports] == ["derivation.sum", "derivation.C"]
    assert reports[1].measured == pytest.approx(2 * math.pi, abs=1e-8)


def test_witness_exit_codes(tmp_path, capsys):
    assert main(["witness", "--z0", "0", "--B", "0.9,0.9i"]) == EXIT_OK
    assert "success" in capsys.readouterr().out
    assert main(["witness", "--z0", "1+", "--B", "0.9"]) == EXIT_IO
    cfg = tmp_path / "x.json"
    main(["build", "--L", "2", "--levels", "1", "--out", str(cfg)])
    centre = read_config(cfg).deletions[0].disc.center
    z0 = f"{centre.real!r}{'+' if centre.imag >= 0 else '-'}{abs(centre.imag)!r}i"
    assert main(["witness", "--config", str(cfg), f"--z0={z0}", "--B=0.9"]) == EXIT_DOMAIN
    assert main(["witness", "--z0=0.5+0.5i", "--B=0.51+0.5i", "--cap", "3"]) == EXIT_FAIL


def test_module_entry_point(tmp_path):
    out = tmp_path / "c.json"
    proc = subprocess.run([sys.executable, "-m", "swisscheese", "build", "--L", "1", "--out", str(out)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
