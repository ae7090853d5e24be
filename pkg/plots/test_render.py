import csv
from pathlib import Path

import pytest

import render

GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.mark.parametrize(
    "kind, name",
    [
        ("heatmap", "field.csv"),
        ("convergence", "study.csv"),
        ("amplitudes", "amplitudes.csv"),
    ],
)
def test_kinds_render_nonempty_images(kind, name, tmp_path):
    out = tmp_path / f"{kind}.png"
    render.render(kind, GOLDEN / name, out)
    assert out.exists() and out.stat().st_size > 1000


def test_convergence_slope_matches_study_order(tmp_path):
    slope = render.render_convergence(GOLDEN / "study.csv", tmp_path / "c.png")
    with open(GOLDEN / "study.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    final_order = float(rows[-1]["order"])
    assert abs(slope - final_order) <= 0.2


def test_amplitude_ratio_matches_unstable_growth(tmp_path):
    ratio = render.render_amplitudes(
        GOLDEN / "amplitudes.csv", tmp_path / "a.png"
    )
    assert ratio == pytest.approx(1.4, abs=1e-6)


def test_rerender_overwrites_idempotently(tmp_path):
    out = tmp_path / "twice.png"
    render.render("amplitudes", GOLDEN / "amplitudes.csv", out)
    first = out.read_bytes()
    render.render("amplitudes", GOLDEN / "amplitudes.csv", out)
    assert out.read_bytes() == first


def test_schema_mismatch_is_reported(tmp_path):
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b\n1,2\n")
    with pytest.raises(render.SchemaError, match="schema"):
        render.render("heatmap", wrong, tmp_path / "x.png")


def test_cli_exit_codes(tmp_path, capsys):
    ok = render.main(
        ["--kind", "amplitudes", "--in", str(GOLDEN / "amplitudes.csv"),
         "--out", str(tmp_path / "ok.png")]
    )
    assert ok == 0
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n")
    assert render.main(
        ["--kind", "convergence", "--in", str(bad),
         "--out", str(tmp_path / "no.png")]
    ) == 1
    assert "schema" in capsys.readouterr().err
