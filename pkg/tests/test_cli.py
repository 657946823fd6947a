"""CLI tests: subcommands, exit codes, file formats, determinism."""

import json
import re

import numpy as np
import pytest

from quantband import (
    CardinalityRule,
    ConfidenceBand,
    Dataset,
    build_family,
    build_grid,
    evaluate,
    kappa_bonferroni,
)
from quantband.cli import main, read_band_csv


@pytest.fixture
def three_point_csv(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text("# comment line\nx,y\n1,5\n2,6\n3,7\n")
    return p


@pytest.fixture
def synthetic_csv(tmp_path):
    rng = np.random.default_rng(123)
    x = np.sort(rng.uniform(0, 50, 80))
    y = np.sqrt(x) + rng.normal(0, 1, 80)
    p = tmp_path / "synth.csv"
    p.write_text("x,y\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(x, y)))
    return p


def test_band_three_point_fixed_kappa(three_point_csv, tmp_path, capsys):
    out = tmp_path / "band.csv"
    rc = main([
        "band", str(three_point_csv), "--gamma", "0.5", "--kappa", "fixed:0.6",
        "--family", "all", "--cap", "full", "--out", str(out),
    ])
    assert rc == 0
    z, lo, up = read_band_csv(out)
    np.testing.assert_array_equal(z, [1, 2, 3])
    np.testing.assert_array_equal(lo, [5, 6, 7])
    np.testing.assert_array_equal(up, [5, 6, 7])
    printed = capsys.readouterr().out
    assert "kappa:" in printed and "family size: 6" in printed
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    assert meta["kappa"] == 0.6
    assert meta["n"] == 3 and meta["n_distinct"] == 3
    assert meta["family_size"] == 6
    assert meta["crossing_flag"] is False
    assert meta["method"] == "fixed"
    assert "runtime_ms" in meta


def test_band_usage_errors(three_point_csv, tmp_path):
    assert main(["band", str(three_point_csv), "--alpha", "1.5"]) == 2
    assert main(["band", str(three_point_csv), "--gamma", "0"]) == 2
    assert main(["band", str(three_point_csv), "--kappa", "bogus"]) == 2
    assert main(["band", str(three_point_csv), "--kappa", "mc:0"]) == 2
    assert main(["band", str(three_point_csv), "--family", "weird"]) == 2


def test_band_data_errors(tmp_path):
    missing = tmp_path / "nope.csv"
    assert main(["band", str(missing)]) == 3
    empty = tmp_path / "empty.csv"
    empty.write_text("x,y\n")
    assert main(["band", str(empty)]) == 3
    badheader = tmp_path / "bad.csv"
    badheader.write_text("a,b\n1,2\n")
    assert main(["band", str(badheader)]) == 3
    badrow = tmp_path / "row.csv"
    badrow.write_text("x,y\n1,2\n3,oops\n")
    assert main(["band", str(badrow)]) == 3


def test_metadata_kappa_matches_library(synthetic_csv, tmp_path):
    out = tmp_path / "b.csv"
    rc = main(["band", str(synthetic_csv), "--family", "triangular", "--cap", "half",
               "--kappa", "bonferroni", "--alpha", "0.05", "--out", str(out)])
    assert rc == 0
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    x, y = np.loadtxt(synthetic_csv, delimiter=",", skiprows=1, unpack=True)
    grid = build_grid(Dataset.from_pairs(x, y))
    fam = build_family(grid, CardinalityRule("triangular", "half"))
    assert meta["kappa"] == kappa_bonferroni(fam, 0.5, 0.05)


def test_band_round_trip_evaluates_identically(synthetic_csv, tmp_path):
    out = tmp_path / "b.csv"
    assert main(["band", str(synthetic_csv), "--kappa", "fixed:0.01", "--out", str(out)]) == 0
    z, lo, up = read_band_csv(out)
    x, y = np.loadtxt(synthetic_csv, delimiter=",", skiprows=1, unpack=True)
    data = Dataset.from_pairs(x, y)
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("triangular", "half"))
    from quantband import critical_values, compute_band

    band = compute_band(data, grid, fam, critical_values(0.01, 0.5, grid.n))
    reread = ConfidenceBand(grid=grid, lower=lo, upper=up)
    probe = np.concatenate([grid.z, grid.z - 1e-9, grid.z + 1e-9, [-1e9, 1e9]])
    lo1, up1 = evaluate(band, probe)
    lo2, up2 = evaluate(reread, probe)
    np.testing.assert_array_equal(lo1, lo2)
    np.testing.assert_array_equal(up1, up2)


def test_outputs_byte_identical_across_runs(synthetic_csv, tmp_path):
    outs = []
    for d in ("r1", "r2"):
        wd = tmp_path / d
        wd.mkdir()
        out = wd / "band.csv"
        svg = wd / "band.svg"
        rc = main(["band", str(synthetic_csv), "--kappa", "mc:500", "--seed", "42",
                   "--out", str(out), "--plot", str(svg), "--sshape"])
        assert rc == 0
        outs.append((out, svg))
    a, b = outs
    assert a[0].read_bytes() == b[0].read_bytes()
    assert a[1].read_bytes() == b[1].read_bytes()
    sa = a[0].with_name("band_sshape.csv").read_bytes()
    sb = b[0].with_name("band_sshape.csv").read_bytes()
    assert sa == sb
    ma = json.loads(a[0].with_suffix(".meta.json").read_text())
    mb = json.loads(b[0].with_suffix(".meta.json").read_text())
    ma.pop("runtime_ms")
    mb.pop("runtime_ms")
    assert ma == mb


def test_sshape_output_contained_in_band(synthetic_csv, tmp_path):
    out = tmp_path / "band.csv"
    rc = main(["band", str(synthetic_csv), "--kappa", "fixed:0.02", "--sshape",
               "--out", str(out)])
    assert rc == 0
    z, lo, up = read_band_csv(out)
    zs, rlo, rup = read_band_csv(out.with_name("band_sshape.csv"))
    np.testing.assert_array_equal(z, zs)
    assert np.all(rlo >= lo) and np.all(rup <= up)
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    assert meta["sshape"]["any_feasible"] is True


def test_sshape_custom_mu_grid(synthetic_csv, tmp_path):
    out = tmp_path / "band.csv"
    rc = main(["band", str(synthetic_csv), "--kappa", "fixed:0.02", "--sshape",
               "--mu-grid=-inf,25,inf", "--out", str(out)])
    assert rc == 0
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    assert meta["sshape"]["mu_count"] == 3
    assert main(["band", str(synthetic_csv), "--sshape", "--mu-grid", "25,oops",
                 "--out", str(out)]) == 2


def test_calibrate_prints_kappa(synthetic_csv, capsys):
    rc = main(["calibrate", str(synthetic_csv), "--gamma", "0.25", "--alpha", "0.1",
               "--family", "pow2", "--cap", "full"])
    assert rc == 0
    printed = capsys.readouterr().out.strip()
    x, y = np.loadtxt(synthetic_csv, delimiter=",", skiprows=1, unpack=True)
    grid = build_grid(Dataset.from_pairs(x, y))
    fam = build_family(grid, CardinalityRule("pow2", "full"))
    assert float(printed) == kappa_bonferroni(fam, 0.25, 0.1)


def test_plot_segment_counts(three_point_csv, tmp_path):
    out = tmp_path / "band.csv"
    svg = tmp_path / "band.svg"
    assert main(["band", str(three_point_csv), "--kappa", "fixed:0.6", "--family", "all",
                 "--cap", "full", "--out", str(out)]) == 0
    assert main(["plot", str(out), "--data", str(three_point_csv), "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.count('class="band-lower"') == 3
    assert text.count('class="band-upper"') == 3
    assert text.count('class="obs"') == 3


def test_plot_clips_infinite_edges(tmp_path):
    band = tmp_path / "band.csv"
    band.write_text(
        "z,lower,upper\n1.0,-inf,2.0\n2.0,0.5,3.0\n3.0,1.0,inf\n"
    )
    svg = tmp_path / "band.svg"
    assert main(["plot", str(band), "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.count('class="band-lower"') == 3
    assert text.count('class="band-upper"') == 3
    # every drawn coordinate stays inside the viewport
    for m in re.finditer(r'(x1|x2|y1|y2|cx|cy)="([-0-9.]+)"', text):
        v = float(m.group(2))
        assert -1e-6 <= v <= 800 + 1e-6


def test_plot_empty_band_file_is_a_data_error(tmp_path):
    band = tmp_path / "band.csv"
    band.write_text("z,lower,upper\n")
    assert main(["plot", str(band), "--out", str(tmp_path / "x.svg")]) == 3


def test_plot_refined_overlay_and_curve(three_point_csv, tmp_path):
    out = tmp_path / "band.csv"
    assert main(["band", str(three_point_csv), "--kappa", "fixed:0.6", "--family", "all",
                 "--cap", "full", "--sshape", "--out", str(out)]) == 0
    svg = tmp_path / "band.svg"
    curve = tmp_path / "curve.csv"
    curve.write_text("x,y\n1,5\n3,7\n")
    assert main(["plot", str(out), "--refined", str(out.with_name("band_sshape.csv")),
                 "--curve", str(curve), "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.count('class="refined-lower"') == 3
    assert text.count('class="refined-upper"') == 3
    assert 'class="ref-curve"' in text


def test_simulate_subcommand(tmp_path, capsys):
    scen = tmp_path / "scen.json"
    scen.write_text(json.dumps({
        "scenarios": [
            {"type": "coverage", "n": 40, "model": "gauss-location", "gamma": 0.5,
             "alpha": 0.1, "family": "triangular", "cap": "half",
             "kappa": "bonferroni", "n_rep": 20, "seed": 3},
            {"type": "rate", "model": "gauss-location", "gamma": 0.5, "alpha": 0.1,
             "family": "triangular", "cap": "half", "kappa": "bonferroni",
             "n_rep": 8, "seed": 3, "n_list": [40, 80]},
        ]
    }))
    outj = tmp_path / "summary.json"
    rc = main(["simulate", str(scen), "--out", str(outj)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "coverage:" in printed
    doc = json.loads(outj.read_text())
    assert len(doc) == 2
    assert doc[0]["type"] == "coverage"
    assert doc[1]["type"] == "rate"


def test_simulate_bad_files(tmp_path):
    assert main(["simulate", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", str(bad)]) == 3
    empty = tmp_path / "empty.json"
    empty.write_text("[]")
    assert main(["simulate", str(empty)]) == 3
    badscen = tmp_path / "badscen.json"
    badscen.write_text(json.dumps([{"type": "coverage", "n": -3}]))
    assert main(["simulate", str(badscen)]) == 3
