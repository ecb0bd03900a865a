import json

import pytest

from bending.cli import EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, main
from bending.examples import data_path


def run(tmp_path, *args):
    return main([*map(str, args), "--out", str(tmp_path)])


def example(name):
    return str(data_path(name))


def test_classify_writes_reports(tmp_path):
    assert run(tmp_path, "classify", "--input", example("whitehead"), "--t", "0,0.5") == EXIT_OK
    doc = json.loads((tmp_path / "T1_tp0_500.json").read_text())
    assert doc["kind"] == "bent"
    assert json.loads((tmp_path / "T2_tp0_500.json").read_text())["kind"] == "standard"


def test_classify_degenerate_exit_code(tmp_path):
    code = run(tmp_path, "classify", "--input", example("p_prime"), "--t", "0.5")
    assert code == EXIT_DEGENERATE
    assert list(tmp_path.glob("*_witness.json"))


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x",\n "cusps": [}')
    assert run(tmp_path, "classify", "--input", bad) == EXIT_INPUT
    assert "bad.json:2:" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert run(tmp_path, "bendcheck", "--input", tmp_path / "nope.json") == EXIT_INPUT


def test_bad_t(tmp_path):
    assert run(tmp_path, "classify", "--input", example("whitehead"), "--t", "abc") == EXIT_INPUT


def test_unknown_plot(tmp_path):
    cfg_path = tmp_path / "p.json"
    cfg_path.write_text('{"plot": "torus"}')
    assert run(tmp_path, "plot", "--input", cfg_path) == EXIT_INPUT


@pytest.mark.parametrize("name", ["plot_slice", "plot_section", "plot_circle"])
def test_plots(tmp_path, name):
    assert run(tmp_path, "plot", "--input", example(name)) == EXIT_OK
    svg = next(tmp_path.glob("*.svg")).read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_volume_small(tmp_path):
    cfg_path = tmp_path / "v.json"
    cfg_path.write_text(json.dumps({"kind": "standard", "dimension": 3, "shells": 2,
                                "samples": 2000}))
    assert run(tmp_path, "volume", "--input", cfg_path, "--seed", 4) == EXIT_OK
    rows = (tmp_path / "volume_standard_d3_seed4.csv").read_text().splitlines()
    assert rows[0] == "X,value,stderr,samples,seed,flag"
    assert rows[-1].startswith("total,")


def test_sandwich_and_bendcheck(tmp_path):
    assert run(tmp_path, "sandwich", "--input", example("sandwich_perturbed")) == EXIT_OK
    assert json.loads((tmp_path / "sandwich.json").read_text())["reports"]
    assert run(tmp_path, "bendcheck", "--input", example("hnn_d3"), "--t", "-1", "1") == EXIT_OK


@pytest.mark.parametrize("tvals", [["-0.5", "0.5"], ["-0.5,0.5"], ["=-0.5,0.5"]])
def test_negative_t_values(tmp_path, tvals):
    argv = ["classify", "--input", example("whitehead")]
    argv += ["--t" + tvals[0]] if tvals[0].startswith("=") else ["--t", *tvals]
    assert main([*argv, "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "T1_tm0_500.json").exists() and (tmp_path / "T1_tp0_500.json").exists()
