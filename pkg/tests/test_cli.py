import json

import pytest

from quasipos.cli import main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_model_output(tmp_path, capsys):
    assert run(tmp_path, "model", "--model", "kmm", "--beta", "1") == 0
    out = capsys.readouterr().out
    assert "rho_max=1.5707963" in out
    assert "delta_x_min=1.0" in out
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["status"] == "ok" and man["outputs"] == ["model.json"]


def test_hbar_scaling(tmp_path, capsys):
    assert run(tmp_path, "model", "--beta", "4", "--hbar", "0.5") == 0
    assert "delta_x_min=1.0" in capsys.readouterr().out


def test_manifest_is_deterministic(tmp_path):
    run(tmp_path / "a", "mlstate", "--beta", "1", "--xi", "0,1")
    run(tmp_path / "b", "mlstate", "--beta", "1", "--xi", "0,1")
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    a["config"]["output"].pop("dir"), b["config"]["output"].pop("dir")
    assert a == b and a["passed"]


@pytest.mark.parametrize("args", [["model", "--beta", "-1"],
                                  ["overlap", "--model", "identity"],
                                  ["solve", "--potential", "polynomial"],
                                  ["model", "--grid-n", "4"]])
def test_configuration_errors(tmp_path, args):
    assert run(tmp_path, *args) == 2


def test_config_schema_is_strict(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": {"family": "kmm", "beta": 1}, "numeric": {"gridn": 8}}))
    assert main(["model", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("QUASIPOS_OUT", str(tmp_path / "env"))
    assert main(["model", "--beta", "1"]) == 0
    assert (tmp_path / "env" / "manifest.json").exists()


def test_solve_and_compare(tmp_path):
    assert run(tmp_path, "solve", "--beta", "0.01", "--levels", "3") == 0
    assert (tmp_path / "spectrum.csv").read_text().startswith("level,E,convergence")
    assert run(tmp_path / "c", "compare", "--beta", "0.01", "--levels", "3") == 0
    assert (tmp_path / "c" / "spectra.csv").exists()


def test_sweep_is_order_independent(tmp_path):
    assert run(tmp_path / "a", "sweep", "--betas", "0.5,1,2", "--workers", "2") == 0
    assert run(tmp_path / "b", "sweep", "--betas", "2,0.5,1") == 0
    a = (tmp_path / "a" / "sweep_summary.json").read_text()
    assert a == (tmp_path / "b" / "sweep_summary.json").read_text()
    assert len(list((tmp_path / "a" / "sweep").glob("*.json"))) == 3


def test_verify_and_transform(tmp_path):
    assert run(tmp_path, "verify", "--beta", "1") == 0
    assert run(tmp_path / "t", "transform", "--beta", "1", "--grid-n", "64") == 0
