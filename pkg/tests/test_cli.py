import json

import numpy as np
import pytest

from translate_lab.cli import main as cli_main
from translate_lab.cli import runner
from translate_lab.cli.config import (
    build_config,
    config_hash,
    fixture_dir,
    load_config,
    parse_lambda_spec,
    parse_text,
)
from translate_lab.errors import ConfigurationError, RangeError, ReproducibilityError
from translate_lab.lambda_sets import integers

SMALL_PROBE = """command = probe-radius
lambda_spec = integers:40
targets = 0.5, 1.5
r_min = 2.8
r_max = 3.6
r_step = 0.2
truncations = 20, 40
"""


def write(path, text):
    path.write_text(text)
    return str(path)


def run_cli(argv, capsys):
    code = cli_main.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_text():
    raw = parse_text("# comment\na = 1\n\nb = x, y  # trailing\n")
    assert raw == {"a": "1", "b": "x, y"}
    with pytest.raises(ConfigurationError, match="duplicate"):
        parse_text("a = 1\na = 2\n")
    with pytest.raises(ConfigurationError):
        parse_text("no equals sign\n")


def test_defaults_and_json_equivalence(tmp_path):
    kv = load_config(write(tmp_path / "a.cfg", "command = norms\ngrid.points = 128\n"))
    js = load_config(write(tmp_path / "b.json", json.dumps({"command": "norms", "grid": {"points": 128}})))
    assert kv.echo() == js.echo()
    assert kv.digest() == js.digest() == config_hash(kv.echo())
    assert kv["count"] == 20 and kv.tolerances["oracle"] == 1e-12


@pytest.mark.parametrize("raw, field", [
    ({"command": "norms", "tol.oracle": "-1"}, "tol.oracle"),
    ({"command": "norms", "grid.points": "0"}, "grid.points"),
    ({"command": "norms", "bogus": "1"}, "bogus"),
    ({"command": "norms", "count": "many"}, "count"),
    ({"command": "nope"}, "command"),
    ({"command": "density", "lambda_spec": "file:missing.txt"}, "lambda_spec"),
])
def test_build_config_errors(raw, field):
    with pytest.raises(ConfigurationError) as exc:
        build_config(raw)
    assert exc.value.field == field


@pytest.mark.parametrize("spec, size", [("integers:3", 7), ("lattice:0.5:2", 9), ("perturbed:0.5:4", 9)])
def test_lambda_specs(spec, size):
    assert len(parse_lambda_spec(spec)) == size


def test_bad_lambda_spec():
    with pytest.raises(ConfigurationError):
        parse_lambda_spec("circle:3")


def test_sub_seeds_are_offsets():
    cfg = build_config({"command": "norms", "seed": "10"})
    assert cfg.sub_seed("lambda") == 11 and cfg.sub_seed("molecules") == 15


def test_fixtures_listed(capsys):
    code, out, _ = run_cli(["fixtures"], capsys)
    assert code == 0 and "density.cfg" in out
    assert len(list(fixture_dir().glob("*.cfg"))) >= 10


def test_density_on_integer_file(tmp_path, capsys):
    write(tmp_path / "z.txt", integers(4096).to_text())
    cfg = write(tmp_path / "d.cfg", "command = density\nlambda_spec = file:z.txt\n")
    code, _, _ = run_cli(["density", "--config", cfg, "--out", str(tmp_path / "o")], capsys)
    rep = json.loads((tmp_path / "o" / "density.report.json").read_text())
    assert code == 0
    assert 0.9 <= rep["metrics"]["lower_bound"] <= 1.0
    assert rep["metrics"]["classification"] == "finite"
    assert rep["provenance"]["seed"] == 0 and rep["wall_time"] >= 0


def test_negative_tolerance_exit_code(tmp_path, capsys):
    cfg = write(tmp_path / "bad.cfg", "command = norms\ntol.oracle = -1e-3\n")
    code, _, err = run_cli(["norms", "--config", cfg, "--out", str(tmp_path)], capsys)
    payload = json.loads(err.strip().splitlines()[-1])
    assert code == 2
    assert payload["field"] == "tol.oracle" and payload["exit_code"] == 2


def test_pair_intervals_must_cover(tmp_path, capsys):
    cfg = write(tmp_path / "p.cfg", "command = pair-build\ninterval1 = -3, 0.1\ninterval2 = -0.1, 3\n")
    code, _, err = run_cli(["pair-build", "--config", cfg, "--out", str(tmp_path)], capsys)
    assert code == 2 and "cover" in err


def test_pair_build_writes_spectra(tmp_path, capsys):
    code, _, _ = run_cli(["pair-build", "--out", str(tmp_path)], capsys)
    rep = json.loads((tmp_path / "pair-build.report.json").read_text())
    assert code == 0
    assert rep["verdicts"]["zero_set"]["status"] == "pass"
    assert sum(1 for f in rep["files"] if f.endswith(".csv")) >= 2


def test_hazard_exit_code(tmp_path, capsys, monkeypatch):
    def boom(cfg, jobs=1):
        raise RangeError("overflow in test")
    monkeypatch.setitem(runner.COMMAND_TABLE, "density", boom)
    code, _, err = run_cli(["density", "--out", str(tmp_path)], capsys)
    assert code == 3 and json.loads(err)["error"] == "RangeError"


def test_csv_byte_identical_and_jobs(tmp_path, capsys):
    cfg = write(tmp_path / "probe.cfg", SMALL_PROBE)
    outs = []
    for name, jobs in (("a", "1"), ("b", "1"), ("c", "3")):
        run_cli(["probe-radius", "--config", cfg, "--out", str(tmp_path / name), "--jobs", jobs], capsys)
        outs.append(tmp_path / name)
    csvs = sorted(p.name for p in outs[0].glob("*.csv"))
    assert csvs
    for name in csvs:
        data = [(o / name).read_bytes() for o in outs]
        assert data[0] == data[1] == data[2]
    reports = [json.loads((o / "probe-radius.report.json").read_text()) for o in outs]
    assert reports[0]["metrics"] == reports[2]["metrics"]
    header = (outs[0] / csvs[0]).read_text().splitlines()[0]
    assert "," in header and not header[0].isdigit()


def test_replay_identical_and_recreates(tmp_path, capsys):
    cfg = write(tmp_path / "probe.cfg", SMALL_PROBE)
    first, _, _ = run_cli(["probe-radius", "--config", cfg, "--out", str(tmp_path / "r")], capsys)
    report = tmp_path / "r" / "probe-radius.report.json"
    fresh = tmp_path / "fresh" / "nested"
    code, out, _ = run_cli(["replay", str(report), "--out", str(fresh)], capsys)
    assert code == first and "identical" in out
    assert (fresh / "probe-radius.report.json").is_file()


def test_replay_rejects_tampered_config(tmp_path, capsys):
    run_cli(["norms", "--out", str(tmp_path)], capsys)
    path = tmp_path / "norms.report.json"
    doc = json.loads(path.read_text())
    doc["config"]["grid.points"] = 512
    path.write_text(json.dumps(doc))
    with pytest.raises(ReproducibilityError, match="hash"):
        runner.replay(path, str(tmp_path / "x"))
    code, _, err = run_cli(["replay", str(path), "--out", str(tmp_path / "y")], capsys)
    assert code == 1 and "ReproducibilityError" in err


def test_replay_detects_metric_drift(tmp_path, capsys):
    run_cli(["density", "--out", str(tmp_path)], capsys)
    path = tmp_path / "density.report.json"
    doc = json.loads(path.read_text())
    doc["metrics"]["lower_bound"] += 1e-6
    path.write_text(json.dumps(doc))
    with pytest.raises(ReproducibilityError, match="drift"):
        runner.replay(path, str(tmp_path / "x"))


def test_compare_metrics():
    assert runner.compare_metrics({"a": [1.0, 2.0]}, {"a": [1.0, 2.0 + 1e-13]}) is None
    assert runner.compare_metrics({"a": 1.0}, {"a": 1.1}) == "metrics.a"
    assert runner.compare_metrics({"a": "x"}, {"b": "x"}) == "metrics"
