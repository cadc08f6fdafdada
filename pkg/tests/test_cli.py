import json
from pathlib import Path

import pytest

from conelab.cli import main
from conelab.config import load_config, parse_config
from conelab.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
ALL = sorted(CONFIGS.glob("*.json"))


def scenario_of(path):
    return json.loads(path.read_text())["scenario"]


def run_cli(path, out, *extra):
    return main([scenario_of(path), "--config", str(path), "--out", str(out), *extra])


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


@pytest.mark.parametrize("path", ALL, ids=lambda p: p.stem)
def test_configs_parse(path):
    cfg = load_config(path)
    assert cfg.scenario == scenario_of(path)


def test_dual_orthant_exit_zero(tmp_path):
    cfg = write(tmp_path, {"scenario": "dual", "cone": {"generators": [[1, 0], [0, 1]]}, "samples": 2000})
    assert main(["dual", "--config", str(cfg), "--out", str(tmp_path / "d.json")]) == 0
    rep = json.loads((tmp_path / "d.json").read_text())
    assert rep["passed"] and rep["extra"]["dual_generators"]


def test_divergent_l2_exit_one(tmp_path, capsys):
    code = run_cli(CONFIGS / "bounds_l2_divergent.json", tmp_path / "b.csv")
    assert code == 1
    rep = json.loads((tmp_path / "b.report.json").read_text())
    assert rep["checks"][0]["inputs"]["error"] == "DivergenceError"
    assert "FAIL" in capsys.readouterr().err


def test_verify_pws_campaign(tmp_path):
    assert run_cli(CONFIGS / "verify_pws.json", tmp_path / "p.json") == 0
    rep = json.loads((tmp_path / "p.json").read_text())
    (parseval,) = [c for c in rep["checks"] if c["name"] == "parseval"]
    assert parseval["lhs"] < 1e-2


@pytest.mark.parametrize(
    "obj",
    [
        {"scenario": "laplace"},
        {"scenario": "dual", "cone": {"generators": [[1, 0], [0]]}},
        {"scenario": "bounds", "which": "sideways", "distribution": {}},
        {"scenario": "laplace", "distribution": {"g": {"kind": "constant"}, "support": {"generators": [[1]]}},
         "grid": {"x": [[0.0]], "yc": [[1.0]]}, "quadrature": {"bogus": 1}},
    ],
)
def test_config_errors_exit_two(tmp_path, obj):
    assert main([obj["scenario"], "--config", str(write(tmp_path, obj))]) == 2


def test_missing_file_and_wrong_scenario(tmp_path):
    assert main(["dual", "--config", str(tmp_path / "nope.json")]) == 2
    assert main(["dual", "--config", str(CONFIGS / "laplace.json")]) == 2
    with pytest.raises(ConfigError):
        parse_config({"scenario": "nope"})


def test_bad_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    assert main(["dual", "--config", str(p)]) == 2


def test_csv_and_report_written(tmp_path):
    out = tmp_path / "l.csv"
    assert run_cli(CONFIGS / "laplace.json", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x0,yc0,re,im,quad_err" and len(lines) == 16
    rep = json.loads(out.with_suffix(".report.json").read_text())
    assert {"timing", "versions", "config", "seed"} <= set(rep)


def test_wavefront_writes_profiles(tmp_path):
    out = tmp_path / "w.csv"
    assert run_cli(CONFIGS / "wavefront.json", out) == 0
    profiles = sorted((tmp_path / "w_profiles").glob("*.csv"))
    assert len(profiles) == 6
    assert profiles[0].read_text().startswith("lambda,log_abs_w\n")
    rows = out.read_text().splitlines()[1:]
    singular = [r for r in rows if r.endswith(",1")]
    assert singular == ["0.0,1.0," + singular[0].split(",")[2] + ",1"]


def test_overrides(tmp_path):
    grid = write(tmp_path, {"x": [[0.0]], "yc": [[1.0]]}, "grid.json")
    out = tmp_path / "g.csv"
    main(["laplace", "--config", str(CONFIGS / "laplace.json"), "--grid", str(grid), "--out", str(out)])
    assert len(out.read_text().splitlines()) == 2
    out = tmp_path / "p.csv"
    assert main(["bounds", "--config", str(CONFIGS / "bounds_l2.json"), "--which", "growth",
                 "--out", str(out)]) == 2  # growth needs a grid


def _data(report_path):
    rep = json.loads(Path(report_path).read_text())
    rep.pop("timing")
    return rep


@pytest.mark.parametrize("path", ALL, ids=lambda p: p.stem)
def test_reruns_are_byte_identical(tmp_path, path):
    outs = []
    for i, threads in enumerate(("1", "1", "3")):
        out = tmp_path / f"r{i}.csv"
        run_cli(path, out, "--seed", "11", "--threads", threads)
        outs.append(out)
    rep = [o.with_suffix(".report.json") if o.with_suffix(".report.json").exists() else o for o in outs]
    assert _data(rep[0]) == _data(rep[1]) == _data(rep[2])
    if outs[0].exists() and outs[0] != rep[0]:
        assert outs[0].read_bytes() == outs[1].read_bytes() == outs[2].read_bytes()


def test_seed_changes_sampling(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["vladimirov", "--config", str(CONFIGS / "vladimirov.json"), "--seed", "1", "--out", str(a)])
    main(["vladimirov", "--config", str(CONFIGS / "vladimirov.json"), "--seed", "2", "--out", str(b)])
    assert _data(a)["checks"][0]["lhs"] != _data(b)["checks"][0]["lhs"]
