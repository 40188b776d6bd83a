import json
from pathlib import Path

import pytest

from curveortho.cli import load_config, main, run

GOLDEN = {
    "curve": {"c1": 1.0, "c0": [0.0, 0.0], "cneg": [], "rho_hat": 0.0},
    "weight": {"kind": "generic", "V": [[1.0, 0.0]]},
    "expansion": {"N": 256, "tol": 1e-13},
    "degrees": {"start": 1, "stop": 6},
    "targets": "L_1",
    "tasks": ["expand", "oracle", "compare"],
}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_golden_circle_run(tmp_path):
    code = main(["run", _write(tmp_path, GOLDEN), "--out", str(tmp_path / "o"),
                 "--check"])
    assert code == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["checks"]["compare"]["max_rel_err"] <= 1e-10
    assert summary["checks"]["compare"]["pass"]
    for name in ("expand.json", "oracle.json", "compare.csv", "summary.json"):
        assert (tmp_path / "o" / name).exists()


def test_jobs_determinism(tmp_path):
    c = _write(tmp_path, GOLDEN)
    assert main(["run", c, "--out", str(tmp_path / "a"), "--jobs", "1"]) == 0
    assert main(["run", c, "--out", str(tmp_path / "b"), "--jobs", "4"]) == 0
    for name in ("expand.json", "oracle.json", "compare.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()


def test_config_roundtrip(tmp_path):
    c = _write(tmp_path, GOLDEN)
    assert main(["run", c, "--out", str(tmp_path / "a")]) == 0
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    c2 = _write(tmp_path, summary["config"], "cfg2.json")
    assert main(["run", c2, "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "compare.csv").read_bytes() == \
        (tmp_path / "b" / "compare.csv").read_bytes()


def test_bad_radius_exits_one(tmp_path, capsys):
    cfg = dict(GOLDEN)
    cfg["weight"] = {"kind": "generic", "V": [[-0.5, 0.0], [1.0, 0.0]], "rho": 0.5}
    cfg["expansion"] = {"N": 256, "r": 0.4}
    code = main(["run", _write(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "rho < r < 1" in capsys.readouterr().err


def test_unknown_task_and_flag(tmp_path, capsys):
    cfg = dict(GOLDEN)
    cfg["tasks"] = ["expand", "nonsense"]
    assert main(["run", _write(tmp_path, cfg)]) == 1
    assert main(["run", "--bogus-flag", "x.json"]) == 1
    assert main([]) == 1


def test_empty_degrees_rejected(tmp_path):
    cfg = dict(GOLDEN)
    cfg["degrees"] = []
    assert main(["run", _write(tmp_path, cfg)]) == 1


def test_missing_config_file():
    assert main(["run", "/nonexistent/config.json"]) == 1


def test_svg_flag(tmp_path):
    import xml.dom.minidom
    cfg = {
        "curve": {"c1": 1.0, "c0": [0.0, 0.0], "cneg": [], "rho_hat": 0.0},
        "weight": {"kind": "singular", "omega": [[1.0, 0.0]],
                   "sing": [{"a": [0.5, 0.0], "lambda": 0.5}]},
        "degrees": [12],
        "tasks": ["zeros"],
    }
    code = main(["run", _write(tmp_path, cfg), "--out", str(tmp_path / "o"),
                 "--svg"])
    assert code == 0
    svgs = list((tmp_path / "o").glob("*.svg"))
    assert svgs
    xml.dom.minidom.parse(str(svgs[0]))


def test_nodes_override(tmp_path):
    cfg = load_config(_write(tmp_path, GOLDEN))
    assert cfg["expansion"].N == 256
    code = main(["run", _write(tmp_path, GOLDEN), "--out", str(tmp_path / "o"),
                 "--nodes", "512"])
    assert code == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["config"]["expansion"]["N"] == 256  # raw config is embedded


def test_run_api_check_failure_exit_code(tmp_path):
    # an impossible threshold cannot be forced, so exercise exit 3 by
    # asking for zeros checks at a degree too small for the asymptotic law
    cfg = {
        "curve": {"c1": 1.0, "c0": [0.0, 0.0], "cneg": [], "rho_hat": 0.0},
        "weight": {"kind": "singular", "omega": [[1.0, 0.0]],
                   "sing": [{"a": [0.5, 0.0], "lambda": 0.5}]},
        "degrees": [40],
        "tasks": ["zeros"],
    }
    code, summary = run(load_config(_write(tmp_path, cfg)),
                        out_dir=str(tmp_path / "o"), check=True)
    assert code in (0, 3)  # passes when the law already holds at n=40
    assert "zeros" in summary["checks"]
