import json

import numpy as np
import pytest

from modelspace.cli import main
from modelspace.config import ScenarioConfig
from modelspace.errors import ConfigError

PW_TAU = 2 * np.pi


def write_config(path, **overrides):
    cfg = {
        "schema": 1,
        "inner": {"tau": PW_TAU, "zeros": []},
        "gamma_set": [[-6, -2], [0, 1], [2.5, 5]],
        "epsilon": 0.5,
        "c": 1.0,
        "p": 2.0,
        "a": 1,
        "gamma": 0.25,
        "window": 8.0,
        "family": {"n_sets": 3, "max_nodes": 3},
        "sweep": {"gammas": [0.5, 0.25], "period": 1.0},
        "seed": 42,
    }
    cfg.update(overrides)
    with open(path, "w") as fh:
        json.dump(cfg, fh)
    return path


def test_covering_command(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    assert main(["covering", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    for name in ("covering.json", "covering.csv", "levelset.svg"):
        assert (tmp_path / name).exists()
    d = json.loads((tmp_path / "covering.json").read_text())
    L = np.diff(d["breakpoints"])
    assert np.allclose(L, np.log(2) / PW_TAU, rtol=1e-6)
    assert "tolerances" in d


def test_covering_constant_function_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", inner={"tau": 0.0, "zeros": []})
    assert main(["covering", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_density_command(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    assert main(["density", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "density.json").read_text())
    assert "gamma_star" in d and "value" in d["gamma_star"]


def test_density_full_window_gamma_star_one(tmp_path):
    cfg = write_config(tmp_path / "c.json", gamma_set=[[-8, 8]])
    assert main(["density", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "density.json").read_text())
    assert d["gamma_star"]["value"] == pytest.approx(1.0)


def test_volberg_command(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    assert main(["volberg", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "volberg.json").read_text())
    assert d["volberg_inf"]["value"] > 0
    assert (tmp_path / "volberg_heatmap.csv").exists()
    assert (tmp_path / "volberg_heatmap.png").exists()


def test_sample_constant_command(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    assert main(["sample-constant", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rows = np.loadtxt(tmp_path / "sample_constant.csv", delimiter=",", skiprows=1)
    assert rows.shape == (2, 5)
    assert (tmp_path / "witness.json").exists()
    assert (tmp_path / "sweep.png").exists()


def test_verify_command_passes(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "verify.json").read_text())
    assert d["passed"] is True
    assert len(d["suites"]) == 5


def test_determinism_byte_identical(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    for out in (out1, out2):
        assert main(["covering", "--config", str(cfg), "--out", str(out)]) == 0
        assert main(["sample-constant", "--config", str(cfg), "--out", str(out)]) == 0
    for name in ("covering.json", "covering.csv", "sample_constant.json",
                 "sample_constant.csv", "witness.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_seed_override_changes_family(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["sample-constant", "--config", str(cfg), "--out", str(out1),
                 "--seed", "1"]) == 0
    assert main(["sample-constant", "--config", str(cfg), "--out", str(out2),
                 "--seed", "2"]) == 0
    w1 = json.loads((out1 / "witness.json").read_text())
    w2 = json.loads((out2 / "witness.json").read_text())
    assert w1 != w2


def test_covering_geometric_breakpoints(tmp_path):
    zeros = [{"re": 0.0, "im": float(2.0 ** n)} for n in range(9)]
    cfg = write_config(tmp_path / "c.json", inner={"tau": 0.0, "zeros": zeros},
                       window=500.0, c=3.0, gamma_set=[[-500.0, 0.0]])
    assert main(["covering", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "covering.json").read_text())
    bp = np.asarray(d["breakpoints"])
    lengths = np.diff(bp)
    right = lengths[bp[:-1] >= 10]
    assert np.all(right[1:] > right[:-1])  # geometric growth away from 0


def test_missing_gamma_set_is_config_error(tmp_path):
    cfg = write_config(tmp_path / "c.json", gamma_set=None)
    assert main(["density", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_bad_config_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["covering", "--config", str(path), "--out", str(tmp_path)]) == 2
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"inner": {"tau": 1.0}, "epsilon": 2.0, "seed": 1})
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"inner": {"tau": 1.0}})  # seed required
