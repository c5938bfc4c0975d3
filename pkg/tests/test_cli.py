import json

import numpy as np
import pytest

from gsbd.cli import downsample, evaluate_scenario, main
from gsbd.io import read_matrix_csv


def test_downsample():
    assert downsample([1, 2, 3]) == [1.0, 2.0, 3.0]
    d = downsample(list(range(5000)), limit=100)
    assert len(d) == 100 and d[0] == 0.0 and d[-1] == 4999.0


def test_gen_graph(tmp_path):
    assert main(["--seed", "3", "--out", str(tmp_path), "gen", "--n", "10"]) == 0
    V = read_matrix_csv(tmp_path / "V.csv")
    S = read_matrix_csv(tmp_path / "S.csv")
    w = read_matrix_csv(tmp_path / "eigenvalues.csv")[:, 0]
    assert np.allclose((V * w) @ V.T, S, atol=1e-10)
    assert (tmp_path / "graph.txt").exists()


def test_gen_instance_and_solvers(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["--out", out, "gen", "--n", "8", "--P", "30", "--alpha", "0.2", "--target-delta", "0.5"]) == 0
    y, vp = str(tmp_path / "Y.csv"), str(tmp_path / "Vp.csv")
    assert main(["solve-bdog", "--y", y, "--v", vp, "--out", str(tmp_path / "b.json")]) == 0
    b = json.loads((tmp_path / "b.json").read_text())
    assert abs(sum(b["g_hat"]) - 8) < 1e-8 and b["converged"]
    assert main(["solve-rbdogs", "--y", y, "--vp", vp, "--max-outer", "5", "--out", str(tmp_path / "r.json")]) == 0
    r = json.loads((tmp_path / "r.json").read_text())
    assert r["outer_iterations"] == 5 and len(r["F_trace"]) == 5
    assert read_matrix_csv(r["V_hat"]).shape == (8, 8)


def test_bounds_command(tmp_path, capsys):
    sc = tmp_path / "sc.json"
    sc.write_text(json.dumps({"n": 12, "P": 40, "alpha": 0.05, "target_delta": 0.02, "C1": 30.0}))
    assert main(["bounds", "--scenario", str(sc)]) == 0
    res = json.loads(capsys.readouterr().out)
    for key in ("a0", "Q", "Q_worst_case", "M1", "M2", "bound", "tolerable_delta"):
        assert key in res
    assert res["a0"] > 0


def test_bounds_scenario_reports_failed_recovery_condition():
    res = evaluate_scenario({"n": 12, "alpha": 5.0})
    assert res["Q"] is None and "recovery condition" in res["error"]


def test_unknown_scenario_key_is_an_error(tmp_path, capsys):
    sc = tmp_path / "sc.json"
    sc.write_text(json.dumps({"nodes": 12}))
    assert main(["bounds", "--scenario", str(sc)]) == 2
    assert "unknown scenario keys" in capsys.readouterr().err


def test_exp_commands(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "n": 8, "P": 20, "alpha_grid": [0.0], "target_delta_grid": [0.0, 0.5], "P_grid": [40],
        "n_realizations": 1, "rbdogs": {"max_outer": 5},
    }))
    out = tmp_path / "o"
    assert main(["--seed", "4", "--out", str(out), "exp-tc1", "--config", str(cfg)]) == 0
    assert main(["--out", str(out), "exp-tc2", "--config", str(cfg)]) == 0
    raw = (out / "tc1_raw.csv").read_text().splitlines()
    assert len(raw) == 1 + 2 * 2
    assert json.loads((out / "manifest.json").read_text())["command"] == "exp-tc2"
    assert (out / "tc2_rex.svg").exists()


def test_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])
