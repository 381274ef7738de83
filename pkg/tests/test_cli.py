import json

import pytest

from heisenpde.cli import main

SOLVE_CONFIG = {
    "operator": {"kind": "sublaplacian", "lambda": 1.0, "Lambda": 1.0},
    "c": {"poly": "1"},
    "f": {"poly": "4 - x1^2 - x2^2 - x1^2 x2^2"},
    "boundary": {"poly": "x1^2 + x2^2"},
    "grid": {"lower": [-1, -1, -1], "upper": [1, 1, 1], "counts": [9, 9, 9]},
    "tol": 1e-7,
}

PIPELINE_CONFIG = {
    "problem": {
        "operator": {"kind": "sublaplacian", "lambda": 1.0, "Lambda": 1.0},
        "c": {"poly": "1"},
        "f": {"builtin": "smooth_abs", "eps": 0.1, "scale": 1.0, "offset": -1.0},
        "boundary": {"poly": "0"},
        "grid": {"lower": [-1, -1, -1], "upper": [1, 1, 1], "counts": [17, 17, 17]},
        "tol": 1e-6,
    },
    "holder": {"c0": 1.0, "beta": 1.0, "beta_prime": 1.0, "L_c": 0.0, "L_f": 1.0},
    "bracket": {"lambda": 1.0, "Lambda": 1.0},
    "seed": 7,
    "pairs": 60000,
}


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_verify_full_suite_default_seed(tmp_path):
    out = tmp_path / "full.json"
    assert main(["verify", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["all_pass"]
    assert len(report["checks"]) >= 20
    for rec in report["checks"]:
        assert set(rec) >= {"lemma_id", "trials", "worst_gap", "pass"}


def test_verify_filter_and_report(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "--filter", "group", "--seed", "1", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["all_pass"]
    assert {c["lemma_id"] for c in report["checks"]} == {
        "group.algebra",
        "group.sqrtp_square",
        "group.p_kernel",
        "group.sigma_factorization",
    }
    assert main(["verify", "--filter", "zzz"]) == 1


def test_solve_roundtrip(tmp_path):
    cfg = write_json(tmp_path / "prob.json", SOLVE_CONFIG)
    out = tmp_path / "u.csv"
    code = main(["solve", "--config", cfg, "--out", str(out)])
    assert code == 0
    assert out.exists()
    diag = json.loads((tmp_path / "u.csv.diag.json").read_text())
    assert diag["converged"]
    assert set(diag) >= {"iterations", "residual", "tau"}
    assert diag["residual"] < 1e-7


def test_solve_nonconvergence_exit_2(tmp_path):
    bad = dict(SOLVE_CONFIG, tol=1e-14, max_iters=2, multilevel=False)
    cfg = write_json(tmp_path / "prob.json", bad)
    code = main(["solve", "--config", cfg, "--out", str(tmp_path / "u.csv")])
    assert code == 2


def test_solve_missing_field_exit_1(tmp_path, capsys):
    cfg_dict = {k: v for k, v in SOLVE_CONFIG.items() if k != "boundary"}
    cfg = write_json(tmp_path / "prob.json", cfg_dict)
    code = main(["solve", "--config", cfg, "--out", str(tmp_path / "u.csv")])
    assert code == 1
    assert "boundary" in capsys.readouterr().err


def test_solve_unknown_key_exit_1(tmp_path, capsys):
    cfg = write_json(tmp_path / "prob.json", dict(SOLVE_CONFIG, bogus=1))
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "u.csv")]) == 1
    assert "bogus" in capsys.readouterr().err


def test_holder_command(tmp_path):
    cfg = write_json(tmp_path / "prob.json", SOLVE_CONFIG)
    grid_csv = tmp_path / "u.csv"
    assert main(["solve", "--config", cfg, "--out", str(grid_csv)]) == 0
    hcfg = write_json(
        tmp_path / "holder.json",
        {
            "holder": {"c0": 1.0, "beta": 1.0, "beta_prime": 1.0, "L_c": 0.0, "L_f": 1.0},
            "bracket": {"lambda": 1.0, "Lambda": 1.0},
            "seed": 3,
            "pairs": 20000,
        },
    )
    out = tmp_path / "holder_report.json"
    code = main(["holder", "--grid", str(grid_csv), "--config", hcfg, "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["alpha_target"] == 0.45
    assert not rep["stability_checked"]


def test_holder_rejects_zero_c0(tmp_path):
    cfg = write_json(tmp_path / "prob.json", SOLVE_CONFIG)
    grid_csv = tmp_path / "u.csv"
    main(["solve", "--config", cfg, "--out", str(grid_csv)])
    hcfg = write_json(
        tmp_path / "holder.json",
        {
            "holder": {"c0": 0.0, "beta": 1.0, "beta_prime": 1.0, "L_c": 0.0, "L_f": 1.0},
            "bracket": {"lambda": 1.0, "Lambda": 1.0},
        },
    )
    assert main(["holder", "--grid", str(grid_csv), "--config", hcfg, "--out", str(tmp_path / "o.json")]) == 1


def test_pipeline_end_to_end(tmp_path):
    cfg = write_json(tmp_path / "pipe.json", PIPELINE_CONFIG)
    out = tmp_path / "run"
    code = main(["pipeline", "--config", cfg, "--out", str(out), "--emit-plot-data"])
    assert code == 0
    for name in (
        "solution.csv",
        "solution.diag.json",
        "solution_refined.csv",
        "solution_refined.diag.json",
        "holder_report.json",
        "certificate.json",
        "pipeline_report.json",
        "modulus.csv",
    ):
        assert (out / name).exists(), name
    merged = json.loads((out / "pipeline_report.json").read_text())
    assert merged["pass"]
    cert = json.loads((out / "certificate.json").read_text())
    assert cert["theta"] <= 0.0
    first = (out / "modulus.csv").read_text().splitlines()
    assert first[0] == "r,omega_r"


def test_pipeline_deterministic(tmp_path):
    cfg = write_json(tmp_path / "pipe.json", PIPELINE_CONFIG)
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["pipeline", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["pipeline", "--config", cfg, "--out", str(out2)]) == 0
    for name in (
        "pipeline_report.json",
        "holder_report.json",
        "certificate.json",
        "solution.csv",
        "solution_refined.csv",
    ):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_pipeline_rejects_bad_configs(tmp_path, capsys):
    bad = dict(PIPELINE_CONFIG, holder=dict(PIPELINE_CONFIG["holder"], c0=0.0))
    cfg = write_json(tmp_path / "pipe.json", bad)
    assert main(["pipeline", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "c0" in capsys.readouterr().err
    unknown = dict(PIPELINE_CONFIG, magic=1)
    cfg2 = write_json(tmp_path / "pipe2.json", unknown)
    assert main(["pipeline", "--config", cfg2, "--out", str(tmp_path / "o2")]) == 1
    assert main(["pipeline", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o3")]) == 1


def test_verify_detects_corrupted_pucci(tmp_path, monkeypatch):
    import heisenpde.checks as checks

    def flipped(h, bracket):
        lam, Lam = bracket.lam, bracket.Lam
        return sum(Lam * e if e > 0 else -lam * e for e in h.eigenvalues())

    monkeypatch.setattr(checks, "pucci_plus", flipped)
    out = tmp_path / "report.json"
    code = main(["verify", "--filter", "operators.pucci_bruteforce", "--out", str(out)])
    assert code == 1
    report = json.loads(out.read_text())
    failing = [c["lemma_id"] for c in report["checks"] if not c["pass"]]
    assert failing == ["operators.pucci_bruteforce"]
