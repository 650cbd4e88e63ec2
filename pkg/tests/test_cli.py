import csv
import json

import numpy as np
import pytest

from jordan_spectra.cli import main
from jordan_spectra.experiments import EIGEN_COLUMNS, FIGURE_COLUMNS, RunConfig, run
from jordan_spectra.jordan import rank_one_oracle_eigenvalues
from jordan_spectra.linalg import multiset_distance


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_simulate_rank_one(tmp_path, capsys):
    code = main(["simulate", "--n", "4", "--delta", "0.0625", "--kind", "rank-one", "--trials", "3",
                 "--out", str(tmp_path)])
    assert code == 0
    header, rows = read_csv(tmp_path / "eigenvalues.csv")
    assert tuple(header) == EIGEN_COLUMNS
    assert len(rows) == 12
    oracle = rank_one_oracle_eigenvalues(4, 1 / 16)
    for t in range(3):
        lams = [float(r[1]) + 1j * float(r[2]) for r in rows if int(r[0]) == t]
        assert multiset_distance(lams, oracle) < 1e-12
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["completed"] == 3 and summary["rejected"] == 0
    assert {"max_residual", "wall_time_s"} <= summary.keys()
    assert json.loads(capsys.readouterr().out)["completed"] == 3


def test_simulate_zero_trials(tmp_path):
    run(RunConfig("simulate", n=5, delta=1e-3, trials=0, out_dir=tmp_path))
    assert (tmp_path / "eigenvalues.csv").read_text().strip() == ",".join(EIGEN_COLUMNS)


def test_thread_count_does_not_change_output(tmp_path):
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"t{threads}"
        run(RunConfig("simulate", n=30, delta=1e-6, trials=7, seed=11, threads=threads, out_dir=out))
        outs.append((out / "eigenvalues.csv").read_bytes())
    assert outs[0] == outs[1]


def test_trial_depends_only_on_seed_and_index(tmp_path):
    run(RunConfig("simulate", n=12, delta=1e-4, trials=5, seed=8, out_dir=tmp_path / "a"))
    run(RunConfig("simulate", n=12, delta=1e-4, trials=2, seed=8, out_dir=tmp_path / "b"))
    _, full = read_csv(tmp_path / "a" / "eigenvalues.csv")
    _, part = read_csv(tmp_path / "b" / "eigenvalues.csv")
    assert part == [r for r in full if int(r[0]) < 2]


def test_csv_values_round_trip(tmp_path):
    from jordan_spectra.density import sample_spectrum
    cfg = RunConfig("simulate", n=9, delta=1e-3, trials=1, seed=2, out_dir=tmp_path)
    run(cfg)
    _, rows = read_csv(tmp_path / "eigenvalues.csv")
    lams = sample_spectrum(cfg.spec(0)).eigenvalues
    got = sorted((float(r[1]), float(r[2])) for r in rows)
    assert got == sorted((float(z.real), float(z.imag)) for z in lams)


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 6, "delta": 0.001, "trials": 2, "seed": 4,
                               "out": str(tmp_path / "from_file")}))
    assert main(["simulate", "--config", str(cfg), "--trials", "1"]) == 0
    summary = json.loads((tmp_path / "from_file" / "summary.json").read_text())
    assert summary["n"] == 6 and summary["trials"] == 1 and summary["seed"] == 4


def test_bad_config_exit_code(tmp_path, capsys):
    assert main(["simulate", "--delta", "2.0", "--out", str(tmp_path)]) == 2
    assert "delta" in capsys.readouterr().err


def test_thread_env_default(monkeypatch):
    monkeypatch.setenv("JORDAN_SPECTRA_THREADS", "3")
    assert RunConfig("simulate").threads == 3


def test_density_regime_violation(tmp_path):
    code = main(["density", "--n", "100", "--delta", "1e-2", "--trials", "5", "--out", str(tmp_path)])
    assert code == 1
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["status"] == "regime_violation"
    assert verdict["error_term"] >= 1e4


def test_density_insufficient_statistics(tmp_path):
    verdict = run(RunConfig("density", n=100, delta=1e-8, trials=10, out_dir=tmp_path))
    assert verdict["status"] == "insufficient statistics"
    header, rows = read_csv(tmp_path / "histogram.csv")
    assert header == ["r_lo", "r_hi", "count", "trials", "predicted", "poisson_err"]
    assert len(rows) == 12 and all(int(r[3]) == 10 for r in rows)


def test_density_small_pass(tmp_path):
    verdict = run(RunConfig("density", n=60, delta=1e-8, trials=300, seed=5, out_dir=tmp_path))
    assert verdict["status"] == "pass"
    assert set(verdict["criteria"]) == {"mean_count", "radial_profile", "angular_uniformity"}


def test_grushin_check(tmp_path):
    report = run(RunConfig("grushin-check", n=10, delta=1e-4, trials=20, out_dir=tmp_path))
    names = {r["name"] for r in report["invariants"]}
    assert {"inverse_identity", "zero_characterization", "exact_vs_neumann",
            "first_order_residual_scaling", "argument_principle_vs_qr"} <= names
    assert report["all_pass"], report["invariants"]
    assert json.loads((tmp_path / "report.json").read_text())["all_pass"]


def test_asymptotics_check(tmp_path):
    report = run(RunConfig("asymptotics-check", out_dir=tmp_path))
    assert report["all_pass"]
    k0 = [e for e in report["equivalences"] if e["quantity"].startswith("M_inf,0")]
    assert k0[0]["spread"] == pytest.approx(1.0, abs=1e-14)
    assert np.isfinite(report["max_spread"])
    again = run(RunConfig("asymptotics-check", out_dir=tmp_path / "again"))
    assert (tmp_path / "report.json").read_bytes() == (tmp_path / "again" / "report.json").read_bytes()


def test_figures_small(tmp_path):
    summary = run(RunConfig("figures", n=40, seed=1, out_dir=tmp_path))
    assert len(summary["panels"]) == 4
    for k in (2, 3, 4, 5):
        header, rows = read_csv(tmp_path / "figures" / f"delta-1e-{k}.csv")
        assert tuple(header) == FIGURE_COLUMNS
        assert len(rows) == 40
