import json
import os

import pytest

from outerstretch.cli import main
from outerstretch.experiments import ExperimentConfig, run_experiment
from outerstretch.marked_graphs import save_graph, theta, unit_rose


@pytest.fixture
def rose_path(tmp_path):
    path = tmp_path / "rose.json"
    save_graph(unit_rose(2), str(path))
    return str(path)


@pytest.fixture
def theta_path(tmp_path):
    path = tmp_path / "theta.json"
    save_graph(theta([1, 1, 1]), str(path))
    return str(path)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_stretch_exact_cli(capsys):
    code, data = _run(capsys, ["stretch", "exact", "--aut", "a->ab; b->b"])
    assert code == 0
    assert data["lambda"] == "7/6"


def test_stretch_mc_cli(capsys):
    code, data = _run(
        capsys,
        ["stretch", "mc", "--aut", "a->ab; b->b", "--steps", "20000",
         "--trials", "3", "--seed", "1"],
    )
    assert code == 0
    assert abs(data["lambda_estimate"] - 7 / 6) < 0.05
    assert data["seed"] == 1


def test_stretch_rejects_non_automorphism(capsys):
    code, _ = _run(capsys, ["stretch", "exact", "--aut", "a->ab; b->ba"])
    assert code == 1


def test_lipschitz_cli(capsys, rose_path, theta_path):
    code, data = _run(
        capsys, ["lipschitz", "--tree", rose_path, "--other", theta_path]
    )
    assert code == 0
    assert "Lambda" in data and "witness" in data


def test_candidates_cli(capsys, rose_path):
    code, data = _run(capsys, ["candidates", "--tree", rose_path])
    assert code == 0
    assert data["count"] == len(data["candidates"]) > 0


def test_current_weights_cli(capsys):
    code, data = _run(
        capsys,
        ["current", "weights", "--current", "uniform:2", "--depth", "2"],
    )
    assert code == 0
    assert data["weights"]["a"] == "1/2"
    assert data["weights"]["ab"] == "1/6"


def test_current_j_weight_cli(capsys, rose_path):
    code, data = _run(
        capsys,
        ["current", "j-weight", "--tree", rose_path, "--word", "ab"],
    )
    assert code == 0
    assert data["weight"] > 0
    assert data["certified_tail"] < 1e-6


def test_entropy_cli(capsys, rose_path):
    import math

    code, data = _run(capsys, ["entropy", "--tree", rose_path])
    assert code == 0
    assert abs(data["entropy"] - math.log(3)) < 1e-9


def test_growth_cli_with_fit(capsys):
    code, data = _run(
        capsys,
        ["growth", "--aut", "a->ab; b->b", "--mode", "extremal",
         "--nmax", "6", "--fit"],
    )
    assert code == 0
    assert data["values"][0] == "2"
    assert data["fit"]["m_est"] == 1


def test_missing_file_is_input_error(capsys):
    code, _ = _run(capsys, ["entropy", "--tree", "/nonexistent.json"])
    assert code == 1


def test_bad_subcommand_is_input_error(capsys):
    assert main(["no-such-command"]) == 1


def test_experiment_paper_suite_cli(capsys, tmp_path):
    code, data = _run(
        capsys, ["experiment", "paper-suite", "--out", str(tmp_path)]
    )
    assert code == 0
    assert data["all_pass"] is True
    assert any(f.endswith(".json") for f in os.listdir(tmp_path))


def test_rho_scan_is_seed_deterministic(tmp_path):
    config = ExperimentConfig(
        kind="rho_scan", rank=2, samples=6, seed=3, output_dir=None
    )
    a = run_experiment(config)
    b = run_experiment(config)
    assert a == b
    c = run_experiment(
        ExperimentConfig(kind="rho_scan", rank=2, samples=6, seed=4)
    )
    assert c["config_hash"] != a["config_hash"]


def test_inverse_scan_reports_zero_set_match(tmp_path):
    report = run_experiment(
        ExperimentConfig(
            kind="inverse_scan",
            rank=2,
            samples=8,
            seed=0,
            output_dir=str(tmp_path),
        )
    )
    assert report["zero_sets_match"] is True
    assert report["max_log_ratio"] >= 0
    names = os.listdir(tmp_path)
    assert any(n.endswith(".csv") for n in names)
    assert any(n.endswith(".svg") for n in names)


def test_experiment_config_validation():
    with pytest.raises(Exception):
        ExperimentConfig(kind="bogus")
    with pytest.raises(Exception):
        ExperimentConfig(kind="rho_scan", samples=0)
