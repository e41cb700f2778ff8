import csv
import json
import os

import pytest
import yaml
from click.testing import CliRunner

from semcom_tools.__main__ import semcom_tools_cli
from semcom_tools.experiment_config import build_config
from semcom_tools.run_experiment import run

TEST_DIR = os.path.dirname(os.path.abspath(__file__))
EXAMPLE_CONFIGS = os.path.join(os.path.dirname(TEST_DIR), "example_data", "configs")


def invoke(*args):
    return CliRunner().invoke(semcom_tools_cli, [str(arg) for arg in args])


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_codec_profile_of_the_ramp(tmp_path):
    out = tmp_path / "codec.csv"
    result = invoke(
        "codec-profile", "-c", os.path.join(EXAMPLE_CONFIGS, "codec_profile.yml"),
        "-o", out,
    )
    assert result.exit_code == 0, result.output
    rows = read_rows(out)
    assert [row["layer"] for row in rows] == ["0", "1", "2"]
    assert [float(row["distortion"]) for row in rows] == pytest.approx(
        [7.5, 0.25, 0.0], abs=1e-12
    )
    assert rows[0]["experiment"] == "codec-profile"
    assert (tmp_path / "codec.report.json").is_file()
    assert (tmp_path / "codec.config.yml").is_file()


def test_diversity_closed_form_single_row(tmp_path):
    out = tmp_path / "div.csv"
    result = invoke(
        "diversity", "-c", os.path.join(TEST_DIR, "diversity_config.yaml"), "-o", out
    )
    assert result.exit_code == 0, result.output
    rows = read_rows(out)
    assert len(rows) == 1
    assert float(rows[0]["recovery_probability"]) == pytest.approx(0.972)
    assert rows[0]["seed"] == "5"
    report = json.loads((tmp_path / "div.report.json").read_text())
    assert report["summary"]["recovery_probability"] == pytest.approx(0.972)


def test_diversity_scaling_example(tmp_path):
    out = tmp_path / "scaling.csv"
    result = invoke(
        "diversity", "-c", os.path.join(EXAMPLE_CONFIGS, "diversity_scaling.yml"),
        "-o", out,
    )
    assert result.exit_code == 0, result.output
    probabilities = [float(row["recovery_probability"]) for row in read_rows(out)]
    assert len(probabilities) == 4
    assert probabilities[-1] >= 0.99


def test_sweep_runs_are_byte_identical_across_workers(tmp_path):
    config = tmp_path / "sweep.yml"
    config.write_text(
        yaml.safe_dump(
            {
                "experiment": "sweep-snr",
                "signal": {"generator": "ramp", "length": 8},
                "snr_grid_db": [0, 10, 20],
            }
        )
    )
    outputs = []
    for name, workers in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / f"{name}.csv"
        result = invoke(
            "sweep-snr", "-c", config, "-s", 99, "-t", 70000, "-w", workers, "-o", out
        )
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_config_echo_reproduces_the_csv(tmp_path):
    first = tmp_path / "first.csv"
    result = invoke("broadcast", "-t", 2000, "-s", 8, "-o", first)
    assert result.exit_code == 0, result.output
    second = tmp_path / "second.csv"
    result = invoke("broadcast", "-c", tmp_path / "first.config.yml", "-o", second)
    assert result.exit_code == 0, result.output
    assert first.read_bytes() == second.read_bytes()


def test_coupled_broadcast_has_no_ordering_violations(tmp_path):
    config = build_config(
        {"experiment": "broadcast", "seed": 1, "n_trials": 10000, "coupled": True}
    )
    report = run(config, str(tmp_path / "broadcast.csv"))
    assert report.summary["ordering_violations"] == 0
    assert [row[3] for row in report.rows] == ["poor", "fair", "good"]


def test_missing_config_file(tmp_path):
    result = invoke("sweep-snr", "-c", tmp_path / "none.yml", "-o", tmp_path / "x.csv")
    assert result.exit_code == 3


def test_unparsable_config_file(tmp_path):
    config = tmp_path / "bad.yml"
    config.write_text("seed: [1\n")
    result = invoke("sweep-snr", "-c", config, "-o", tmp_path / "x.csv")
    assert result.exit_code == 4


def test_invalid_config_file(tmp_path):
    result = invoke(
        "sweep-snr", "-c", os.path.join(TEST_DIR, "invalid_config.yaml"),
        "-o", tmp_path / "x.csv",
    )
    assert result.exit_code == 5
    assert not (tmp_path / "x.csv").exists()


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    result = invoke(
        "diversity", "-c", os.path.join(TEST_DIR, "diversity_config.yaml"),
        "-o", blocker / "out.csv",
    )
    assert result.exit_code == 6


def test_seed_must_fit_in_64_bits(tmp_path):
    result = invoke("diversity", "-s", 2**64, "-o", tmp_path / "x.csv")
    assert result.exit_code == 2


def test_invalid_scaling_config_exits_with_validation_code(tmp_path):
    config = tmp_path / "scaling.yml"
    config.write_text(
        yaml.safe_dump(
            {
                "experiment": "diversity",
                "diversity": {"mode": "scaling", "success_fraction_required": 1.5},
            }
        )
    )
    result = invoke("diversity", "-c", config, "-o", tmp_path / "x.csv")
    assert result.exit_code == 5
    assert not (tmp_path / "x.csv").exists()
    config.write_text(
        yaml.safe_dump(
            {
                "experiment": "diversity",
                "diversity": {"mode": "scaling", "m_values": [100, 10]},
            }
        )
    )
    result = invoke("diversity", "-c", config, "-o", tmp_path / "x.csv")
    assert result.exit_code == 5
