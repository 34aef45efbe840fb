"""
End-to-end runs through the command line: generate a dataset, then
fit, cross-validate and compare the way a user would.
"""

import json

import pytest

from decode_energy.models import Dataset, EventKind
from decode_energy.services.datasets import load_model, save_dataset
from decode_energy.services.synthetic import FOUR_PE_COEFFICIENTS, generate
from tests.helpers import balanced_spec, relative_difference


def _run(cli, runner, *args):
    result = runner.invoke(cli, [str(arg) for arg in args])
    assert result.exit_code == 0, result.output
    return result


def _crossval_error(cli, runner, dataset_path, features):
    result = _run(cli, runner, "crossval", dataset_path, "--features", features, "--format", "json")
    return json.loads(result.stdout)["mean_relative_error"]


def test_noiseless_pipeline_recovers_coefficients(tmp_path, cli, runner):
    dataset_path = tmp_path / "d.csv"
    model_path = tmp_path / "m.json"
    _run(cli, runner, "generate", "--preset", "paper4", "-n", 500, "--noise", 0, "--seed", 7, "--out", dataset_path)
    _run(cli, runner, "fit", dataset_path, "--features", "4pe", "--out", model_path)

    model = load_model(model_path)
    for kind, expected in FOUR_PE_COEFFICIENTS.items():
        assert relative_difference(model[kind], expected) <= 1e-6
    assert _crossval_error(cli, runner, dataset_path, "4pe") < 1e-9


def test_noisy_pipeline_stays_close(tmp_path, cli, runner):
    dataset_path = tmp_path / "d.csv"
    model_path = tmp_path / "m.json"
    _run(cli, runner, "generate", "--preset", "balanced4", "-n", 500, "--noise", 0.05, "--seed", 11,
         "--out", dataset_path)
    _run(cli, runner, "fit", dataset_path, "--features", "4pe", "--out", model_path)

    model = load_model(model_path)
    for kind in (EventKind.I_R, EventKind.I_LL, EventKind.W_R, EventKind.W_LL):
        assert relative_difference(model[kind], FOUR_PE_COEFFICIENTS[kind]) <= 0.05
    assert 0.015 <= _crossval_error(cli, runner, dataset_path, "4pe") <= 0.075


def test_instruction_count_alone_is_worse(tmp_path, cli, runner):
    dataset_path = tmp_path / "d.csv"
    save_dataset(generate(balanced_spec(n_records=300, noise_sigma=0.02, seed=5)), dataset_path)
    assert _crossval_error(cli, runner, dataset_path, "1pe") > _crossval_error(cli, runner, dataset_path, "4pe")


def test_pooling_two_regimes_is_worst(tmp_path, cli, runner):
    doubled = {kind: 2.5 * value for kind, value in FOUR_PE_COEFFICIENTS.items()}
    first = generate(balanced_spec(n_records=150, noise_sigma=0.02, seed=1, codec="A", decoder="a"))
    second = generate(balanced_spec(n_records=150, noise_sigma=0.02, seed=2, codec="B", decoder="b",
                                    coefficients=doubled))
    dataset_path = tmp_path / "d.csv"
    save_dataset(Dataset.concat(first, second), dataset_path)

    document = json.loads(_run(cli, runner, "compare", dataset_path, "--format", "json").stdout)
    errors = {row["label"]: row["errors"]["4 PE"] for row in document["rows"]}
    assert errors["All"] > max(errors["A (a)"], errors["B (b)"])


@pytest.mark.parametrize("command", [
    ("crossval", "--per-record"),
    ("select", "--size", "2", "--ranking"),
    ("compare",),
])
def test_reports_are_reproducible(tmp_path, cli, runner, command):
    dataset_path = tmp_path / "d.csv"
    save_dataset(generate(balanced_spec(n_records=80, noise_sigma=0.05, seed=9)), dataset_path)
    name, *options = command
    first = _run(cli, runner, name, dataset_path, *options, "--seed", 3)
    second = _run(cli, runner, name, dataset_path, *options, "--seed", 3)
    assert first.output == second.output


def test_select_finds_the_generating_events(tmp_path, cli, runner):
    dataset_path = tmp_path / "d.csv"
    save_dataset(generate(balanced_spec(n_records=500, noise_sigma=0.01, seed=21)), dataset_path)
    document = json.loads(_run(cli, runner, "select", dataset_path, "--size", 4, "--ranking",
                               "--format", "json").stdout)
    assert document["best"] == ["I_r", "I_LL", "W_r", "W_LL"]
    assert len(document["ranking"]) == 126
