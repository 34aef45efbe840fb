import json
import logging

import pytest

from decode_energy.app import create_app, load_config
from decode_energy.config import BaseConfig, LocalConfig, TestingConfig
from decode_energy.models import EventKind
from decode_energy.services.datasets import DATASET_HEADER, load_dataset, load_model, save_dataset
from decode_energy.services.synthetic import generate
from tests.helpers import balanced_spec, fixture_path


@pytest.fixture
def reference_csv(tmp_path, cli, runner):
    path = tmp_path / "reference.csv"
    result = runner.invoke(cli, ["generate", "--preset", "paper4", "-n", "120", "--seed", "1", "--out", str(path)])
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def model_path(tmp_path, cli, runner, reference_csv):
    path = tmp_path / "model.json"
    result = runner.invoke(cli, ["fit", str(reference_csv), "--features", "4pe", "--out", str(path)])
    assert result.exit_code == 0, result.output
    return path


def _json(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


# ============================================================================
# APP FACTORY AND CONFIG
# ============================================================================

def test_commands_are_registered(cli):
    assert set(cli.commands) == {
        "ingest", "generate", "correlate", "crossval", "select", "compare", "fit", "predict", "capacitance",
    }


def test_load_config_from_dotted_path():
    assert load_config("decode_energy.config.LocalConfig") is LocalConfig
    assert load_config(TestingConfig) is TestingConfig


def test_load_config_from_environment(monkeypatch):
    monkeypatch.setenv("DECODE_ENERGY_CONFIG", "decode_energy.config.TestingConfig")
    assert load_config() is TestingConfig


def test_unknown_config_class():
    with pytest.raises(ValueError):
        load_config("decode_energy.config.NoSuchConfig")


def test_invalid_configuration_is_rejected():
    class BrokenConfig(BaseConfig):
        DEFAULT_K = 1
        CACHE_TYPE = "RedisCache"

    with pytest.raises(ValueError) as excinfo:
        create_app(BrokenConfig)
    message = str(excinfo.value)
    assert "DEFAULT_K" in message
    assert "CACHE_TYPE" in message


def test_debug_flag_turns_on_debug_logging():
    class DebugConfig(TestingConfig):
        DEBUG = True
        LOG_LEVEL = "ERROR"

    create_app(DebugConfig)
    assert logging.getLogger().level == logging.DEBUG
    create_app(TestingConfig)
    assert logging.getLogger().level != logging.DEBUG


# ============================================================================
# INGEST
# ============================================================================

def test_ingest_appends_row(tmp_path, cli, runner):
    dataset_path = tmp_path / "d.csv"
    result = runner.invoke(cli, [
        "ingest", fixture_path("plain.cgout"), "--dataset", str(dataset_path),
        "--energy", "1.25", "--time", "0.42", "--id", "bq-32", "--codec", "HEVC", "--decoder", "ffmpeg",
    ])
    assert result.exit_code == 0, result.output
    lines = dataset_path.read_text().splitlines()
    assert lines[0] == ",".join(DATASET_HEADER)
    assert lines[1] == "bq-32,HEVC,ffmpeg,1.25,0.42,10000000000,1000000,20000,4000000000,60000000,3000000," \
                       "1000000000,9000000,1000000"


def test_ingest_default_id_is_profile_name(tmp_path, cli, runner):
    dataset_path = tmp_path / "d.csv"
    runner.invoke(cli, ["ingest", fixture_path("crlf.cgout"), "--dataset", str(dataset_path),
                        "--energy", "2", "--time", "1"])
    assert load_dataset(dataset_path).ids == ("crlf.cgout",)


def test_ingest_negative_energy(tmp_path, cli, runner):
    result = runner.invoke(cli, ["ingest", fixture_path("plain.cgout"), "--dataset", str(tmp_path / "d.csv"),
                                 "--energy", "-1", "--time", "0.42"])
    assert result.exit_code == 3
    assert "energy must be positive" in result.output


def test_ingest_duplicate_id(tmp_path, cli, runner):
    args = ["ingest", fixture_path("plain.cgout"), "--dataset", str(tmp_path / "d.csv"),
            "--energy", "1.25", "--time", "0.42", "--id", "same"]
    assert runner.invoke(cli, args).exit_code == 0
    assert runner.invoke(cli, args).exit_code == 3


@pytest.mark.parametrize("name, code", [
    ("bad_token.cgout", 2),
    ("bad_arity.cgout", 2),
    ("missing_summary.cgout", 2),
    ("missing_events.cgout", 2),
    ("unmapped.cgout", 2),
    ("hierarchy_violation.cgout", 3),
])
def test_ingest_malformed_profiles(tmp_path, cli, runner, name, code):
    result = runner.invoke(cli, ["ingest", fixture_path(name), "--dataset", str(tmp_path / "d.csv"),
                                 "--energy", "1", "--time", "1"])
    assert result.exit_code == code


def test_ingest_parse_error_names_the_line(tmp_path, cli, runner):
    result = runner.invoke(cli, ["ingest", fixture_path("bad_token.cgout"), "--dataset", str(tmp_path / "d.csv"),
                                 "--energy", "1", "--time", "1"])
    assert "line 3:" in result.output


# ============================================================================
# GENERATE
# ============================================================================

def test_generate_is_byte_identical(tmp_path, cli, runner):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        runner.invoke(cli, ["generate", "--preset", "paper4", "-n", "50", "--seed", "4", "--noise", "0.05",
                            "--out", str(path)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_generate_with_custom_coefficients(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    result = runner.invoke(cli, ["generate", "-n", "20", "--coefficient", "I_r=1e-9", "--out", str(path)])
    assert result.exit_code == 0, result.output
    model_path = tmp_path / "m.json"
    runner.invoke(cli, ["fit", str(path), "--features", "1pe", "--out", str(model_path)])
    assert load_model(model_path).coefficients[EventKind.I_R] == pytest.approx(1e-9, rel=1e-9)


def test_generate_append_builds_groups(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    runner.invoke(cli, ["generate", "-n", "10", "--codec", "HEVC", "--decoder", "ffmpeg", "--out", str(path)])
    runner.invoke(cli, ["generate", "-n", "10", "--codec", "VP9", "--decoder", "libvpx", "--append",
                        "--out", str(path)])
    assert list(load_dataset(path).groups()) == [("HEVC", "ffmpeg"), ("VP9", "libvpx")]


def test_generate_bad_coefficient(tmp_path, cli, runner):
    result = runner.invoke(cli, ["generate", "--coefficient", "I_r", "--out", str(tmp_path / "d.csv")])
    assert result.exit_code == 3


def test_generate_time_resolution(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    runner.invoke(cli, ["generate", "-n", "10", "--time-resolution", "0.25", "--out", str(path)])
    for record in load_dataset(path):
        assert (record.decode_time / 0.25) == pytest.approx(round(record.decode_time / 0.25))


# ============================================================================
# CORRELATE
# ============================================================================

def test_correlate_json_keys(cli, runner, reference_csv):
    document = _json(runner.invoke(cli, ["correlate", str(reference_csv), "--format", "json"]))
    assert list(document) == [
        "I_r", "I_L1", "I_LL", "R_r", "R_L1", "R_LL", "W_r", "W_L1", "W_LL", "time",
    ]


def test_correlate_text_table(cli, runner, reference_csv):
    result = runner.invoke(cli, ["correlate", str(reference_csv)])
    assert result.exit_code == 0
    for label in ("r", "L1", "LL", "DecodeTime"):
        assert label in result.output


def test_correlate_by_group(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    runner.invoke(cli, ["generate", "-n", "10", "--codec", "HEVC", "--out", str(path)])
    runner.invoke(cli, ["generate", "-n", "10", "--codec", "VP9", "--append", "--out", str(path)])
    document = _json(runner.invoke(cli, ["correlate", str(path), "--by-group", "--format", "json"]))
    assert [group["codec"] for group in document["groups"]] == ["HEVC", "VP9"]
    assert document["pooled"]["n_records"] == 20


def test_correlate_group_title_is_not_markup(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    runner.invoke(cli, ["generate", "-n", "10", "--codec", "[red]X", "--decoder", "d", "--out", str(path)])
    result = runner.invoke(cli, ["correlate", str(path), "--by-group"])
    assert result.exit_code == 0, result.output
    assert "[red]X (d)" in result.output


def test_correlate_empty_dataset(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    path.write_text(",".join(DATASET_HEADER) + "\n")
    assert runner.invoke(cli, ["correlate", str(path)]).exit_code == 2


def test_correlate_missing_file(tmp_path, cli, runner):
    assert runner.invoke(cli, ["correlate", str(tmp_path / "none.csv")]).exit_code == 2


# ============================================================================
# FIT AND PREDICT
# ============================================================================

def test_fit_recovers_published_coefficients(cli, runner, model_path):
    model = load_model(model_path)
    expected = {"I_r": 0.47e-9, "I_LL": 0.43e-6, "W_r": 1.5e-9, "W_LL": 0.16e-6}
    for predictor, value in model.coefficients.items():
        assert value == pytest.approx(expected[predictor.label], rel=1e-6)


def test_fit_preset_alias(tmp_path, cli, runner, reference_csv):
    documents = []
    for features in ("1pe", "I_r"):
        result = runner.invoke(cli, ["fit", str(reference_csv), "--features", features,
                                     "--out", str(tmp_path / f"{features}.json"), "--format", "json"])
        documents.append(_json(result))
    assert documents[0] == documents[1]


def test_fit_json_matches_model_file(tmp_path, cli, runner, reference_csv):
    out = tmp_path / "m.json"
    result = runner.invoke(cli, ["fit", str(reference_csv), "--out", str(out), "--format", "json"])
    assert result.exit_code == 0, result.output
    assert result.stdout == out.read_text(encoding="utf-8")
    assert json.loads(result.stdout)["format_version"] == 1


def test_fit_text_output_uses_readable_units(tmp_path, cli, runner, reference_csv):
    result = runner.invoke(cli, ["fit", str(reference_csv), "--out", str(tmp_path / "m.json")])
    assert result.exit_code == 0
    assert "0.47 nJ" in result.output
    assert "0.43 µJ" in result.output


def test_fit_underdetermined(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    runner.invoke(cli, ["generate", "-n", "3", "--out", str(path)])
    result = runner.invoke(cli, ["fit", str(path), "--features", "9pe", "--out", str(tmp_path / "m.json")])
    assert result.exit_code == 4


def test_fit_unknown_feature(tmp_path, cli, runner, reference_csv):
    result = runner.invoke(cli, ["fit", str(reference_csv), "--features", "Bc", "--out", str(tmp_path / "m.json")])
    assert result.exit_code == 3


def test_predict_published_example(cli, runner, model_path):
    result = runner.invoke(cli, ["predict", str(model_path), "--counts", "1e10,1e6,1e9,1e6"])
    assert result.exit_code == 0, result.output
    assert result.output.strip() == "6.79 J"


def test_predict_labelled_counts(cli, runner, model_path):
    result = runner.invoke(cli, ["predict", str(model_path), "--counts", "W_LL=1e6,W_r=1e9,I_LL=1e6,I_r=1e10"])
    assert result.output.strip() == "6.79 J"


def test_predict_zero_counts(cli, runner, model_path):
    result = runner.invoke(cli, ["predict", str(model_path), "--counts", "0,0,0,0"])
    assert result.output.strip() == "0 J"


def test_predict_from_profile(cli, runner, model_path):
    document = _json(runner.invoke(cli, ["predict", str(model_path), "--profile", fixture_path("plain.cgout"),
                                         "--format", "json"]))
    # 1e10 I_r, 2e4 I_LL, 1e9 W_r, 1e6 W_LL
    assert document["energy_J"] == pytest.approx(4.7 + 0.0086 + 1.5 + 0.16, rel=1e-5)


def test_predict_feature_mismatch(tmp_path, cli, runner, reference_csv, model_path):
    assert runner.invoke(cli, ["predict", str(model_path), "--counts", "1,2"]).exit_code == 4
    assert runner.invoke(cli, ["predict", str(model_path), "--time", "1.0"]).exit_code == 4

    time_model = tmp_path / "time.json"
    runner.invoke(cli, ["fit", str(reference_csv), "--features", "time", "--out", str(time_model)])
    result = runner.invoke(cli, ["predict", str(time_model), "--profile", fixture_path("plain.cgout")])
    assert result.exit_code == 4


def test_predict_needs_exactly_one_input(cli, runner, model_path):
    assert runner.invoke(cli, ["predict", str(model_path)]).exit_code == 3


def test_predict_bad_model_file(tmp_path, cli, runner):
    path = tmp_path / "m.json"
    path.write_text("{}")
    assert runner.invoke(cli, ["predict", str(path), "--counts", "1"]).exit_code == 2


# ============================================================================
# CROSSVAL, SELECT, COMPARE
# ============================================================================

def test_crossval_noiseless_prints_zero(cli, runner, reference_csv):
    result = runner.invoke(cli, ["crossval", str(reference_csv), "--features", "9pe"])
    assert result.exit_code == 0, result.output
    assert "0.00 %" in result.output


def test_crossval_default_k_is_ten(cli, runner, reference_csv):
    document = _json(runner.invoke(cli, ["crossval", str(reference_csv), "--format", "json"]))
    assert document["k"] == 10
    assert document["seed"] == 0


def test_crossval_output_is_stable(cli, runner, tmp_path):
    path = tmp_path / "d.csv"
    save_dataset(generate(balanced_spec(n_records=60, noise_sigma=0.05, seed=3)), path)
    outputs = [runner.invoke(cli, ["crossval", str(path), "--seed", "5", "--per-record"]).output for _ in range(2)]
    assert outputs[0] == outputs[1]
    assert "SYN-synthetic-00059" in outputs[0]


def test_crossval_per_record_json(cli, runner, reference_csv):
    document = _json(runner.invoke(cli, ["crossval", str(reference_csv), "--per-record", "--format", "json"]))
    assert len(document["per_record"]) == 120


def test_crossval_too_many_folds(cli, runner, reference_csv):
    assert runner.invoke(cli, ["crossval", str(reference_csv), "--k", "500"]).exit_code == 3


def test_select_full_set(cli, runner, reference_csv):
    document = _json(runner.invoke(cli, ["select", str(reference_csv), "--size", "9", "--format", "json"]))
    assert document["best"] == ["I_r", "I_L1", "I_LL", "R_r", "R_L1", "R_LL", "W_r", "W_L1", "W_LL"]


def test_select_ranking_lists_every_subset(cli, runner, reference_csv):
    document = _json(runner.invoke(cli, ["select", str(reference_csv), "--size", "2", "--k", "4", "--ranking",
                                         "--format", "json"]))
    assert len(document["ranking"]) == 36
    errors = [row["mean_relative_error"] for row in document["ranking"]]
    assert errors == sorted(errors)


def test_compare_rows_and_columns(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    runner.invoke(cli, ["generate", "-n", "40", "--codec", "HEVC", "--decoder", "ffmpeg", "--noise", "0.03",
                        "--out", str(path)])
    runner.invoke(cli, ["generate", "-n", "40", "--codec", "VP9", "--decoder", "libvpx", "--noise", "0.03",
                        "--seed", "1", "--append", "--out", str(path)])
    document = _json(runner.invoke(cli, ["compare", str(path), "--format", "json"]))
    assert document["columns"] == ["1 PE", "4 PE", "9 PE", "time"]
    assert [row["label"] for row in document["rows"]] == ["HEVC (ffmpeg)", "VP9 (libvpx)", "All"]

    text = runner.invoke(cli, ["compare", str(path)]).output
    assert "HEVC (ffmpeg)" in text
    assert "All" in text


# ============================================================================
# CAPACITANCE
# ============================================================================

def test_capacitance_reports_cv2_and_c(tmp_path, cli, runner):
    path = tmp_path / "d.csv"
    runner.invoke(cli, ["generate", "-n", "30", "--coefficient", "I_r=0.8e-9", "--out", str(path)])
    document = _json(runner.invoke(cli, ["capacitance", str(path), "--voltage", "2", "--format", "json"]))
    assert document["cv2_J"] == pytest.approx(0.8e-9, rel=1e-9)
    assert document["capacitance_F"] == pytest.approx(0.2e-9, rel=1e-9)

    text = runner.invoke(cli, ["capacitance", str(path)]).output
    assert "0.8 nJ" in text
