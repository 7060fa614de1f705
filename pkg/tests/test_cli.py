"""Test suite for the command-line interface"""

import json
import logging
import sys

import pytest

from commands.common import resolve_run_config
from errors import ConfigError
from main import build_parser, main

TINY_RUN = "\n".join([
    "segment_length=4",
    "input_dim=6",
    "heads=2",
    "mlp_hidden=8",
    "epochs=1",
    "batch_size=8",
    "learning_rate=0.001",
    "synthetic=true",
]) + "\n"


@pytest.fixture
def tiny_run_config(tmp_path):
    """Run configuration file for a fast synthetic run"""
    path = tmp_path / "tiny.env"
    path.write_text(TINY_RUN)
    return path


def last_json_line(text):
    return json.loads(text.strip().splitlines()[-1])


# Configuration resolution

def test_cli_flag_overrides_config_file(tiny_run_config):
    """Test precedence: flag over config file over default"""
    args = build_parser().parse_args(["train", "--config", str(tiny_run_config), "--epochs", "7"])
    run, sources = resolve_run_config(args)
    assert run.train.epochs == 7
    assert sources["epochs"] == "cli"
    assert run.model.segment_length == 4
    assert sources["segment_length"] == "config"
    assert run.train.label_smoothing == 0.3
    assert "label_smoothing" not in sources


def test_dataset_root_from_environment(monkeypatch, tmp_path):
    """Test the environment supplies the dataset root when no flag is given"""
    monkeypatch.setenv("RTRANS_DATASET_ROOT", str(tmp_path))
    run, sources = resolve_run_config(build_parser().parse_args(["ingest"]))
    assert run.dataset_root == str(tmp_path)
    assert sources["dataset_root"] == "env"

    run, sources = resolve_run_config(build_parser().parse_args(["ingest", "--dataset-root", "/data/jigsaws"]))
    assert run.dataset_root == "/data/jigsaws"
    assert sources["dataset_root"] == "cli"


def test_seed_reaches_model_and_training():
    """Test one seed drives initialization and training"""
    run, _ = resolve_run_config(build_parser().parse_args(["train", "--seed", "9"]))
    assert run.seed == run.model.seed == run.train.seed == 9


def test_unknown_config_key(tmp_path):
    """Test a config file with a misspelled key"""
    path = tmp_path / "bad.env"
    path.write_text("epoch=3\n")
    with pytest.raises(ConfigError):
        resolve_run_config(build_parser().parse_args(["train", "--config", str(path)]))


def test_invalid_config_value(tmp_path):
    """Test a value that violates its constraint"""
    path = tmp_path / "bad.env"
    path.write_text("label_smoothing=1.5\n")
    with pytest.raises(ConfigError):
        resolve_run_config(build_parser().parse_args(["train", "--config", str(path)]))


# Exit codes and errors

def test_unknown_flag_exits_with_usage(capsys):
    """Test argparse rejects an unknown flag with exit code 2"""
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--no-such-flag"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_missing_dataset_reports_error(tmp_path, capsys):
    """Test a missing dataset gives exit 1 and one JSON line on stderr"""
    code = main(["ingest", "--dataset-root", str(tmp_path / "absent"), "--out", str(tmp_path / "out")])
    assert code == 1
    error = last_json_line(capsys.readouterr().err)
    assert error["error"] == "LayoutError"


def test_failed_command_stderr_is_one_json_line(tmp_path, capsys, monkeypatch):
    """Test log lines go to stdout so stderr holds only the error"""
    root = logging.getLogger()
    monkeypatch.setattr(root, "handlers", [])
    monkeypatch.setattr(root, "level", root.level)

    code = main(["ingest", "--dataset-root", str(tmp_path / "absent"), "--out", str(tmp_path / "out")])
    assert code == 1
    captured = capsys.readouterr()
    lines = captured.err.strip().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["error"] == "LayoutError"
    assert "ingest failed" in captured.out
    assert root.handlers[0].stream is sys.stdout


def test_no_dataset_root_configured(tmp_path, capsys):
    """Test a real-data command without any dataset root"""
    code = main(["ingest", "--out", str(tmp_path)])
    assert code == 1
    assert last_json_line(capsys.readouterr().err)["error"] == "ConfigError"


# Commands

def test_ingest_synthetic_writes_manifest(tmp_path, capsys):
    """Test ingest of the synthetic cohort in the JIGSAWS layout"""
    path = tmp_path / "short.env"
    path.write_text("segment_length=4\n")
    out = tmp_path / "out"
    assert main(["ingest", "--synthetic", "--config", str(path), "--out", str(out)]) == 0
    assert "KT: 40" in capsys.readouterr().out

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["num_trials"] == 40
    assert manifest["trials"][0]["shape"][1] == 76
    first = (out / "manifest.json").read_bytes()

    assert main(["ingest", "--synthetic", "--config", str(path), "--out", str(out)]) == 0
    assert (out / "manifest.json").read_bytes() == first


@pytest.mark.slow
def test_gradcheck_passes(tmp_path, capsys):
    """Test the gradient check on the tiny config, with a tape dump"""
    dump = tmp_path / "tape.txt"
    assert main(["gradcheck", "--dump-tape", str(dump)]) == 0
    result = last_json_line(capsys.readouterr().out)
    assert result["passed"] is True
    assert result["max_relative_error"] < 1e-3
    assert result["failed_ops"] == []
    assert "layernorm" in dump.read_text()


@pytest.mark.slow
@pytest.mark.integration
def test_train_eval_report(tmp_path, tiny_run_config, capsys):
    """Test train, eval and report on a synthetic knot-tying run"""
    out = tmp_path / "run"
    base = ["--config", str(tiny_run_config), "--out", str(out), "--task", "KT", "--scheme", "LOSO"]

    assert main(["train", *base]) == 0
    for key in "12345":
        assert (out / "checkpoints" / f"KT_LOSO_fold-{key}.ckpt").is_file()
    assert (out / "logs" / "KT_LOSO_loss.csv").is_file()

    assert main(["eval", *base]) == 0
    results = json.loads((out / "results" / "KT_LOSO.json").read_text())
    assert len(results["folds"]) == 5
    assert (out / "tables" / "tables.md").is_file()
    first = (out / "results" / "KT_LOSO.json").read_bytes()

    assert main(["eval", *base]) == 0
    assert (out / "results" / "KT_LOSO.json").read_bytes() == first

    capsys.readouterr()
    assert main(["report", *base, "--trial", "Knot_Tying_B001", "--flip-rate", "0.5"]) == 0
    feedback = out / "feedback" / "KT_LOSO"
    timeline = json.loads((feedback / "Knot_Tying_B001.json").read_text())
    assert timeline["trial_id"] == "Knot_Tying_B001"
    assert (feedback / "blinded" / "Knot_Tying_B001.md").is_file()
    assert (feedback / "unblinding" / "Knot_Tying_B001.json").is_file()
    assert not (feedback / "Knot_Tying_C001.json").exists()

    assert main(["report", *base, "--trial", "Knot_Tying_Z009"]) == 1
    assert last_json_line(capsys.readouterr().err)["error"] == "MissingTrialError"


@pytest.mark.slow
@pytest.mark.integration
def test_train_runs_are_byte_identical(tmp_path, tiny_run_config):
    """Test two train runs with one config write identical checkpoints and loss logs"""
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["train", "--config", str(tiny_run_config), "--out", str(out), "--task", "KT", "--scheme", "LOSO"]) == 0
        outputs.append({
            p.relative_to(out).as_posix(): p.read_bytes()
            for sub in ("checkpoints", "logs")
            for p in sorted((out / sub).rglob("*"))
            if p.is_file()
        })
    first, second = outputs
    assert len(first) == 11
    assert first == second


# Monitoring

def test_sentry_disabled_without_dsn():
    """Test no DSN means no Sentry client"""
    from monitoring.sentry_config import init_sentry
    assert init_sentry() is False


def test_sentry_filter_hides_dataset_root():
    """Test the dataset path is removed from run context before sending"""
    from monitoring.sentry_config import filter_sensitive_data
    event = {"contexts": {"run": {"command": "ingest", "dataset_root": "/data/jigsaws"}}}
    filtered = filter_sensitive_data(event, {})
    assert filtered["contexts"]["run"]["dataset_root"] == "[FILTERED]"
    assert filtered["contexts"]["run"]["command"] == "ingest"
