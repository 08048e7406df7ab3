"""End-to-end tests for the command-line interface."""

import contextlib
import io
import json

import pytest

from nfbf.cli import main
from nfbf.harness import CSV_HEADER


def _run(argv):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def _write_config(tmp_path, **kw):
    doc = dict(
        experiment="sumrate-vs-snr",
        schemes=["steer-perfect", "hbf-zf-perfect"],
        trials=2,
        sweep=[0.0, 10.0],
        n_bs=16,
        k=2,
        l=2,
        n_dis=10,
    )
    doc.update(kw)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_run_writes_deterministic_csv(tmp_path):
    cfg = _write_config(tmp_path)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    code1, _, _ = _run(["run", "--config", cfg, "--out", str(out1)])
    code2, _, _ = _run(["run", "--config", cfg, "--out", str(out2)])
    assert code1 == 0 and code2 == 0
    text = out1.read_text()
    assert text == out2.read_text()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 2 * 2


def test_run_stdout_json(tmp_path):
    cfg = _write_config(tmp_path, schemes=["steer-perfect"], sweep=[5.0])
    code, out, _ = _run(["run", "--config", cfg, "--format", "json"])
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 1
    assert rows[0]["scheme"] == "steer-perfect"
    assert rows[0]["sweep"] == 5.0
    assert rows[0]["trials"] == 2


def test_run_overrides_seed_trials_and_snr(tmp_path):
    cfg = _write_config(tmp_path, schemes=["steer-perfect"])
    # values starting with a dash must use the --flag=value form
    code, out, _ = _run(
        ["run", "--config", cfg, "--trials", "1", "--seed", "3", "--snr-db=-5,5"]
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1 + 2
    assert lines[1].startswith("-5.0,steer-perfect,sum_rate,")
    assert lines[2].startswith("5.0,steer-perfect,sum_rate,")
    assert lines[1].endswith(",1")
    # a different seed changes the numbers
    code2, out2, _ = _run(
        ["run", "--config", cfg, "--trials", "1", "--seed", "4", "--snr-db=-5,5"]
    )
    assert code2 == 0 and out2 != out


def test_run_without_config_uses_defaults_scaled_down(tmp_path):
    # no config: defaults would be heavy, so shrink everything via overrides
    cfg = _write_config(tmp_path, schemes=["steer-perfect"], sweep=[0.0])
    code, out, _ = _run(["run", "--config", cfg, "--nbs", "8", "--k", "1"])
    assert code == 0
    assert out.splitlines()[1].endswith(",2")


def test_scalar_override_errors_on_lists(tmp_path):
    cfg = _write_config(tmp_path, experiment="sumrate-vs-k", sweep=[1, 2])
    code, _, err = _run(["run", "--config", cfg, "--snr-db", "0,10"])
    assert code == 2
    assert "error:" in err
    cfg2 = _write_config(tmp_path, schemes=["steer-perfect"])
    code2, _, err2 = _run(["run", "--config", cfg2, "--k", "2,4"])
    assert code2 == 2
    assert "error:" in err2


def test_sweep_experiment_accepts_list_override(tmp_path):
    cfg = _write_config(
        tmp_path, experiment="sumrate-vs-nbs", schemes=["steer-perfect"], sweep=[16]
    )
    code, out, _ = _run(["run", "--config", cfg, "--nbs", "8,16"])
    assert code == 0
    lines = out.splitlines()
    assert lines[1].startswith("8,") and lines[2].startswith("16,")


def test_malformed_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code, _, err = _run(["run", "--config", str(bad)])
    assert code == 2 and "error:" in err
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"experiment": "sumrate-vs-snr", "typo": 1}))
    code2, _, err2 = _run(["run", "--config", str(unknown)])
    assert code2 == 2 and "error:" in err2
    missing = tmp_path / "does-not-exist.json"
    code3, _, err3 = _run(["run", "--config", str(missing)])
    assert code3 == 2 and "error:" in err3


def test_codebook_export(tmp_path):
    out = tmp_path / "cb.csv"
    code, stdout, _ = _run(["codebook", "--nbs", "8", "--out", str(out)])
    assert code == 0
    assert "wrote 2560 codewords" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == "p,q,angle_rad,radius_wavelengths"
    assert len(lines) == 1 + 8 * 320
    code2, _, err = _run(["codebook", "--nbs", "8"])
    assert code2 == 2 and "needs --out" in err


def test_pattern_prints_gain_table(tmp_path):
    cfg = _write_config(
        tmp_path,
        experiment="beam-pattern",
        schemes=["steer-perfect"],
        n_bs=16,
    )
    out = tmp_path / "pattern.csv"
    code, stdout, _ = _run(["pattern", "--config", cfg, "--out", str(out)])
    assert code == 0
    assert "UE1" in stdout and "steer-perfect" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == "scheme,angle_deg,radius,gain_db"
    assert len(lines) == 1 + 181 * 30


def test_selftest_passes_and_exits_zero():
    code, out, _ = _run(["selftest", "--seed", "0"])
    assert code == 0
    assert "checks passed" in out
    head = out.splitlines()[0]
    assert head.startswith("ok") or head.startswith("PASS") or "ok" in head


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit):
        main([])
