import io
import json
import warnings

import numpy as np
import pytest

from molagent.cli import main
from molagent.evolve import SeedShortfallError
from molagent.ledger import read_ledger, strip_timestamps
from molagent.runner import ConfigError, load_config, load_seeds, run, validate_config
from servers import LLMFixture, OracleFixture, serve

SMALL = ["--population-size", "10", "--n-offspring", "5", "--budget", "30"]


def test_load_seeds_bundled():
    seeds = load_seeds(None, 60, np.random.default_rng(0))
    assert len(seeds) == 60 and len(set(seeds)) == 60


def test_load_seeds_warns_and_skips(tmp_path):
    f = tmp_path / "s.smi"
    f.write_text("CCO\nC1CC\n\n# note\nc1ccccc1 benzene\n")
    with pytest.warns(UserWarning, match="s.smi:2"):
        seeds = load_seeds(f, 2, np.random.default_rng(0))
    assert sorted(seeds) == ["CCO", "c1ccccc1"]


def test_load_seeds_shortfall(tmp_path):
    f = tmp_path / "s.smi"
    f.write_text("CCO\n")
    with pytest.raises(SeedShortfallError):
        load_seeds(f, 2, np.random.default_rng(0))


def test_config_defaults_and_merge(tmp_path):
    cfg = validate_config({"ga": {"population_size": 12}})
    assert cfg["ga"]["population_size"] == 12 and cfg["ga"]["n_offspring"] == 35
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"mode": "qd", "budget": 50}))
    assert load_config(path, {"budget": 70})["budget"] == 70


@pytest.mark.parametrize(
    "raw",
    [
        {"mode": "sa"},
        {"budget": 0},
        {"unknown": 1},
        {"ga": {"sampling": "uniform"}},
        {"seed_file": "/no/such/file"},
        {"oracle": {"kind": "remote"}},
    ],
)
def test_config_errors(raw, monkeypatch):
    monkeypatch.delenv("TOOLMOL_ORACLE_URL", raising=False)
    with pytest.raises(ConfigError):
        validate_config(raw)


def test_bad_json_config(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{")
    with pytest.raises(ConfigError):
        load_config(path)


def test_cli_run_and_report(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", *SMALL, "--output-dir", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out.splitlines()[1])
    rows = read_ledger(out / "ledger.jsonl")
    assert sum(bool(r["charged"]) for r in rows) == 30
    before = (out / "ledger.jsonl").read_text()
    assert main(["report", str(out / "ledger.jsonl")]) == 0
    again = json.loads(capsys.readouterr().out)
    assert again == summary
    assert (out / "ledger.jsonl").read_text() == before
    assert (out / "report.csv").exists()


def test_cli_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "qd", "budget": 500, "qd": {"n_init": 12}}))
    assert main(["run", "--config", str(cfg), "--budget", "20", "--output-dir", str(tmp_path / "o")]) == 0
    assert "evaluations=20/20" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "--seed-file", str(tmp_path / "missing.smi")]) == 2
    assert main(["run", "--population-size", "10", "--budget", "5", "--output-dir", str(tmp_path / "a")]) == 3
    tiny = tmp_path / "tiny.smi"
    tiny.write_text("CCO\nCCN\n")
    assert main(["run", *SMALL, "--seed-file", str(tiny), "--output-dir", str(tmp_path / "b")]) == 2
    assert main(["report", str(tmp_path / "nope.jsonl")]) == 2


def test_cli_remote_oracle_failure_exits_4(tmp_path):
    cfg = tmp_path / "c.json"
    with serve(OracleFixture("always_fail")) as fx:
        cfg.write_text(json.dumps({"oracle": {"kind": "remote", "url": fx.url, "max_retries": 0}}))
        code = main(["run", "--config", str(cfg), *SMALL, "--output-dir", str(tmp_path / "o")])
    assert code == 4
    assert (tmp_path / "o" / "report.json").exists()


def test_cli_remote_policy_failure_exits_4(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"policy": {"kind": "remote", "url": "http://127.0.0.1:9", "max_retries": 0, "timeout": 1}}))
    assert main(["run", "--config", str(cfg), *SMALL, "--output-dir", str(tmp_path / "o")]) == 4


def test_report_empty_ledger_is_na(tmp_path, capsys):
    path = tmp_path / "ledger.jsonl"
    path.write_text("")
    assert main(["report", str(path)]) == 0
    s = json.loads(capsys.readouterr().out)
    assert s["BA"] == s["FA"] == s["HV"] == "N/A"


def test_report_malformed_ledger(tmp_path, capsys):
    path = tmp_path / "ledger.jsonl"
    path.write_text("{bad\n")
    assert main(["report", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_validate_config_command(tmp_path, capsys):
    good, bad = tmp_path / "g.json", tmp_path / "b.json"
    good.write_text(json.dumps({"budget": 10}))
    bad.write_text(json.dumps({"budget": "ten"}))
    assert main(["validate-config", str(good)]) == 0
    assert json.loads(capsys.readouterr().out)["budget"] == 10
    assert main(["validate-config", str(bad)]) == 2


def test_canonicalize_command(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO("OCC\nC1CC\nc1ccccc1\n"))
    assert main(["canonicalize"]) == 2
    out = capsys.readouterr()
    assert out.out.split() == ["CCO", "c1ccccc1"]
    assert "line 2" in out.err


def test_run_is_reproducible(tmp_path):
    cfg = validate_config({"ga": {"population_size": 10, "n_offspring": 5}, "budget": 40})
    a = run(dict(cfg, output_dir=str(tmp_path / "a")))
    b = run(dict(cfg, output_dir=str(tmp_path / "b")))
    assert strip_timestamps(read_ledger(a.ledger_path)) == strip_timestamps(read_ledger(b.ledger_path))
    assert a.report.summary == b.report.summary


def test_run_with_remote_fixtures(tmp_path):
    with serve(OracleFixture()) as ofx, serve(LLMFixture("crossover")) as lfx:
        cfg = validate_config(
            {
                "budget": 20,
                "output_dir": str(tmp_path),
                "ga": {"population_size": 10, "n_offspring": 5},
                "oracle": {"kind": "remote", "url": ofx.url},
                "policy": {"kind": "remote", "url": lfx.url},
            }
        )
        result = run(cfg)
    assert result.estimator.n_evaluations_ == 20
    assert any(r["kind"] == "offspring" and r["status"] == "scored" for r in read_ledger(result.ledger_path))


def test_seed_file_warning_surfaces_through_run(tmp_path):
    f = tmp_path / "s.smi"
    f.write_text("\n".join(["CCO", "CCN", "CCC", "XX", "c1ccccc1", "CC(=O)O", "CCCl", "OCCO", "NCCN", "CCOC", "CCCC", "CCS"]))
    cfg = validate_config({"seed_file": str(f), "budget": 10, "ga": {"population_size": 10, "n_offspring": 2}, "output_dir": str(tmp_path / "o")})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        run(cfg)
    assert any("XX" in str(w.message) for w in caught)
