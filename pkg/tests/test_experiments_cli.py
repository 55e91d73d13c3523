import json

import pytest

from weisslab import cli
from weisslab.experiments import (
    Check,
    ConfigError,
    ExperimentReport,
    build_config,
    emit,
    parse_csv,
    run,
    thread_count,
)


def test_defaults_and_precedence():
    cfg = build_config("onebox")
    assert cfg.params["levels"] == [6, 8, 10] and cfg.seed == 0
    cfg = build_config("onebox", flags={"alpha": 0.2, "seed": 3})
    assert cfg.params["alpha"] == 0.2 and cfg.seed == 3
    cfg = build_config("onebox", "alpha = 0.4\nseed = 9  # file wins\n", {"alpha": 0.2, "seed": 3})
    assert cfg.params["alpha"] == 0.4 and cfg.seed == 9


@pytest.mark.parametrize("name,text", [
    ("onebox", "nonsense = 1"),
    ("onebox", "alpha = 0.1\nalpha = 0.2"),
    ("onebox", "levels = 8,6"),
    ("halfplane-counterexample", "alpha = 0.5"),
    ("shift-counterexample", "alpha = -0.5"),
    ("disk-counterexample", "alpha = -1.5"),
    ("halfplane-counterexample", "grid_left = 0.0"),
    ("capacity-scaling", "betas = 1.2"),
    ("onebox", "seed = -1"),
    ("onebox", "ratio = abc"),
])
def test_config_errors(name, text):
    with pytest.raises(ConfigError):
        build_config(name, text)


def test_thread_count(monkeypatch):
    monkeypatch.delenv("WEISSLAB_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("WEISSLAB_THREADS", "3")
    assert thread_count() == 3
    for bad in ("0", "-2", "two"):
        monkeypatch.setenv("WEISSLAB_THREADS", bad)
        with pytest.raises(ConfigError):
            thread_count()


def test_emit_round_trip():
    rep = ExperimentReport("x", ("n", "value", "ok"))
    rep.rows = [{"n": 2, "value": 0.1 + 0.2, "ok": True}, {"n": 3, "value": 1 / 3, "ok": False}]
    cols, rows = parse_csv(emit(rep))
    assert cols == ["n", "value", "ok"]
    assert rows[0]["value"] == 0.1 + 0.2 and rows[1]["value"] == 1 / 3
    assert rows[0]["n"] == 2 and rows[0]["ok"] == 1
    empty = ExperimentReport("x", ("a", "b"))
    assert emit(empty) == b"a,b\n"
    with pytest.raises(ValueError):
        emit(rep, "xml")


def test_exit_codes():
    rep = ExperimentReport("x", ("a",))
    assert rep.exit_code == 0
    rep.checks.append(Check("c", False))
    assert rep.exit_code == 1
    rep.converged = False
    assert rep.exit_code == 3


def test_onebox_run_is_deterministic():
    cfg = build_config("onebox", flags={"seed": 5})
    a, b = run(cfg, 1), run(cfg, 1)
    assert emit(a) == emit(b)
    assert a.exit_code == 0


def test_sweep_threads_do_not_change_output():
    cfg = build_config("capacity-scaling", "cells = 512\nbetas = 0.25")
    assert emit(run(cfg, 1)) == emit(run(cfg, 3))


def test_cli_writes_csv_and_sidecar(tmp_path, capsys):
    out = tmp_path / "sub" / "onebox.csv"
    code = cli.main(["onebox", "--seed", "7", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr()
    assert printed.out.encode() == out.read_bytes()
    assert "[PASS]" in printed.err
    side = json.loads((tmp_path / "sub" / "onebox.json").read_text())
    assert side["seed"] == 7 and side["exit_code"] == 0
    assert {"config", "versions", "threads", "wall_time", "rows", "checks"} <= set(side)


def test_cli_config_errors(tmp_path, capsys):
    assert cli.main(["onebox", "--config", str(tmp_path / "missing.cfg")]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("alpha = 3\n")
    assert cli.main(["onebox", "--config", str(bad), "--out", str(tmp_path / "o.csv")]) == 2
    assert "config error" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-experiment"])
    assert exc.value.code == 2


def test_verify_experiment_passes(tmp_path):
    assert cli.main(["verify", "--quiet", "--out", str(tmp_path / "v.csv")]) == 0
