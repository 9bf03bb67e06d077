import json
import math
import statistics

import numpy as np
import pytest
from scipy import stats

from qperc import cli
from qperc import runner as rn
from qperc.config import ExperimentConfig, build_config, parse_d, read_config_file
from qperc.errors import CapExceededError, ConfigError
from qperc.summary import summarize, summarize_values


# --- config ---------------------------------------------------------------

def test_parse_d():
    assert parse_d("12") == (12,)
    assert parse_d("10,12,14") == (10, 12, 14)
    assert parse_d("10:14:2") == (10, 12, 14)
    assert parse_d("8:10") == (8, 9, 10)
    with pytest.raises(ConfigError):
        parse_d("a:b")


@pytest.mark.parametrize("kw", [
    dict(kind="census"),                              # neither epsilon nor p
    dict(kind="census", p=0.1, epsilon=0.5),          # both
    dict(kind="census", p=1.5),
    dict(kind="census", p=0.1, d=(31,)),
    dict(kind="census", p=0.1, trials=0),
    dict(kind="sprinkle", p=0.1),                     # q2 missing
    dict(kind="nope", p=0.1),
])
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw)


def test_config_file_and_overrides(tmp_path, monkeypatch):
    path = tmp_path / "exp.cfg"
    path.write_text("# comment\nd = 8:10\nepsilon = 0.5\ntrials = 3\nseed = 7  # trailing\n")
    monkeypatch.setenv("QPERC_WORKERS", "3")
    cfg = build_config("census", read_config_file(path), {"trials": 5, "seed": None})
    assert cfg.d == (8, 9, 10) and cfg.trials == 5 and cfg.seed == 7 and cfg.workers == 3
    assert cfg.p_for(10) == pytest.approx(0.15)


def test_config_file_diagnostics(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("d = 8\nbogus = 1\n")
    with pytest.raises(ConfigError, match=":2:"):
        read_config_file(path)
    path.write_text("trials = many\n")
    with pytest.raises(ConfigError, match=":1:"):
        read_config_file(path)


# --- runner ---------------------------------------------------------------

def test_census_p_zero():
    recs = rn.run(ExperimentConfig("census", d=(8,), p=0.0, trials=1))
    assert len(recs) == 1
    assert recs[0].metrics["giant_fraction"] == 2 ** -8


def test_csv_bytes_deterministic(tmp_path):
    cfg = ExperimentConfig("census", d=(9,), epsilon=1.0, trials=3, seed=11,
                           out=str(tmp_path / "a.csv"))
    rn.run(cfg)
    first = (tmp_path / "a.csv").read_bytes()
    rn.run(cfg)
    assert (tmp_path / "a.csv").read_bytes() == first
    header = first.split(b"\n")[0].decode()
    assert tuple(header.split(",")) == rn.CSV_COLUMNS
    assert (tmp_path / "a.gp").exists()


def test_worker_count_does_not_change_values():
    base = ExperimentConfig("diameter", d=(8,), epsilon=1.0, trials=4, seed=2)
    one = rn.run(base)
    two = rn.run(ExperimentConfig("diameter", d=(8,), epsilon=1.0, trials=4, seed=2,
                                  workers=2))
    assert [r.metrics for r in one] == [r.metrics for r in two]


def test_trial_seeds_stable_when_adding_dims():
    a = rn.run(ExperimentConfig("census", d=(8,), epsilon=1.0, trials=2, seed=5))
    b = rn.run(ExperimentConfig("census", d=(7, 8), epsilon=1.0, trials=3, seed=5))
    b8 = [r for r in b if r.d == 8][:2]
    assert [r.metrics for r in a] == [r.metrics for r in b8]


def test_sweep_monotone_giant():
    recs = rn.run(ExperimentConfig("sweep", d=(10, 12, 14), epsilon=1.0, trials=20))
    assert len(recs) == 60
    means = [np.mean([r.metrics["giant_size"] for r in recs if r.d == d]) for d in (10, 12, 14)]
    assert means[0] < means[1] < means[2]


@pytest.mark.parametrize("kind", ["expansion", "mixing", "cycles", "minors", "decompose",
                                  "sprinkle"])
def test_every_pipeline_runs(kind):
    q2 = 0.02 if kind == "sprinkle" else None
    recs = rn.run(ExperimentConfig(kind, d=(8,), epsilon=1.0, q2=q2, trials=1, budget=2000,
                                   samples=20, walkers=2000, horizon=500))
    assert recs[0].metrics
    assert all(isinstance(v, (int, float)) for v in recs[0].metrics.values())


def test_csv_roundtrip(tmp_path):
    recs = rn.run(ExperimentConfig("census", d=(7,), epsilon=1.0, trials=2))
    path = tmp_path / "r.csv"
    path.write_text(rn.records_to_csv(recs))
    rows = rn.read_csv(path)
    assert summarize(rows) == summarize(recs)


# --- summary --------------------------------------------------------------

def test_summary_single_and_constant():
    s = summarize_values([3.0])
    assert s.mean == 3.0 and s.std is None and s.ci_low is None
    s = summarize_values([2.0, 2.0, 2.0])
    assert s.std == 0 and s.ci_low == s.ci_high == 2.0
    with pytest.raises(ValueError):
        summarize_values([])
    with pytest.raises(ValueError):
        summarize([])


def test_summary_closed_form():
    x = [1.0, 2.0, 4.0, 7.0]
    s = summarize_values(x)
    mean = 3.5
    std = math.sqrt(sum((v - mean) ** 2 for v in x) / 3)
    half = stats.t.ppf(0.975, 3) * std / 2
    assert s.mean == mean and s.std == pytest.approx(std)
    assert (s.ci_low, s.ci_high) == pytest.approx((mean - half, mean + half))
    big = list(range(40))
    s = summarize_values(big)
    half = 1.959963984540054 * statistics.stdev(big) / math.sqrt(40)
    assert s.ci_high - s.mean == pytest.approx(half)


def test_summary_all_nan():
    s = summarize_values([math.nan, math.nan])
    assert s.n == 0 and math.isnan(s.mean)


# --- CLI ------------------------------------------------------------------

def test_cli_run_and_summarize(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert cli.main(["census", "--d", "8", "--p", "0", "--out", str(out)]) == 0
    capsys.readouterr()
    assert cli.main(["summarize", str(out)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["census/d=8/giant_fraction"]["mean"] == 2 ** -8


def test_cli_config_error_exit_code(capsys):
    assert cli.main(["census", "--d", "8"]) == cli.EXIT_CONFIG
    with pytest.raises(SystemExit) as exc:
        cli.main(["census", "--trials", "x"])
    assert exc.value.code == cli.EXIT_CONFIG


def test_cli_cap_exit_code(monkeypatch):
    def boom(cfg):
        raise CapExceededError("too big")
    monkeypatch.setattr(rn, "run", boom)
    assert cli.main(["mixing", "--d", "8", "--epsilon", "1"]) == cli.EXIT_CAP


def test_cli_verify_exit_codes(monkeypatch, capsys):
    from qperc import acceptance as ac
    assert cli.main(["verify", "--only", "1", "--json"]) == cli.EXIT_OK
    assert json.loads(capsys.readouterr().out)[0]["passed"] is True
    failing = ac.CriterionResult(99, "forced", False, {}, 0.0)
    monkeypatch.setattr(ac, "run_all", lambda numbers=None: [failing])
    assert cli.main(["verify"]) == cli.EXIT_ACCEPTANCE
    monkeypatch.undo()
    assert cli.main(["verify", "--only", "99"]) == cli.EXIT_CONFIG


def test_cli_snapshot(tmp_path):
    out = tmp_path / "g.bin"
    assert cli.main(["snapshot", "--d", "7", "--epsilon", "1", "--out", str(out)]) == 0
    assert out.read_bytes()[:4] == b"QPRC"
