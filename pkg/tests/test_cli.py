import json

import pytest

from maniac.cli import main


@pytest.fixture
def ini(tmp_path):
    def make(text):
        p = tmp_path / "c.ini"
        p.write_text(text)
        return str(p)
    return make


def test_run_writes_csv(tmp_path, ini, capsys):
    out = tmp_path / "r.csv"
    assert main(["run", "--config", ini("[network]\nfixture = toy\n"), "--trials", "3", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "trial,seed,strategy,success,sink,stage,event"
    assert "within_bound=True" in capsys.readouterr().out


def test_run_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        assert main(["run", "--trials", "4", "--seed", "11", "--out", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_error_exit_1(ini, capsys):
    assert main(["run", "--config", ini("[field]\np = 12\n")]) == 1
    assert main(["run", "--config", "/nonexistent.ini"]) == 1
    assert "config error" in capsys.readouterr().err


def test_region_violation_exit_1_then_force(ini):
    path = ini("[code]\nrates = 2,1\n")
    assert main(["run", "--config", path, "--trials", "2"]) == 1
    assert main(["run", "--config", path, "--trials", "2", "--force"]) == 0


def test_assert_breach_exit_2(ini):
    path = ini("[code]\nrates = 2,1\n[run]\nstrategies = worst\n")
    assert main(["run", "--config", path, "--trials", "3", "--force", "--assert"]) == 2


def test_zero_trials(capsys):
    assert main(["run", "--trials", "0"]) == 0
    assert "trials=0" in capsys.readouterr().out


def test_region(tmp_path, capsys):
    out = tmp_path / "reg.csv"
    assert main(["region", "--fixture", "fig2", "--rates", "1,1", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "max sum-rate" in text
    assert out.read_text().startswith("model,subset")
    assert main(["region", "--fixture", "fig2", "--rates", "2,2", "--model", "omniscient", "--assert"]) == 2
    assert main(["region", "--fixture", "nope"]) == 1


def test_gen_net_roundtrip(tmp_path):
    out = tmp_path / "n.json"
    assert main(["gen-net", "--nodes", "6", "--edges", "12", "--seed", "5", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert len(d["sources"]) == 2
    assert main(["region", "--net", str(out), "--z", "0"]) == 0


def test_oracle_check(capsys):
    assert main(["oracle-check", "--p", "3", "--trials", "2", "--assert"]) == 0
    assert "agreement 2/2" in capsys.readouterr().out
