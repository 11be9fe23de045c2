#!env python3
# -*- coding: utf-8 -*-
import csv

import pytest

DECOY = ["decoy", "--source", "tpe", "--eta", "0.5", "--sweep", "distance", "0", "20", "3"]


def read_rows(path):
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def test_decoy_sweep_to_file(tmp_path):
    from qdcryptpy._cli import main
    out = tmp_path / "decoy.csv"
    assert main(DECOY + ["--out", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert "# version: 0.1.0" in text
    assert "# log_base: 2" in text
    rows = read_rows(out)
    assert [float(r["distance"]) for r in rows] == [0.0, 10.0, 20.0]
    assert all(float(r["rate"]) > 0 for r in rows)


def test_runs_are_deterministic(tmp_path):
    from qdcryptpy._cli import main
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(DECOY + ["--out", str(a)]) == 0
    assert main(DECOY + ["--out", str(b), "--workers", "2"]) == 0
    assert a.read_text(encoding="utf-8") == b.read_text(encoding="utf-8")


def test_stdout_when_no_out(capsys):
    from qdcryptpy._cli import main
    assert main(["bitcommit", "--source", "tpe", "--eta", "0.9"]) == 0
    out = capsys.readouterr().out
    header = [line for line in out.splitlines() if not line.startswith("#")][0]
    assert header.startswith("distance,source,source_efficiency")
    assert "margin" in header


def test_json_output(capsys):
    import json
    from qdcryptpy._cli import main
    assert main(["decoy", "--source", "pds", "--mu", "0.4", "--json"]) == 0
    js = json.loads(capsys.readouterr().out)
    assert js["metadata"]["primitive"] == "decoy"
    assert len(js["rows"]) == 1


def test_config_file_and_set(tmp_path):
    from qdcryptpy._cli import main
    cfg = tmp_path / "run.cfg"
    cfg.write_text("source = la\neta = 0.2\n", encoding="utf-8")
    out = tmp_path / "bc.csv"
    assert main(["bitcommit", "--config", str(cfg), "--set", "m3_reading=vacuum", "--eta", "0.6",
                 "--sweep", "gamma", "0.002", "0.008", "4", "--out", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert "# m3_reading: vacuum" in text
    assert "# eta: 0.6" in text
    assert len(read_rows(out)) == 4


def test_coinflip_pulse_count(tmp_path):
    from qdcryptpy._cli import main
    out = tmp_path / "cf.csv"
    assert main(["coinflip", "--source", "tpe", "--set", "P_ab=0.025", "--distance", "10",
                 "--out", str(out)]) == 0
    row = read_rows(out)[0]
    assert int(row["N"]) >= 1
    assert float(row["P_ab"]) <= 0.025


def test_config_errors_exit_2(capsys):
    from qdcryptpy._cli import main
    assert main(["decoy", "--sweep", "gamma", "0", "1", "3"]) == 2
    assert main(["decoy", "--source", "laser"]) == 2
    assert main(["tokens", "--set", "colour=blue"]) == 2
    assert main(["coinflip", "--source", "pds-best"]) == 2
    assert main(["figures", "fig99"]) == 2
    assert "ConfigError" in capsys.readouterr().err


def test_assumption_violations_exit_3(capsys):
    from qdcryptpy._cli import main
    assert main(["bitcommit", "--source", "re"]) == 3
    assert main(["bb84", "--source", "pds-fixed"]) == 3
    assert main(["twinfield", "--source", "la"]) == 3
    assert "AssumptionViolation" in capsys.readouterr().err


def test_usage_errors():
    from qdcryptpy._cli import main
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


def test_selftest(capsys):
    from qdcryptpy._cli import main
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.slow
def test_figure_files(tmp_path):
    from qdcryptpy._cli import main
    assert main(["figures", "fig10", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "plot_figures.py" in names
    assert "fig10_tpe.csv" in names and "fig10_pds.csv" in names
    text = (tmp_path / "fig10_tpe.csv").read_text(encoding="utf-8")
    assert "# plot_x: source_efficiency" in text
