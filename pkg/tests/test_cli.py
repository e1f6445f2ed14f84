import json
import os
from pathlib import Path

import pytest

from mvdromp.cli import main
from mvdromp.config import RunConfig, load_config, parse_config
from mvdromp.errors import ConfigurationError
from mvdromp.experiment import BetaSchedule, read_mad_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
PAPER = str(CONFIGS / "paper.ini")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_coherence_paper(capsys):
    code, out, _ = run(capsys, "coherence", "--config", PAPER)
    assert code == 0
    assert "M = 12" in out and "N = 151" in out
    assert "mutual coherence = 0.9994" in out
    assert "29.8 deg and 30 deg" in out


def test_coherence_identity(capsys):
    code, out, _ = run(capsys, "coherence", "--config", CONFIGS / "identity.ini")
    assert code == 0
    assert "mutual coherence = 0.000000" in out


def test_coherence_missing_file(capsys, tmp_path):
    code, out, err = run(capsys, "coherence", "--config", tmp_path / "nope.ini")
    assert code != 0
    assert out == ""
    assert "cannot read config" in err


def test_solve_noiseless_exhaustive(capsys):
    code, out, _ = run(capsys, "solve", "--config", PAPER, "--method", "exhaustive_2term", "--snr", "inf")
    assert code == 0
    assert "angles_deg: 8.0 17.0" in out


def test_solve_repeatable_and_alias(capsys):
    args = ("solve", "--config", PAPER, "--snr", "10", "--seed", "4")
    _, a, _ = run(capsys, *args, "--method", "omp")
    _, b, _ = run(capsys, *args, "--method", "ordinary_omp")
    _, c, _ = run(capsys, *args, "--method", "omp")
    assert a == b == c


def test_solve_unknown_method(capsys):
    code, _, err = run(capsys, "solve", "--config", PAPER, "--method", "music")
    assert code != 0
    assert "ordinary_omp" in err and "exhaustive_2term" in err


def test_solve_csv_row(capsys, tmp_path):
    out = tmp_path / "row.csv"
    code, _, _ = run(capsys, "solve", "--config", PAPER, "--method", "ideal", "--snr", "inf", "--out", out)
    assert code == 0
    header, row = out.read_text().splitlines()
    assert header == "method,snr_db,seed,beta,angles_deg,residual_norm"
    assert row.startswith("ideal_omp,inf,2010,") and ",8.0 17.0," in row


def test_benchmark_noiseless_single_trial(capsys, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[noise]\nsnr_db = inf\n[run]\ntrials = 1\n")
    out = tmp_path / "mad.csv"
    code, stdout, _ = run(capsys, "benchmark", "--config", cfg, "--out", out, "--plot-data")
    assert code == 0
    rows = read_mad_csv(out.read_text())
    assert len(rows) == 10
    for r in rows:
        assert r["trials"] == 1 and r["seed"] == 2010
        if r["method"] in ("exhaustive_2term", "ideal_omp"):
            assert r["mad_deg"] == 0.0
    manifest = json.loads((tmp_path / "mad.manifest.json").read_text())
    assert manifest["master_seed"] == 2010
    assert str(out) in manifest["outputs"]
    # the echoed config reproduces the run
    assert parse_config(manifest["config"]).to_ini() == manifest["config"]
    assert (tmp_path / "mad_source1_8deg.csv").read_text().startswith("snr_db,ordinary_omp,")
    assert (tmp_path / "mad_source2_17deg.csv").exists()
    assert "MAD (deg)" in stdout


def test_benchmark_byte_identical_across_workers(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ("benchmark", "--config", PAPER, "--trials", "6", "--seed", "11")
    assert run(capsys, *common, "--out", a, "--workers", "1")[0] == 0
    assert run(capsys, *common, "--out", b, "--workers", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_benchmark_unwritable_output(capsys, tmp_path):
    code, out, err = run(capsys, "benchmark", "--config", PAPER, "--out", tmp_path / "missing" / "x.csv")
    assert code != 0
    assert out == "" and "does not exist" in err
    assert not (tmp_path / "missing").exists()


def test_benchmark_leaves_nothing_on_failure(capsys, tmp_path, monkeypatch):
    import mvdromp.cli as cli

    def boom(*a, **k):
        raise ConfigurationError("simulated failure")

    monkeypatch.setattr(cli, "run_monte_carlo", boom)
    code, _, _ = run(capsys, "benchmark", "--config", PAPER, "--out", tmp_path / "x.csv")
    assert code != 0
    assert os.listdir(tmp_path) == []


def test_calibrate_single_beta(capsys, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[noise]\nsnr_db = 10\n[run]\ntrials = 1\n")
    out = tmp_path / "sched.csv"
    code, _, _ = run(capsys, "calibrate-beta", "--config", cfg, "--grid", "0.05", "--out", out)
    assert code == 0
    sched = BetaSchedule.from_csv(out.read_text())
    assert sched.breakpoints == ((10.0, 0.05),)

    # the schedule feeds straight back into a benchmark config
    cfg2 = tmp_path / "c2.ini"
    cfg2.write_text("[noise]\nsnr_db = 10\n[beta_schedule]\nfile = sched.csv\n[run]\ntrials = 1\n")
    assert load_config(cfg2).schedule == sched


def test_calibrate_default_grid_small(capsys, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[noise]\nsnr_db = 5, 20\n[run]\ntrials = 1\n")
    out = tmp_path / "s.csv"
    assert run(capsys, "calibrate-beta", "--config", cfg, "--grid-points", "3", "--out", out)[0] == 0
    assert len(BetaSchedule.from_csv(out.read_text()).breakpoints) == 2


def test_export_dictionary(capsys, tmp_path):
    out = tmp_path / "d.csv"
    code, _, _ = run(capsys, "export-dictionary", "--config", PAPER, "--out", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 24
    assert len(lines[0].split(",")) == 2 + 151


def test_config_defaults_match_paper_file():
    assert load_config(PAPER).to_ini() == RunConfig().to_ini()


@pytest.mark.parametrize(
    "text",
    [
        "[bogus]\nx = 1\n",
        "[grid]\nstep_deg = 0.7\n",
        "[methods]\nnames = music\n",
        "[beta_schedule]\npoints = 5-0.1\n",
        "[run]\ntrials = 0\n",
        "[array]\nelement_count = twelve\n",
        "[dictionary]\nkind = dct\n",
        "not an ini",
    ],
)
def test_bad_configs(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)


def test_inline_schedule_and_complex_amplitudes():
    cfg = parse_config("[sources]\namplitudes = 1+1j, 0.5\n[beta_schedule]\npoints = 0:0.5, 20:0.01\n")
    assert cfg.scenario.source_amplitudes == (1 + 1j, 0.5 + 0j)
    assert cfg.schedule.breakpoints == ((0.0, 0.5), (20.0, 0.01))
