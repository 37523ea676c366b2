import json

import numpy as np
import pytest

from lambda_sim.cli import main, parse_config
from lambda_sim.trajectories import EnsembleResult


def run_cli(args):
    return main(list(args))


class TestParsing:
    def test_requires_omega_and_delta(self, capsys):
        assert run_cli(["populations"]) == 2
        err = capsys.readouterr().err
        assert "omega" in err and "delta" in err

    def test_valid_spectrum_invocation_parses(self):
        cfg = parse_config(
            ["spectrum", "--omega", "100", "--delta", "0", "--dd", "30", "--eta", "0"]
        )
        assert cfg.task == "spectrum"
        assert cfg.atom.omega == 100.0
        assert cfg.noise.dd == 30.0

    def test_negative_strength_names_the_field(self, capsys):
        assert run_cli(["populations", "--omega", "100", "--delta", "0", "--dd", "-5"]) == 2
        assert "dd must be >= 0" in capsys.readouterr().err

    def test_unknown_flag_exits_nonzero(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["populations", "--omega", "1", "--delta", "0", "--what"])
        assert exc.value.code == 2

    def test_bad_sweep_spec(self, capsys):
        code = run_cli(["populations", "--omega", "100", "--delta", "0",
                        "--sweep", "kappa:0:1:5"])
        assert code == 2
        assert "sweep" in capsys.readouterr().err

    def test_config_file_key_value(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("omega = 100\ndelta = 20  # detuning\ndd = 30\n")
        cfg = parse_config(["spectrum", "--config", str(cfg_file)])
        assert cfg.atom.delta == 20.0
        assert cfg.noise.dd == 30.0

    def test_config_file_json(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"omega": 50, "delta": 5, "eta": 12.5}))
        cfg = parse_config(["populations", "--config", str(cfg_file)])
        assert cfg.noise.eta == 12.5

    def test_cli_overrides_config_file(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("omega = 100\ndelta = 20\ndd = 30\n")
        cfg = parse_config(["spectrum", "--config", str(cfg_file), "--dd", "70"])
        assert cfg.noise.dd == 70.0

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("omega = 1\ndelta = 0\nbogus = 3\n")
        assert run_cli(["populations", "--config", str(cfg_file)]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_threads_env_fallback(self, monkeypatch):
        monkeypatch.setenv("LAMBDA_SIM_THREADS", "3")
        cfg = parse_config(["spectrum", "--omega", "10", "--delta", "0"])
        assert cfg.threads == 3


class TestTasks:
    def test_spectrum_writes_csv_and_sidecar(self, tmp_path, capsys):
        out = tmp_path / "spec.csv"
        code = run_cli(["spectrum", "--omega", "100", "--delta", "0", "--dd", "30",
                        "--grid", "-60:60:41", "--out", str(out)])
        assert code == 0
        assert "peak" in capsys.readouterr().out
        lines = out.read_text().splitlines()
        assert lines[0] == "omega,s_inc"
        assert len(lines) == 42
        sidecar = json.loads((tmp_path / "spec.json").read_text())
        assert sidecar["atom"]["omega"] == 100.0
        assert sidecar["task"] == "spectrum"
        assert "peaks" in sidecar and "version" in sidecar

    def test_populations_sweep_columns(self, tmp_path):
        out = tmp_path / "pop.csv"
        code = run_cli(["populations", "--omega", "100", "--delta", "20", "--dd", "40",
                        "--sweep", "eta:-100:100:9", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "axis,rho_gg,rho_ee,rho_ss,rho_00,rho_pp,rho_mm,residual"
        assert len(lines) == 10
        row = [float(x) for x in lines[1].split(",")]
        assert row[1] + row[2] + row[3] == pytest.approx(1.0, abs=1e-12)
        assert row[4] + row[5] + row[6] == pytest.approx(1.0, abs=1e-9)

    def test_dressed_outputs_secular_columns(self, tmp_path):
        out = tmp_path / "drs.csv"
        code = run_cli(["dressed", "--omega", "300", "--delta", "40", "--dd", "20",
                        "--sweep", "eta:-100:100:5", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "axis,rho_00,rho_pp,rho_mm,sec_00,sec_pp,sec_mm,residual"
        row = [float(x) for x in lines[1].split(",")]
        assert row[1] == pytest.approx(row[4], abs=2e-2)

    def test_json_format(self, tmp_path):
        out = tmp_path / "spec.json"
        code = run_cli(["spectrum", "--omega", "100", "--delta", "0", "--dd", "10",
                        "--grid", "-30:30:11", "--format", "json", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert len(payload["columns"]["omega"]) == 11
        assert payload["noise"]["dd"] == 10.0

    def test_check_generators(self, tmp_path, capsys):
        errata = tmp_path / "errata.txt"
        code = run_cli(["check-generators", "--omega", "100", "--delta", "20",
                        "--dd", "30", "--eta", "20", "--out", str(errata)])
        assert code == 0
        out = capsys.readouterr().out
        assert "max |Q_constructed - Q_transcribed|" in out
        assert errata.exists()

    def test_check_stability_flags_conserved_mode(self, capsys):
        code = run_cli(["check-stability", "--omega", "0", "--delta", "0",
                        "--gamma-sg", "0"])
        assert code == 3
        assert "stable: False" in capsys.readouterr().out

    def test_check_stability_healthy(self, capsys):
        code = run_cli(["check-stability", "--omega", "100", "--delta", "0", "--dd", "10"])
        assert code == 0
        assert "stable: True" in capsys.readouterr().out

    def test_oracle_determinism_across_threads(self, tmp_path):
        args = ["oracle", "--omega", "100", "--delta", "0", "--dd", "5",
                "--n-traj", "6", "--t-end", "0.5", "--seed", "42"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(args + ["--out", str(out1), "--threads", "1"]) == 0
        assert run_cli(args + ["--out", str(out2), "--threads", "4"]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        s1 = (tmp_path / "a.json").read_text()
        s2 = (tmp_path / "b.json").read_text()
        assert s1 == s2

    def test_oracle_tolerance_exit_code(self, tmp_path, monkeypatch):
        import lambda_sim.cli as cli_mod

        def fake_ensemble(atom, noise, n_traj, t_end, dt, base_seed, threads=None):
            t = np.array([t_end])
            mean = np.array([[0.9, 0.05, 0.05]])   # far from the true evolution
            se = np.full((1, 3), 1e-6)
            return EnsembleResult(t_grid=t, mean=mean, se=se, n_traj=n_traj,
                                  base_seed=base_seed, dt=dt)

        monkeypatch.setattr(cli_mod, "ensemble_average", fake_ensemble)
        code = run_cli(["oracle", "--omega", "100", "--delta", "0", "--dd", "5",
                        "--n-traj", "4", "--t-end", "0.5",
                        "--out", str(tmp_path / "o.csv")])
        assert code == 4

    def test_preset_expansion(self, tmp_path):
        out = tmp_path / "family.csv"
        code = run_cli(["spectrum", "--preset", "fig-resdel0", "--grid", "-50:50:21",
                        "--out", str(out)])
        assert code == 0
        produced = sorted(p.name for p in tmp_path.glob("family_*.csv"))
        assert produced == [
            "family_D0.1.csv", "family_D10.csv", "family_D100.csv",
            "family_D30.csv", "family_D70.csv",
        ]

    def test_preset_task_mismatch(self, capsys):
        assert run_cli(["populations", "--preset", "fig-resdel0"]) == 2
        assert "task" in capsys.readouterr().err

    def test_unknown_preset(self, capsys):
        code = run_cli(["spectrum", "--preset", "fig-nope", "--omega", "1", "--delta", "0"])
        assert code in (2, 3)


class TestDeterministicOutputs:
    def test_identical_seeds_identical_files(self, tmp_path):
        args = ["populations", "--omega", "100", "--delta", "0", "--dd", "30",
                "--sweep", "eta:-50:50:11"]
        a, b = tmp_path / "p1.csv", tmp_path / "p2.csv"
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b), "--threads", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()
