import json
import subprocess
import sys
from pathlib import Path

import pytest

from rdlab.cli import ConfigError, main, parse_config, run

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """\
problem.initial = gaussian
problem.reaction = zero
grid.dx = 0.1
grid.alpha = 0.25
grid.x_window = 1.0
grid.t_final = 0.25
"""


class TestParseConfig:
    def test_alpha_derives_dt(self):
        cfg = parse_config(MINIMAL)
        assert cfg.grid_dt == 0.25 * 0.1 * 0.1 / 1.0
        assert cfg.grid_dt == pytest.approx(0.0025, rel=1e-15)

    def test_dt_and_alpha_conflict(self):
        text = MINIMAL + "grid.dt = 0.001\n"
        with pytest.raises(ConfigError, match="not both"):
            parse_config(text)

    def test_unknown_key_is_anchored_to_line(self):
        text = MINIMAL + "grid.dxx = 0.1\n"
        with pytest.raises(ConfigError, match="line 7.*grid.dxx"):
            parse_config(text)

    def test_reaction_parameters_reach_registry(self):
        text = MINIMAL.replace(
            "problem.reaction = zero",
            "problem.reaction = clamped_logistic\nproblem.reaction_param = 2",
        )
        cfg = parse_config(text)
        assert cfg.problem.reaction.k1 == 5.0

    def test_understated_bound_is_rejected_by_sampling(self):
        text = MINIMAL + "problem.bound = 0.5\n"
        with pytest.raises(ConfigError, match="too small"):
            parse_config(text)

    def test_bump_needs_five_numbers(self):
        text = MINIMAL + "bump.a = 0 0.5 1.0 0.4\n"
        with pytest.raises(ConfigError, match="5 numbers"):
            parse_config(text)

    def test_sample_configs_parse(self):
        for name in ("heat_gaussian.txt", "sine_reaction.txt", "logistic.txt"):
            cfg = parse_config((CONFIGS / name).read_text())
            assert cfg.problem is not None


class TestRun:
    def test_solve_writes_field_csv(self, tmp_path):
        cfg = parse_config(MINIMAL)
        assert run("solve", cfg, out_dir=tmp_path) == 0
        lines = (tmp_path / "field.csv").read_text().splitlines()
        assert lines[0] == "m,n,x,t,u"

    def test_estimates_all_pass_for_sine_config(self, tmp_path):
        cfg = parse_config((CONFIGS / "sine_reaction.txt").read_text())
        assert run("estimates", cfg, out_dir=tmp_path) == 0
        for name in ("sup_bound", "space_lipschitz", "time_holder"):
            payload = json.loads(
                (tmp_path / f"estimate_{name}.json").read_text()
            )
            assert payload["pass"] is True

    def test_weak_emits_reports_and_sbp_gap(self, tmp_path):
        cfg = parse_config((CONFIGS / "heat_gaussian.txt").read_text())
        assert run("weak", cfg, out_dir=tmp_path) == 0
        for bump in ("main", "offset"):
            for tag in ("exact", "fd"):
                rep = json.loads(
                    (tmp_path / f"weak_{bump}_{tag}.json").read_text()
                )
                assert set(rep) == {"mode", "dx", "dt", "lhs", "rhs", "residual"}
            sbp = json.loads((tmp_path / f"sbp_{bump}.json").read_text())
            assert sbp["pass"] is True
            assert sbp["gap"] <= sbp["bound"]

    def test_converge_reports_second_order(self, tmp_path):
        cfg = parse_config((CONFIGS / "heat_gaussian.txt").read_text())
        assert run("converge", cfg, out_dir=tmp_path) == 0
        lines = (tmp_path / "study.csv").read_text().splitlines()
        assert lines[0] == "dx,dt,error,order"
        final_order = float(lines[-1].rsplit(",", 1)[1])
        assert 1.8 <= final_order <= 2.2

    def test_unstable_demo_writes_amplitudes(self, tmp_path):
        cfg = parse_config((CONFIGS / "heat_gaussian.txt").read_text())
        assert run("unstable-demo", cfg, out_dir=tmp_path) == 0
        lines = (tmp_path / "amplitudes.csv").read_text().splitlines()
        assert lines[0] == "n,max_abs_u"
        assert len(lines) == 1 + 31

    def test_truncated_unstable_solve_fails_check(self, tmp_path, capsys):
        text = """\
problem.initial = gaussian
problem.reaction = zero
grid.dx = 0.25
grid.alpha = 0.6
grid.x_window = 0.5
grid.t_final = 90
"""
        cfg = parse_config(text)
        assert run("solve", cfg, out_dir=tmp_path, allow_unstable=True) == 1
        assert "truncated" in capsys.readouterr().err

    def test_missing_section_is_config_error(self, tmp_path):
        cfg = parse_config(MINIMAL)
        with pytest.raises(ConfigError, match="bumps"):
            run("weak", cfg, out_dir=tmp_path)

    def test_all_runs_only_configured_stages(self, tmp_path):
        # no bumps/study/unstable sections: `all` is just solve + estimates
        cfg = parse_config(MINIMAL)
        assert run("all", cfg, out_dir=tmp_path) == 0
        names = {p.name for p in tmp_path.iterdir()}
        assert names == {
            "field.csv",
            "estimate_sup_bound.json",
            "estimate_space_lipschitz.json",
            "estimate_time_holder.json",
        }

    def test_failing_estimate_names_the_report(self, tmp_path, capsys):
        from rdlab import ProblemSpec, make_builtin
        from rdlab.problems import make_initial

        cfg = parse_config(MINIMAL)
        datum = make_initial("gaussian")
        cfg.problem = ProblemSpec(  # understate M, dodging parse validation
            reaction=make_builtin("zero"),
            initial=datum.sampler,
            init_bound=0.5,
            init_lipschitz=datum.lipschitz,
        )
        assert run("estimates", cfg, out_dir=tmp_path) == 1
        assert "estimate_sup_bound" in capsys.readouterr().err


class TestMainEntry:
    def test_bad_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("grid.bogus = 1\n")
        assert main(["solve", "--config", str(bad)]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_missing_file_exits_2(self, capsys):
        assert main(["solve", "--config", "/nonexistent.txt"]) == 2

    def test_unstable_grid_needs_flag(self, tmp_path, capsys):
        text = MINIMAL.replace("grid.alpha = 0.25", "grid.alpha = 0.6")
        cfgfile = tmp_path / "c.txt"
        cfgfile.write_text(text)
        assert main(["solve", "--config", str(cfgfile),
                     "--out", str(tmp_path / "o")]) == 2
        assert "stability" in capsys.readouterr().err

    def test_console_script_round_trip(self, tmp_path):
        cfgfile = tmp_path / "c.txt"
        cfgfile.write_text(MINIMAL)
        proc = subprocess.run(
            [sys.executable, "-m", "rdlab.cli", "solve",
             "--config", str(cfgfile), "--out", str(tmp_path / "out")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert (tmp_path / "out" / "field.csv").exists()
