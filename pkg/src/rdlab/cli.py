"""Command-line front end: config parsing, orchestration, artifact output.

The config is a flat, line-oriented `key = value` format with dotted
section prefixes (diff-friendly, no parsing ambiguity).  All numeric
output uses round-trip decimal formatting, so two runs with the same
config produce byte-identical artifacts regardless of the thread cap.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .estimates import (
    space_lipschitz_report,
    sup_bound_report,
    time_holder_report,
)
from .grid import GridSpec, make_grid, required_depth
from .harness import (
    EvalWindow,
    instability_demo,
    refine_study,
    write_amplitudes_csv,
    write_study_csv,
)
from .problems import make_initial, make_problem
from .scheme import ProblemSpec, solve, spot_check_initial, write_field_csv
from .testfn import BumpTestFunction
from .weak import sbp_terms, weak_residual

THREADS_ENV = "RDLAB_THREADS"

COMMANDS = ("solve", "estimates", "weak", "converge", "unstable-demo", "all")

_KNOWN_KEYS = {
    "problem.initial",
    "problem.initial_param",
    "problem.reaction",
    "problem.reaction_param",
    "problem.diffusion",
    "problem.bound",
    "problem.lipschitz",
    "grid.dx",
    "grid.dt",
    "grid.alpha",
    "grid.x_window",
    "grid.t_final",
    "estimates.t_bar",
    "study.dx_list",
    "study.x_window",
    "study.t_final",
    "study.stride",
    "study.reference",
    "unstable.alpha",
    "unstable.steps",
    "unstable.epsilon",
    "output.dir",
}


class ConfigError(ValueError):
    """Unparseable or internally inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    """Parsed experiment description; see parse_config for the key table."""

    problem: ProblemSpec | None = None
    grid_dx: float | None = None
    grid_dt: float | None = None
    x_window: float | None = None
    t_final: float | None = None
    t_bar: float | None = None
    bumps: dict = field(default_factory=dict)
    study_dx_list: tuple = ()
    study_window: EvalWindow | None = None
    study_reference: str = "oracle"
    unstable_alpha: float | None = None
    unstable_steps: int = 30
    unstable_epsilon: float = 1e-6
    output_dir: str = "out"


def _parse_float(raw: str, lineno: int, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: value for {key} is not a number: {raw!r}"
        ) from None


def parse_config(text: str) -> ExperimentConfig:
    """Strict parse: unknown keys are errors; dt and alpha are exclusive."""
    raw: dict[str, tuple[str, int]] = {}
    bumps: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key.startswith("bump."):
            if key in bumps:
                raise ConfigError(f"line {lineno}: duplicate bump id {key!r}")
            bumps[key] = (value, lineno)
            continue
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)

    cfg = ExperimentConfig()

    def take(key):
        return raw.pop(key, (None, 0))

    # problem section
    initial, _ = take("problem.initial")
    reaction, _ = take("problem.reaction")
    ip_raw, ip_line = take("problem.initial_param")
    rp_raw, rp_line = take("problem.reaction_param")
    diff_raw, diff_line = take("problem.diffusion")
    bound_raw, bound_line = take("problem.bound")
    lip_raw, lip_line = take("problem.lipschitz")
    if initial is not None or reaction is not None:
        if initial is None or reaction is None:
            raise ConfigError(
                "problem.initial and problem.reaction must be given together"
            )
        diffusion = (
            _parse_float(diff_raw, diff_line, "problem.diffusion")
            if diff_raw is not None
            else 1.0
        )
        initial_param = (
            _parse_float(ip_raw, ip_line, "problem.initial_param")
            if ip_raw is not None
            else None
        )
        reaction_param = (
            _parse_float(rp_raw, rp_line, "problem.reaction_param")
            if rp_raw is not None
            else None
        )
        try:
            problem = make_problem(
                initial, reaction, initial_param, reaction_param, diffusion
            )
        except ValueError as exc:
            raise ConfigError(f"problem section: {exc}") from None
        if bound_raw is not None or lip_raw is not None:
            datum = make_initial(initial, initial_param)
            bound = (
                _parse_float(bound_raw, bound_line, "problem.bound")
                if bound_raw is not None
                else datum.bound
            )
            lip = (
                _parse_float(lip_raw, lip_line, "problem.lipschitz")
                if lip_raw is not None
                else datum.lipschitz
            )
            problem = ProblemSpec(
                reaction=problem.reaction,
                initial=problem.initial,
                init_bound=bound,
                init_lipschitz=lip,
                diffusion=diffusion,
            )
        cfg.problem = problem
    elif any(v is not None for v in
             (ip_raw, rp_raw, diff_raw, bound_raw, lip_raw)):
        raise ConfigError("problem.* keys given without problem.initial")

    # grid section
    dx_raw, dx_line = take("grid.dx")
    dt_raw, dt_line = take("grid.dt")
    alpha_raw, alpha_line = take("grid.alpha")
    xw_raw, xw_line = take("grid.x_window")
    tf_raw, tf_line = take("grid.t_final")
    if dx_raw is not None:
        cfg.grid_dx = _parse_float(dx_raw, dx_line, "grid.dx")
        if dt_raw is not None and alpha_raw is not None:
            raise ConfigError(
                f"line {alpha_line}: give either grid.dt or grid.alpha, not both"
            )
        if dt_raw is not None:
            cfg.grid_dt = _parse_float(dt_raw, dt_line, "grid.dt")
        elif alpha_raw is not None:
            alpha = _parse_float(alpha_raw, alpha_line, "grid.alpha")
            diffusion = cfg.problem.diffusion if cfg.problem else 1.0
            cfg.grid_dt = alpha * cfg.grid_dx * cfg.grid_dx / diffusion
        else:
            raise ConfigError("grid section needs grid.dt or grid.alpha")
        if xw_raw is None or tf_raw is None:
            raise ConfigError("grid section needs grid.x_window and grid.t_final")
        cfg.x_window = _parse_float(xw_raw, xw_line, "grid.x_window")
        cfg.t_final = _parse_float(tf_raw, tf_line, "grid.t_final")
    elif any(v is not None for v in (dt_raw, alpha_raw, xw_raw, tf_raw)):
        raise ConfigError("grid.* keys given without grid.dx")

    tb_raw, tb_line = take("estimates.t_bar")
    if tb_raw is not None:
        cfg.t_bar = _parse_float(tb_raw, tb_line, "estimates.t_bar")

    # bumps: five whitespace- or comma-separated numbers each
    for key, (value, lineno) in bumps.items():
        parts = value.replace(",", " ").split()
        if len(parts) != 5:
            raise ConfigError(
                f"line {lineno}: {key} needs 5 numbers "
                f"(x_center t_center rx rt amplitude), got {len(parts)}"
            )
        nums = [_parse_float(p, lineno, key) for p in parts]
        try:
            cfg.bumps[key.removeprefix("bump.")] = BumpTestFunction(*nums)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None

    # study section
    dxl_raw, dxl_line = take("study.dx_list")
    sxw_raw, sxw_line = take("study.x_window")
    stf_raw, stf_line = take("study.t_final")
    sstride_raw, sstride_line = take("study.stride")
    sref_raw, _ = take("study.reference")
    if dxl_raw is not None:
        parts = dxl_raw.replace(",", " ").split()
        cfg.study_dx_list = tuple(
            _parse_float(p, dxl_line, "study.dx_list") for p in parts
        )
        if sxw_raw is None or stf_raw is None:
            raise ConfigError(
                "study section needs study.x_window and study.t_final"
            )
        stride = 1
        if sstride_raw is not None:
            stride = int(_parse_float(sstride_raw, sstride_line, "study.stride"))
        cfg.study_window = EvalWindow(
            _parse_float(sxw_raw, sxw_line, "study.x_window"),
            _parse_float(stf_raw, stf_line, "study.t_final"),
            stride,
        )
        if sref_raw is not None:
            if sref_raw not in ("oracle", "finest", "finest-mesh"):
                raise ConfigError(
                    f"study.reference must be oracle or finest-mesh, got {sref_raw!r}"
                )
            cfg.study_reference = sref_raw
    elif any(v is not None for v in (sxw_raw, stf_raw, sstride_raw, sref_raw)):
        raise ConfigError("study.* keys given without study.dx_list")

    # unstable section
    ua_raw, ua_line = take("unstable.alpha")
    us_raw, us_line = take("unstable.steps")
    ue_raw, ue_line = take("unstable.epsilon")
    if ua_raw is not None:
        cfg.unstable_alpha = _parse_float(ua_raw, ua_line, "unstable.alpha")
        if us_raw is not None:
            cfg.unstable_steps = int(_parse_float(us_raw, us_line, "unstable.steps"))
        if ue_raw is not None:
            cfg.unstable_epsilon = _parse_float(
                ue_raw, ue_line, "unstable.epsilon"
            )
    elif us_raw is not None or ue_raw is not None:
        raise ConfigError("unstable.* keys given without unstable.alpha")

    od_raw, _ = take("output.dir")
    if od_raw is not None:
        cfg.output_dir = od_raw

    if cfg.problem is not None and cfg.x_window is not None:
        sup, quot = spot_check_initial(
            cfg.problem, -cfg.x_window, cfg.x_window
        )
        if sup > cfg.problem.init_bound * (1 + 1e-9) + 1e-12:
            raise ConfigError(
                f"problem.bound={cfg.problem.init_bound} is too small: "
                f"sampled sup |u0| = {sup}"
            )
        if quot > cfg.problem.init_lipschitz * (1 + 1e-9) + 1e-9:
            raise ConfigError(
                f"problem.lipschitz={cfg.problem.init_lipschitz} is too small: "
                f"sampled quotient = {quot}"
            )
    return cfg


def _thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, cap)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _build_grid(cfg: ExperimentConfig, allow_unstable: bool) -> GridSpec:
    big_n = required_depth(cfg.x_window, cfg.t_final, cfg.grid_dx, cfg.grid_dt)
    return make_grid(
        cfg.grid_dx,
        cfg.grid_dt,
        big_n,
        cfg.problem.diffusion,
        allow_unstable=allow_unstable,
    )


def _need(cfg: ExperimentConfig, what: str, command: str) -> None:
    ok = {
        "problem": cfg.problem is not None,
        "grid": cfg.grid_dx is not None,
        "bumps": bool(cfg.bumps),
        "study": cfg.study_window is not None,
        "unstable": cfg.unstable_alpha is not None,
    }[what]
    if not ok:
        raise ConfigError(f"command {command!r} needs the {what} section")


def run(
    command: str,
    cfg: ExperimentConfig,
    out_dir: str | None = None,
    allow_unstable: bool = False,
) -> int:
    """Execute one command; returns 0 if every configured check passed."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    failures: list[str] = []
    fld = None

    def solved():
        nonlocal fld
        if fld is None:
            spec = _build_grid(cfg, allow_unstable)
            fld = solve(spec, cfg.problem)
        return fld

    has_main_grid = cfg.problem is not None and cfg.grid_dx is not None

    if command in ("solve", "all") and (command == "solve" or has_main_grid):
        _need(cfg, "problem", command)
        _need(cfg, "grid", command)
        f = solved()
        write_field_csv(f, out / "field.csv")
        if f.truncated:
            failures.append("field (truncated by overflow)")

    if command in ("estimates", "all") and (
        command == "estimates" or has_main_grid
    ):
        _need(cfg, "problem", command)
        _need(cfg, "grid", command)
        f = solved()
        tbar = cfg.t_bar if cfg.t_bar is not None else cfg.t_final
        reports = [
            sup_bound_report(f, cfg.problem),
            space_lipschitz_report(f, cfg.problem),
            time_holder_report(f, cfg.problem, tbar),
        ]
        for rep in reports:
            _write_json(out / f"estimate_{rep.estimate_name}.json",
                        rep.to_json_dict())
            if not rep.passed:
                failures.append(
                    f"estimate_{rep.estimate_name} "
                    f"(worst_margin={rep.worst_margin!r})"
                )

    if command in ("weak", "all") and (
        command == "weak" or (has_main_grid and cfg.bumps)
    ):
        _need(cfg, "problem", command)
        _need(cfg, "grid", command)
        _need(cfg, "bumps", command)
        f = solved()
        for name, phi in cfg.bumps.items():
            for mode, tag in (
                ("exact-derivatives", "exact"),
                ("finite-differences", "fd"),
            ):
                rep = weak_residual(f, cfg.problem, phi, mode)
                _write_json(out / f"weak_{name}_{tag}.json", rep.to_json_dict())
            terms = sbp_terms(f, phi)
            bound = 1e-12 * (1.0 + abs(terms.t_sum))
            ok = terms.gap <= bound
            _write_json(
                out / f"sbp_{name}.json",
                {
                    "t_sum": terms.t_sum,
                    "initial_term": terms.initial_term,
                    "interior_term": terms.interior_term,
                    "gap": terms.gap,
                    "bound": bound,
                    "pass": ok,
                },
            )
            if not ok:
                failures.append(f"sbp_{name} (gap={terms.gap!r})")

    if command in ("converge", "all") and (
        command == "converge" or cfg.study_window is not None
    ):
        _need(cfg, "problem", command)
        _need(cfg, "grid", command)  # the grid section fixes alpha
        _need(cfg, "study", command)
        study = refine_study(
            cfg.problem,
            cfg.study_dx_list,
            alpha=cfg.problem.diffusion * cfg.grid_dt / (cfg.grid_dx * cfg.grid_dx),
            window=cfg.study_window,
            reference=cfg.study_reference,
            workers=_thread_cap(),
        )
        write_study_csv(study, out / "study.csv")
        _write_json(out / "study.json", study.to_json_dict())
        if any(o < 0.9 for o in study.observed_orders):
            failures.append(
                f"study (observed orders {list(study.observed_orders)})"
            )

    if command in ("unstable-demo", "all") and (
        command == "unstable-demo" or cfg.unstable_alpha is not None
    ):
        _need(cfg, "unstable", command)
        result = instability_demo(
            cfg.unstable_alpha, cfg.unstable_steps, cfg.unstable_epsilon
        )
        write_amplitudes_csv(result, out / "amplitudes.csv")
        expected = abs(1.0 - 4.0 * result.alpha)
        bad = [
            r for r in result.ratios
            if not math.isclose(r, expected, rel_tol=1e-10, abs_tol=1e-300)
        ]
        if bad:
            failures.append(f"unstable-demo (ratios off: {bad[:3]})")

    for name in failures:
        print(f"FAILED: {name}", file=sys.stderr)
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rdlab",
        description=(
            "Explicit finite-difference lab for scalar reaction-diffusion "
            "equations on triangular space-time grids"
        ),
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to config file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument(
        "--allow-unstable",
        action="store_true",
        help="permit alpha > 1/2 for the main grid",
    )
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
        return run(args.command, cfg, args.out, args.allow_unstable)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
