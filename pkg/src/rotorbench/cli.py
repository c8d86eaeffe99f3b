"""Command-line workbench: simulate, evaluate, tune, dyno, stability, serve.

Report-producing subcommands write delimited data files and render the
matching matplotlib figures next to them (suppress with --no-figures).
Output files are written atomically (write-then-rename) so a failed run
never leaves partial data.  The aircraft config comes from --config (a
preset name or a file path) or the GFC2_CONFIG environment variable.
"""

from __future__ import annotations

import argparse
import functools
import os
import sys
from pathlib import Path

import numpy as np

from . import dyno as dyno_mod
from . import stability as stab_mod
from .config import (
    PRESET_NAMES,
    ConfigError,
    resolve_config,
    spin_balance_warning,
    validate,
)
from .control import PID_GAIN_PRESETS, PidGains, TuningError, ultimate_gain_search, zn_tune
from .controllers import ConstantController, NeuroController, PidController
from .env import SimEnv
from .gyro import fit_noise
from .metrics import (
    AXES,
    ERROR_METRIC_NAMES,
    band_fraction,
    compute_step_metrics,
    envelope_scan,
    error_metrics,
)
from .policy import load_policy
from .rewards import RewardParams
from .tasks import make_task, step_task
from .trace import atomic_write_text, read_trace_csv

CONFIG_ENV_VAR = "GFC2_CONFIG"


class CliError(Exception):
    """User-facing failure: printed to stderr, exit status 1."""


def _load_config(args):
    spec = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    if not spec:
        raise CliError(
            f"no aircraft config: pass --config or set {CONFIG_ENV_VAR} "
            f"(presets: {', '.join(PRESET_NAMES)})"
        )
    cfg = resolve_config(spec)
    warning = spin_balance_warning(cfg)
    if warning:
        print(f"warning: {warning}", file=sys.stderr)
    return cfg, spec


def _parse_gains(args, config_spec):
    if args.gains:
        vals = [float(v) for v in args.gains.split(",")]
        if len(vals) != 9:
            raise CliError("--gains needs 9 comma-separated values (3 axes x Kp,Ki,Kd)")
        rows = (vals[0:3], vals[3:6], vals[6:9])
    elif config_spec in PID_GAIN_PRESETS:
        rows = PID_GAIN_PRESETS[config_spec]
    else:
        raise CliError(
            "no PID gains: pass --gains kp,ki,kd,kp,ki,kd,kp,ki,kd "
            "or use a preset config"
        )
    return PidGains.from_rows(*rows)


def _make_task_factory(args):
    kwargs = {}
    if args.task == "pulse":
        kwargs["sigma"] = args.task_sigma
    else:
        kwargs["omega_bound"] = args.omega_bound
        if args.episode_length is not None:
            kwargs["episode_length"] = args.episode_length
    return functools.partial(make_task, args.task, **{k: v for k, v in kwargs.items() if v is not None})


def _make_controller(args, cfg, config_spec):
    if args.commands:
        return None
    if args.controller == "pid":
        return PidController(_parse_gains(args, config_spec), cfg.mixer, throttle=args.throttle)
    if args.controller == "policy":
        if not args.policy:
            raise CliError("--controller policy requires --policy WEIGHTS_FILE")
        policy = load_policy(args.policy)
        if policy.output_dim != cfg.motor_count:
            raise CliError(
                f"policy outputs {policy.output_dim} signals but aircraft has "
                f"{cfg.motor_count} motors"
            )
        return NeuroController(policy, throttle=args.throttle)
    return ConstantController(np.zeros(cfg.motor_count))


def _read_commands(path, motor_count):
    rows = []
    for ln in Path(path).read_text(encoding="utf-8").splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        vals = [float(v) for v in ln.split(",")]
        if len(vals) != motor_count:
            raise CliError(
                f"{path}: command row has {len(vals)} values, expected {motor_count}"
            )
        rows.append(vals)
    if not rows:
        raise CliError(f"{path}: no command rows")
    return np.array(rows)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args):
    cfg, spec = _load_config(args)
    env = SimEnv(
        cfg,
        _make_task_factory(args),
        reward_version=args.reward,
        reward_params=RewardParams(epsilon=args.epsilon),
        seed=args.seed,
        noise=not args.no_noise,
    )
    if args.commands:
        commands = _read_commands(args.commands, cfg.motor_count)
        trace = env.replay_commands(commands, seed=args.seed)
    else:
        controller = _make_controller(args, cfg, spec)
        trace = env.run_episode(controller, seed=args.seed)
    trace.write_csv(args.out)
    print(f"wrote {len(trace.t)} rows to {args.out}")
    if not args.no_figures:
        fig_path = Path(args.out).with_suffix(".png")
        from .plotting import save_trace_figure

        save_trace_figure(trace, fig_path, title=f"{spec} / {args.task} / seed {args.seed}")
        print(f"wrote figure {fig_path}")
    return 0


def _format_table(rows, header):
    widths = [
        max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))
    ]
    lines = ["  ".join(str(v).ljust(w) for v, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(str(v).ljust(w) for v, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


AGGREGATION_NOTE = "# aggregation: metrics per episode, then cross-axis average"


def cmd_evaluate(args):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_lines = [AGGREGATION_NOTE,
                 "trace,axis," + ",".join(ERROR_METRIC_NAMES)
                 + ",success,failure_pct,rise_ms,peak_pct,stability_slope"]
    table_rows = []
    for trace_path in args.traces:
        trace = read_trace_csv(trace_path)
        name = Path(trace_path).stem
        em = error_metrics(trace)
        step = {s.axis: s for s in compute_step_metrics(trace, settle_after=args.settle_after)}
        for axis in list(AXES) + ["average"]:
            metrics_row = [repr(em[axis][m]) for m in ERROR_METRIC_NAMES]
            if axis in step:
                s = step[axis]
                extra = [
                    "" if s.success is None else str(int(s.success)),
                    "" if s.failure_pct is None else f"{s.failure_pct:.3f}",
                    "" if s.rise_ms is None else f"{s.rise_ms:.3f}",
                    "" if s.peak_pct is None else f"{s.peak_pct:.3f}",
                    "" if s.stability_slope is None else f"{s.stability_slope:.6f}",
                ]
            else:
                extra = ["", "", "", "", ""]
            csv_lines.append(",".join([name, axis] + metrics_row + extra))
            table_rows.append(
                [name, axis]
                + [f"{em[axis][m]:.4g}" for m in ERROR_METRIC_NAMES]
                + extra
            )
        if not args.no_figures:
            from .plotting import save_trace_figure

            save_trace_figure(trace, out_dir / f"{name}.png", title=name)
    report_csv = out_dir / "metrics.csv"
    atomic_write_text(report_csv, "\n".join(csv_lines) + "\n")
    header = (
        ["trace", "axis"] + list(ERROR_METRIC_NAMES)
        + ["success", "failure%", "rise_ms", "peak%", "slope"]
    )
    table = AGGREGATION_NOTE + "\n" + _format_table(table_rows, header)
    atomic_write_text(out_dir / "metrics.txt", table)
    print(table, end="")
    print(f"wrote {report_csv}")
    return 0


def cmd_tune_pid(args):
    # A drag-free rigid body under P-only rate control is very oscillation
    # resistant (the continuous loop never reaches -180 degrees of phase),
    # so the measured ultimate gain reflects the step-rate limit of the
    # simulation and the resulting gains are a starting point, not a finish.
    cfg, spec = _load_config(args)
    axis = AXES.index(args.axis)

    def plant(kp):
        gains_rows = [[0.0, 0.0, 0.0] for _ in range(3)]
        gains_rows[axis][0] = kp
        controller = PidController(
            PidGains.from_rows(*gains_rows), cfg.mixer, throttle=args.throttle
        )
        setpoint = [0.0, 0.0, 0.0]
        setpoint[axis] = args.setpoint
        env = SimEnv(
            cfg,
            lambda _seed: step_task(setpoint, episode_length=args.episode_length),
            seed=args.seed,
            noise=False,
        )
        trace = env.run_episode(controller)
        return trace.t, trace.gyro[:, axis]

    try:
        k_u, t_u = ultimate_gain_search(
            plant, k_start=args.k_start, k_factor=args.k_factor, k_max=args.k_max
        )
    except TuningError as exc:
        raise CliError(str(exc)) from exc
    kp, ki, kd = zn_tune(k_u, t_u)
    print(f"config: {spec}  axis: {args.axis}  setpoint: {args.setpoint} deg/s")
    print(f"ultimate gain K_u = {k_u:.6g}")
    print(f"oscillation period T_u = {t_u:.6g} s")
    print(f"ZN classic gains: Kp = {kp:.6g}  Ki = {ki:.6g}  Kd = {kd:.6g}")
    return 0


def cmd_fit_noise(args):
    trace = read_trace_csv(args.trace)
    params = fit_noise(trace.gyro)
    print("axis,mean_dps,std_dps")
    for i, axis in enumerate(AXES):
        print(f"{axis},{params.mean[i]!r},{params.std[i]!r}")
    return 0


def cmd_validate_config(args):
    cfg, spec = _load_config(args)
    problems = validate(cfg)
    if problems:
        for p in problems:
            print(f"violation: {p}")
        return 1
    print(f"{spec}: valid ({cfg.motor_count} motors, dt={cfg.sim_dt}s)")
    return 0


def cmd_serve(args):
    from .server import LockstepServer

    cfg, spec = _load_config(args)
    env = SimEnv(
        cfg,
        _make_task_factory(args),
        reward_version=args.reward,
        reward_params=RewardParams(epsilon=args.epsilon),
        seed=args.seed,
        noise=not args.no_noise,
    )
    server = LockstepServer(env, host=args.host, port=args.port)
    host, port = server.address
    print(f"serving {spec} on udp://{host}:{port} (dt={cfg.sim_dt}s)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.close()
    return 0


def cmd_envelope(args):
    cfg, spec = _load_config(args)
    controller = _make_controller(args, cfg, spec)

    def env_factory(setpoint, ep_seed):
        return SimEnv(
            cfg,
            lambda _seed: step_task(setpoint, episode_length=args.episode_length),
            seed=ep_seed,
            noise=not args.no_noise,
        )

    points = envelope_scan(
        env_factory, controller, n=args.n, sigma=args.sigma, seed=args.seed
    )
    lines = ["sp_r,sp_p,sp_y,mae,in_band"]
    for p in points:
        lines.append(
            ",".join(repr(float(v)) for v in p.setpoint)
            + f",{p.mae!r},{int(p.in_band)}"
        )
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    frac = band_fraction(points)
    print(f"episodes: {len(points)}  band fraction: {frac:.3f}")
    print(f"wrote {args.out}")
    if not args.no_figures:
        from .plotting import save_envelope_figure

        fig_path = Path(args.out).with_suffix(".png")
        save_envelope_figure(points, fig_path, title=f"{spec} envelope")
        print(f"wrote figure {fig_path}")
    return 0


# -- dyno ----------------------------------------------------------------------


def cmd_dyno_step(args):
    cfg, _spec = _load_config(args)
    motor = cfg.motors[args.motor]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traces = dyno_mod.step_experiment(motor, dt=cfg.sim_dt)
    for level, tr in zip(dyno_mod.STEP_LEVELS, traces):
        path = out_dir / f"step_{int(level * 100)}.csv"
        tr.write_csv(path)
        print(f"wrote {path} (plateau {dyno_mod.plateau_rpm(tr):.1f} RPM)")
    if not args.no_figures:
        from .plotting import save_dyno_figure

        save_dyno_figure(traces, out_dir / "step.png", title="step experiment")
        print(f"wrote figure {out_dir / 'step.png'}")
    return 0


def cmd_dyno_ramp(args):
    cfg, _spec = _load_config(args)
    motor = cfg.motors[args.motor]
    tr = dyno_mod.ramp_experiment(motor, dt=cfg.sim_dt)
    tr.write_csv(args.out)
    print(
        f"wrote {args.out} (max thrust {tr.thrust.max():.3f} N, "
        f"max torque {tr.torque.max():.5f} N m, max {tr.rpm.max():.0f} RPM)"
    )
    if not args.no_figures:
        from .plotting import save_dyno_figure

        fig_path = Path(args.out).with_suffix(".png")
        save_dyno_figure(tr, fig_path, title="throttle ramp")
        print(f"wrote figure {fig_path}")
    return 0


def cmd_dyno_fit(args):
    points = []
    for path in args.steps:
        tr = dyno_mod.read_dyno_csv(path)
        level = float(tr.u.max())
        points.append((level, dyno_mod.plateau_rpm(tr)))
    points.append((0.0, 0.0)) if args.anchor_zero else None
    coeffs = dyno_mod.fit_throttle_curve(points, degree=args.degree)
    print("throttle curve coefficients (highest degree first):")
    print(" ".join(repr(float(c)) for c in coeffs))
    return 0


def cmd_dyno_derive(args):
    out = dyno_mod.derive_constants(
        args.max_thrust, args.max_torque, args.max_rpm, rho=args.rho, diameter=args.diameter
    )
    print(f"using rho={args.rho} kg/m^3, D={args.diameter} m "
          f"(pass --rho/--diameter for your bench conditions)")
    for key in ("c_t", "c_q", "kt", "kq"):
        print(f"{key} = {out[key]!r}")
    return 0


def cmd_dyno_validate(args):
    sim = dyno_mod.read_dyno_csv(args.sim)
    ref = dyno_mod.read_dyno_csv(args.reference)
    result = dyno_mod.validate_model(sim, ref, omega_max_rpm=args.max_rpm)
    for key, val in result.items():
        print(f"{key} = {val:.6g}")
    if not args.no_figures and args.fig:
        from .plotting import save_dyno_figure

        save_dyno_figure(sim, args.fig, reference=ref, title="model vs reference")
        print(f"wrote figure {args.fig}")
    return 0


def cmd_dyno_reference(args):
    cfg, _spec = _load_config(args)
    motor = cfg.motors[args.motor]
    tr = dyno_mod.reference_step_trace(
        args.level, motor.h_coeffs, motor.kt, motor.kq, dt=cfg.sim_dt
    )
    tr.write_csv(args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_dyno_fit_response(args):
    cfg, _spec = _load_config(args)
    motor = cfg.motors[args.motor]
    fitted, worst = dyno_mod.fit_motor_response(motor, dt=cfg.sim_dt)
    print(f"worst per-level RPM error: {worst:.3f}% of omega_max")
    print(f"response_scale = {fitted.response_scale!r}")
    print(f"f_min = {fitted.f_min!r}")
    print(f"f_max = {fitted.f_max!r}")
    return 0


# -- stability -------------------------------------------------------------------


def _write_stability(points, out, no_figures, title):
    atomic_write_text(out, stab_mod.sweep_to_csv_text(points))
    print(f"wrote {out}")
    if not no_figures:
        from .plotting import save_stability_figure

        fig_path = Path(out).with_suffix(".png")
        save_stability_figure(points, fig_path, title=title)
        print(f"wrote figure {fig_path}")


def cmd_stability_sweep(args):
    # The built-in simulator is one rigid body: link distances cannot change,
    # so this sweep reports zero drift by construction.  Use 'ingest' for
    # externally produced pose logs or 'synthetic' for generated drift.
    cfg, spec = _load_config(args)
    env = SimEnv(
        cfg,
        lambda _seed: step_task([0.0, 0.0, 0.0], episode_length=args.episode_length),
        seed=args.seed,
        noise=False,
    )
    points = stab_mod.stability_sweep(env, episode_length=args.episode_length)
    nonzero = sum(1 for p in points if p.delta > 0)
    print(f"sweep: {len(points)} samples, {nonzero} with nonzero drift")
    _write_stability(points, args.out, args.no_figures, f"{spec} stability sweep")
    return 0


def _log_points(log):
    deltas = stab_mod.delta_series(log)
    return [
        stab_mod.StabilityPoint(delta=float(d), omega_deg=(0.0, 0.0, 0.0), t=float(k))
        for k, d in enumerate(deltas)
    ]


def cmd_stability_synthetic(args):
    log = stab_mod.synthetic_drift_log(args.rate, links=args.links, steps=args.steps)
    _write_stability(_log_points(log), args.out, args.no_figures, "synthetic drift")
    return 0


def cmd_stability_ingest(args):
    log = stab_mod.ingest_pose_log(args.log)
    _write_stability(
        _log_points(log), args.out, args.no_figures, f"ingested {Path(args.log).name}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_config_arg(p):
    p.add_argument(
        "--config",
        help=f"aircraft preset ({', '.join(PRESET_NAMES)}) or config file path; "
        f"defaults to ${CONFIG_ENV_VAR}",
    )


def _add_task_args(p):
    p.add_argument("--task", choices=("pulse", "episodic", "continuous"), default="pulse")
    p.add_argument("--task-sigma", type=float, default=100.0,
                   help="pulse command std, deg/s")
    p.add_argument("--omega-bound", type=float, default=5.24,
                   help="episodic/continuous command bound, rad/s")
    p.add_argument("--episode-length", type=float, default=None,
                   help="episode length override, seconds")
    p.add_argument("--reward", choices=("v1", "v2", "v3"), default="v3")
    p.add_argument("--epsilon", type=float, default=0.1,
                   help="error-band fraction for the banded rewards")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-noise", action="store_true", help="disable gyro noise")


def _add_controller_args(p):
    p.add_argument("--controller", choices=("pid", "policy", "zero"), default="pid")
    p.add_argument("--policy", help="weights file for --controller policy")
    p.add_argument("--gains", help="9 comma-separated PID gains (overrides preset)")
    p.add_argument("--throttle", type=float, default=0.0)


def _add_figures_arg(p):
    p.add_argument("--no-figures", action="store_true",
                   help="skip rendering figures next to the data files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorbench",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one episode and write the trace CSV")
    _add_config_arg(p)
    _add_task_args(p)
    _add_controller_args(p)
    _add_figures_arg(p)
    p.add_argument("--commands", help="CSV of per-step motor commands (open loop)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="metrics report (CSV + text + figures) for traces")
    p.add_argument("traces", nargs="+")
    p.add_argument("--out-dir", default="report")
    p.add_argument("--settle-after", type=float, default=0.5)
    _add_figures_arg(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "tune-pid",
        help="ultimate-gain search and ZN gains for one axis "
        "(the drag-free body oscillates only at the sampling limit; "
        "treat the gains as a starting point)",
    )
    _add_config_arg(p)
    p.add_argument("--axis", choices=AXES, default="roll")
    p.add_argument("--setpoint", type=float, default=100.0, help="deg/s")
    p.add_argument("--throttle", type=float, default=0.1)
    p.add_argument("--k-start", type=float, default=0.1)
    p.add_argument("--k-factor", type=float, default=1.3)
    p.add_argument("--k-max", type=float, default=1e5)
    p.add_argument("--episode-length", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_tune_pid)

    p = sub.add_parser("fit-noise", help="fit per-axis gyro noise from a rest trace")
    p.add_argument("trace")
    p.set_defaults(func=cmd_fit_noise)

    p = sub.add_parser("validate-config", help="check a config against its invariants")
    _add_config_arg(p)
    p.set_defaults(func=cmd_validate_config)

    p = sub.add_parser("serve", help="lockstep UDP server for external tuners")
    _add_config_arg(p)
    _add_task_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=9000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("envelope", help="flight-envelope scan with random step commands")
    _add_config_arg(p)
    _add_controller_args(p)
    _add_figures_arg(p)
    p.set_defaults(commands=None)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--sigma", type=float, default=300.0)
    p.add_argument("--episode-length", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-noise", action="store_true")
    p.add_argument("--out", default="envelope.csv")
    p.set_defaults(func=cmd_envelope)

    dyno_p = sub.add_parser("dyno", help="virtual dynamometer experiments")
    dyno_sub = dyno_p.add_subparsers(dest="dyno_command", required=True)

    p = dyno_sub.add_parser("step", help="fixed-throttle step experiments")
    _add_config_arg(p)
    _add_figures_arg(p)
    p.add_argument("--motor", type=int, default=0)
    p.add_argument("--out-dir", default="dyno_step")
    p.set_defaults(func=cmd_dyno_step)

    p = dyno_sub.add_parser("ramp", help="0->100->0% throttle ramp")
    _add_config_arg(p)
    _add_figures_arg(p)
    p.add_argument("--motor", type=int, default=0)
    p.add_argument("--out", default="ramp.csv")
    p.set_defaults(func=cmd_dyno_ramp)

    p = dyno_sub.add_parser("fit", help="fit the throttle curve from step traces")
    p.add_argument("steps", nargs="+", help="step experiment CSVs")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--anchor-zero", action="store_true",
                   help="add a (0, 0 RPM) point to the fit")
    p.set_defaults(func=cmd_dyno_fit)

    p = dyno_sub.add_parser("derive", help="coefficients and constants from bench maxima")
    p.add_argument("--max-thrust", type=float, required=True, help="N")
    p.add_argument("--max-torque", type=float, required=True, help="N m")
    p.add_argument("--max-rpm", type=float, required=True)
    p.add_argument("--rho", type=float, default=dyno_mod.DEFAULT_RHO)
    p.add_argument("--diameter", type=float, default=dyno_mod.DEFAULT_DIAMETER)
    p.set_defaults(func=cmd_dyno_derive)

    p = dyno_sub.add_parser("validate", help="MAE of a simulated trace vs a reference")
    p.add_argument("sim")
    p.add_argument("reference")
    p.add_argument("--max-rpm", type=float, default=None)
    p.add_argument("--fig", default=None)
    _add_figures_arg(p)
    p.set_defaults(func=cmd_dyno_validate)

    p = dyno_sub.add_parser("reference", help="emit a synthetic bench step response")
    _add_config_arg(p)
    p.add_argument("--motor", type=int, default=0)
    p.add_argument("--level", type=float, default=1.0)
    p.add_argument("--out", default="reference.csv")
    p.set_defaults(func=cmd_dyno_reference)

    p = dyno_sub.add_parser("fit-response", help="tune response params against the bench reference")
    _add_config_arg(p)
    p.add_argument("--motor", type=int, default=0)
    p.set_defaults(func=cmd_dyno_fit_response)

    stab_p = sub.add_parser("stability", help="drift measurement over pose logs")
    stab_sub = stab_p.add_subparsers(dest="stability_command", required=True)

    p = stab_sub.add_parser(
        "sweep",
        help="2^M motor-permutation sweep (rigid built-in body: expect zero drift)",
    )
    _add_config_arg(p)
    _add_figures_arg(p)
    p.add_argument("--episode-length", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="stability.csv")
    p.set_defaults(func=cmd_stability_sweep)

    p = stab_sub.add_parser("synthetic", help="generated linear drift log")
    _add_figures_arg(p)
    p.add_argument("--rate", type=float, required=True, help="meters per step")
    p.add_argument("--links", type=int, default=3)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out", default="stability.csv")
    p.set_defaults(func=cmd_stability_synthetic)

    p = stab_sub.add_parser("ingest", help="drift of an external t,link,x,y,z pose log")
    _add_figures_arg(p)
    p.add_argument("log")
    p.add_argument("--out", default="stability.csv")
    p.set_defaults(func=cmd_stability_ingest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ConfigError, TuningError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (dyno_mod.DynoError, stab_mod.PoseLogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
