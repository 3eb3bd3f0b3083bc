"""Command-line entry point.

Exit codes: 0 success, 1 internal error, 2 configuration or usage error,
3 infeasible design (or a failed ``check``), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import secrets
import sys
import time
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, analytics, config, design, records, sweeps
from .errors import ConfigError, InfeasibleDesignError, NumericalInstabilityError, ZeroBandwidthError
from .params import DualPumpConfig, WaveguideParams
from .propagator import Grid, measure_group_delay, monte_carlo_density, propagate_mean_field, thermal_quadrature

OUTPUT_DIR_ENV = "SLOWSBS_OUTPUT_DIR"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("slowsbs")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="INI config file or packaged preset name")
    common.add_argument("-o", "--output", help="output file (default: $%s or stdout)" % OUTPUT_DIR_ENV)
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="config override")
    common.add_argument("--seed", type=int, help="Monte-Carlo seed (generated and printed when absent)")
    common.add_argument("--human", action="store_true", help="round printed numbers to 4 significant digits")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="slowsbs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"slowsbs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("analytic", parents=[common], help="closed-form response of a configuration")

    p = sub.add_parser("design", parents=[common], help="zero-gain balance and feasibility search")
    p.add_argument("--a", type=float, help="intensity ratio I_u / I_l")
    p.add_argument("--b", type=float, help="detuning ratio delta_u / delta_l")
    p.add_argument("--intensity-lower", type=float, help="lower pump intensity for the implied config")
    p.add_argument("--search", action="store_true", help="grid search over (a, b) and rank feasible designs")

    p = sub.add_parser("simulate", parents=[common], help="mean-field pulse run and optional noise ensemble")
    p.add_argument("--mode", choices=("full", "adiabatic"))
    p.add_argument("--mc", type=int, metavar="M", help="number of Monte-Carlo trajectories")

    p = sub.add_parser("sweep", parents=[common], help="one-dimensional parameter sweep to CSV")
    p.add_argument("--axis", choices=sweeps.AXES)
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--balance", choices=sweeps.BALANCE_MODES, default="free")
    p.add_argument("--preset", choices=sorted(sweeps.PRESETS), help="use a named sweep preset")

    sub.add_parser("check", parents=[common], help="exit 0 iff every enforced feasibility budget passes")
    return parser


# --- helpers -------------------------------------------------------------------

def preset_path(name: str) -> Path:
    return Path(str(resources.files("slowsbs") / "presets" / f"{name}.cfg"))


def _config_path(value: str) -> Path:
    path = Path(value)
    if path.is_file():
        return path
    preset = preset_path(value)
    if preset.is_file():
        return preset
    raise ConfigError(f"config file not found: {value}")


def _load(args, required: bool = True) -> config.RunConfig | None:
    if not args.config:
        if required:
            raise ConfigError("missing required option: -c/--config")
        if args.set:
            raise ConfigError("--set needs a config file")
        return None
    overrides = list(args.set)
    # flag forms of config keys are applied as overrides so the echo shows them
    if getattr(args, "mode", None):
        overrides.append(f"grid.mode={args.mode}")
    if getattr(args, "mc", None) is not None:
        overrides.append(f"mc.trajectories={args.mc}")
    if args.seed is not None:
        overrides.append(f"mc.seed={args.seed}")
    return config.load(_config_path(args.config), overrides)


def _destination(args, default_name: str) -> Path | None:
    if args.output:
        path = Path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory:
        Path(directory).mkdir(parents=True, exist_ok=True)
        return Path(directory) / default_name
    return None


def _sibling(path: Path, tag: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{path.suffix or '.csv'}")


def _print_pairs(pairs, human: bool, stream=None) -> None:
    digits = 4 if human else 17
    stream = stream or sys.stdout
    for key, value in pairs:
        print(f"{key} = {records.format_value(value, digits)}", file=stream)


def _emit_tables(args, default_name, tables, cfg_echo, seed=None, grid=None, mode=None, extra=None) -> list[Path]:
    """Write ``[(tag, rows, columns)]`` as CSV files with manifests, or to stdout.

    The first table goes to the output path; later ones get ``_<tag>`` appended
    to its stem.
    """
    digits = 4 if args.human else 17
    primary = _destination(args, default_name)
    written = []
    if primary is None:
        for i, (_, rows, columns) in enumerate(tables):
            if i:
                sys.stdout.write("\n")
            sys.stdout.write(records.render_csv(rows, columns, digits).decode("ascii"))
        return written
    for i, (tag, rows, columns) in enumerate(tables):
        path = primary if i == 0 else _sibling(primary, tag)
        records.write_csv(rows, path, columns, digits)
        manifest = records.RunManifest(
            command=args.command,
            config=cfg_echo or {},
            seed=seed,
            grid=grid,
            mode=mode,
            extra=dict(extra or {}, argv=list(args.argv)),
        )
        records.write_manifest(manifest, records.manifest_path(path), [path])
        written.append(path)
        log.info("wrote %s", path)
    return written


# --- subcommands ---------------------------------------------------------------

def _analytic_pairs(params: WaveguideParams, dual: DualPumpConfig):
    resp = analytics.dual_response(params, dual, strict=False)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        n_out = analytics.thermal_out(params, dual)
    for w in caught:
        log.warning("%s", w.message)
    status = "ok" if resp.velocity_ratio > 0.0 else "superluminal"
    return [
        ("regime", resp.regime),
        ("status", status),
        ("n_bar", params.n_bar),
        ("GuL", analytics.gain_single(params, dual.upper) * params.length),
        ("GlL", analytics.gain_single(params, dual.lower) * params.length),
        ("GL", resp.gain_per_length * params.length),
        ("kappaL", resp.kappa * params.length),
        ("velocity_ratio", resp.velocity_ratio),
        ("gain_slope", resp.gain_slope),
        ("thermal_out", n_out),
        ("thermal_out_density", analytics.thermal_out_density(params, dual)),
        ("adiabatic_margin", design.adiabatic_margin(params, dual)),
        ("transit_damping", params.gamma * params.length / params.v_g),
    ]


def cmd_analytic(args) -> int:
    cfg = _load(args)
    pairs = _analytic_pairs(cfg.params, cfg.pumps)
    _print_pairs(pairs, args.human)
    if _destination(args, "analytic.csv") is not None:
        row = dict(pairs)
        _emit_tables(args, "analytic.csv", [("", [row], list(row))], cfg.echo())
    return EXIT_OK


def _report_pairs(report: design.FeasibilityReport):
    pairs = []
    for name, flag in report.flags.items():
        pairs += [(name, flag.value), (f"{name}_limit", flag.limit), (f"{name}_passed", flag.passed)]
        if not flag.enforced:
            pairs.append((f"{name}_enforced", False))
    pairs += [
        ("GL", report.gain_times_length),
        ("bandwidth", report.bandwidth),
        ("bandwidth_window_limited", report.bandwidth_window_limited),
        ("feasible", report.passed),
    ]
    return pairs


def cmd_design(args) -> int:
    cfg = _load(args, required=False)
    params = cfg.params if cfg else sweeps.NOMINAL_PARAMS
    budgets = cfg.budgets if cfg else design.Budgets()
    intensity_l = args.intensity_lower
    if intensity_l is None:
        intensity_l = cfg.pumps.lower.intensity if cfg and cfg.pumps.lower.intensity > 0 else 1e8
    if args.search:
        grid = design.DesignGrid(
            np.round(np.linspace(0.05, 0.95, 19), 12),
            np.round(np.linspace(0.05, 0.95, 19), 12),
            [intensity_l],
        )
        ranked = design.feasible_design_search(params, grid, budgets)
        rows = [
            {
                "a": r.config.a,
                "b": r.config.b,
                "delta_u": r.config.upper.detuning_scaled,
                "delta_l": r.config.lower.detuning_scaled,
                "intensity_u": r.config.upper.intensity,
                "intensity_l": r.config.lower.intensity,
                "velocity_ratio": r.velocity_ratio,
                "GL": r.gain_times_length,
                "thermal_out": r.thermal_out,
                "bandwidth": r.bandwidth,
            }
            for r in ranked
        ]
        dest = _destination(args, "design.csv")
        if dest is not None:
            best = rows[0]
            _print_pairs([("feasible_designs", len(rows))] + [(f"best_{k}", v) for k, v in best.items()], args.human)
        _emit_tables(args, "design.csv", [("", rows, list(rows[0]))], cfg.echo() if cfg else None)
        return EXIT_OK
    if args.a is None or args.b is None:
        raise ConfigError("design needs --a and --b (or --search)")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sol = design.balance_detuning(args.a, args.b, params, intensity_l)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    pairs = [
        ("a", args.a),
        ("b", args.b),
        ("delta", sol.delta_l),
        ("delta_l", sol.delta_l),
        ("delta_u", sol.delta_u),
        ("branch", sol.branch),
        ("residual_GL", sol.residual),
        ("intensity_l", intensity_l),
        ("intensity_u", args.a * intensity_l),
    ]
    report = design.feasibility(params, sol.config(intensity_l), budgets)
    pairs += _report_pairs(report)
    _print_pairs(pairs, args.human)
    dest = _destination(args, "design.csv")
    if dest is not None:
        row = {k: v for k, v in pairs}
        _emit_tables(args, "design.csv", [("", [row], list(row))], cfg.echo() if cfg else None)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    params, pumps = cfg.params, cfg.pumps
    mode = cfg.grid.mode
    trajectories = cfg.mc.trajectories
    seed = cfg.mc.seed
    if trajectories and seed is None:
        seed = secrets.randbits(63)
        print(f"seed = {seed}", file=sys.stderr)
    summary, tables, grid_echo = [], [], {}
    if cfg.pulse.photon_number > 0.0:
        grid = Grid.for_pulse(params, cfg.pulse, cfg.grid.nz, cfg.grid.extra_time)
        t0 = time.perf_counter()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = propagate_mean_field(params, pumps, cfg.pulse, grid, mode)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        log.info("mean-field run: %d x %d steps in %.2f s", grid.nz, grid.nt, time.perf_counter() - t0)
        resp = analytics.dual_response(params, pumps, strict=False)
        summary += [
            ("mode", mode),
            ("measured_GL", result.measured_gain * params.length),
            ("predicted_GL", resp.gain_per_length * params.length),
            ("measured_transit", result.measured_delay),
        ]
        if mode == "full":
            # the adiabatic factor is frequency independent, so only full mode shows slow light
            reference = propagate_mean_field(params.replace(g=0.0), pumps, cfg.pulse, grid, mode)
            delay = measure_group_delay(result, reference)
            summary += [
                ("measured_extra_delay", delay.delay),
                ("measured_velocity_ratio", delay.velocity_ratio),
                ("predicted_velocity_ratio", resp.velocity_ratio),
            ]
        rows = [
            {"t": t, "re": a.real, "im": a.imag, "density": abs(a) ** 2}
            for t, a in zip(result.times, result.output)
        ]
        tables.append(("pulse", rows, ["t", "re", "im", "density"]))
        grid_echo["pulse"] = grid.as_dict()
    if trajectories:
        t_obs = cfg.mc.t_obs if cfg.mc.t_obs is not None else 5.0 / params.gamma
        grid = Grid.for_duration(params, cfg.grid.nz, t_obs)
        t0 = time.perf_counter()
        mc = monte_carlo_density(
            params, pumps, grid, trajectories, seed, mode, cfg.mc.snapshot_every, cfg.mc.workers
        )
        log.info("Monte-Carlo: %d trajectories in %.2f s", trajectories, time.perf_counter() - t0)
        quad = thermal_quadrature(params, pumps, params.length, grid.duration)
        summary += [
            ("trajectories", trajectories),
            ("seed", seed),
            ("t_obs", grid.duration),
            ("noise_density", mc.output_density),
            ("noise_density_se", mc.output_error),
            ("quadrature_density", quad),
            ("noise_floor", mc.output_density * params.length),
        ]
        rows = []
        for k, t in enumerate(mc.times):
            for j, z in enumerate(mc.z):
                rows.append({"t": t, "z": z, "mean_density": mc.mean[k, j], "standard_error": mc.standard_error[k, j]})
        tables.append(("noise", rows, ["t", "z", "mean_density", "standard_error"]))
        grid_echo["mc"] = grid.as_dict()
    if not tables:
        raise ConfigError("nothing to simulate: photon_number = 0 and no Monte-Carlo trajectories")
    dest = _destination(args, "simulate.csv")
    _print_pairs(summary, args.human, sys.stdout if dest is not None else sys.stderr)
    _emit_tables(args, "simulate.csv", tables, cfg.echo(), seed=seed, grid=grid_echo, mode=mode)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args, required=args.preset is None)
    params = cfg.params if cfg else sweeps.NOMINAL_PARAMS
    if args.preset:
        preset = sweeps.PRESETS[args.preset]
        base, spec = preset.base, preset.spec
        if cfg is not None:
            base = cfg.pumps
    else:
        if args.axis is None or args.start is None or args.stop is None:
            raise ConfigError("sweep needs --axis, --from and --to (or --preset)")
        base = cfg.pumps
        spec = sweeps.SweepSpec(args.axis, args.start, args.stop, args.points, args.balance)
    rows = sweeps.sweep(params, base, spec)
    echo = cfg.echo() if cfg else None
    extra = {"axis": spec.axis, "from": spec.start, "to": spec.stop, "points": spec.points,
             "balance": spec.balance_mode, "preset": args.preset}
    _emit_tables(args, "sweep.csv", [("", rows, list(sweeps.COLUMNS))], echo, extra=extra)
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load(args)
    report = design.feasibility(cfg.params, cfg.pumps, cfg.budgets)
    pairs = _report_pairs(report)
    _print_pairs(pairs, args.human)
    if not report.passed:
        print(f"check failed: {', '.join(report.failures())}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


COMMANDS = {
    "analytic": cmd_analytic,
    "design": cmd_design,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "check": cmd_check,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleDesignError, ZeroBandwidthError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalInstabilityError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
