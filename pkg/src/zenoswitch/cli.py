"""Command-line front end: figure/table reproduction, solves, sweeps.

Commands
--------
fig3, fig4, fig5   bistability response curves (CSV, optional SVG)
fig6, fig7         dynamic switching runs at the published drive scenarios
fig9               self-to-cross TPA ratio vs wavelength difference
fig10, fig11       required density / cell temperature vs detuning
table1             derived nominal quantities vs their reference values
solve              steady-state solve at the configured input powers
simulate           constant-drive time series of the configured inputs
sweep              steady-state solve over one or more config-key grids
perf               performance report (enhancement, coupling, balance power)

Exit codes: 0 success, 1 config error, 2 solver/measurement failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
from pathlib import Path

import numpy as np

from . import dynamics, performance, quasistatic, rubidium
from .model import (ConfigError, ParameterBundle, ValidationError,
                    apply_overrides, bundle_from_raw, DEFAULT_CONFIG_VALUES,
                    parse_config_text)

EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_IO = 3

COMMANDS = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig9", "fig10", "fig11",
            "table1", "solve", "simulate", "sweep", "perf")

# Drive scenario behind fig6: a CW target switched by a strong control pulse.
FIG6_TARGET_W = 25e-6
FIG6_CONTROL_W = 3e-3
FIG6_CONTROL_ON_S = 1.5e-9
FIG6_CONTROL_OFF_S = 3.5e-9
FIG6_DURATION_S = 6e-9

# Drive scenario behind fig7: an equal-power control pulse gating a target
# pulse of the same peak power.
FIG7_LEVEL_W = 25e-6
FIG7_CONTROL_ON_S = 1e-9
FIG7_CONTROL_OFF_S = 4e-9
FIG7_TARGET_ON_S = 2e-9
FIG7_DURATION_S = 6.5e-9


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: tuple[str, ...], rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_svg(path: Path, x, series: dict[str, np.ndarray], xlabel: str,
              ylabel: str, logy: bool = False) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, y in series.items():
        ax.plot(x, y, label=label, linewidth=1.2)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _linear_resonant_power(p_in: float, bundle: ParameterBundle) -> float:
    grid = np.array([0.0])
    return float(quasistatic.response_curve(
        grid, p_in, bundle.resonator, bundle.loss)[0])


def cmd_fig3(bundle, out: Path, plot: bool) -> list[Path]:
    top = 4.0 * _linear_resonant_power(bundle.p1_in_W, bundle)
    grid = np.linspace(0.0, top, 400)
    responding = quasistatic.response_curve(grid, bundle.p2_in_W,
                                            bundle.resonator, bundle.loss,
                                            bundle.resonator.phi2)
    paths = [write_csv(out / "fig3.csv",
                       ("assumed_intensity_W", "responding_intensity_W"),
                       zip(grid, responding))]
    if plot:
        paths.append(write_svg(out / "fig3.svg", grid,
                               {"I2R": responding},
                               "assumed I1R (W)", "responding I2R (W)"))
    return paths


def cmd_fig4(bundle, out: Path, plot: bool) -> list[Path]:
    top = 4.0 * _linear_resonant_power(bundle.p2_in_W, bundle)
    grid = np.linspace(0.0, top, 400)
    responding = quasistatic.response_curve(grid, bundle.p1_in_W,
                                            bundle.resonator, bundle.loss,
                                            bundle.resonator.phi1)
    paths = [write_csv(out / "fig4.csv",
                       ("assumed_intensity_W", "responding_intensity_W"),
                       zip(grid, responding))]
    if plot:
        paths.append(write_svg(out / "fig4.svg", grid,
                               {"I1R": responding},
                               "assumed I2R (W)", "responding I1R (W)"))
    return paths


def cmd_fig5(bundle, out: Path, plot: bool) -> list[Path]:
    sym = quasistatic.find_symmetric_solution(bundle.p1_in_W,
                                              bundle.resonator, bundle.loss)
    grid = np.linspace(0.0, 3.0 * sym.I1R, 400)
    curve_i2 = quasistatic.response_curve(grid, bundle.p2_in_W,
                                          bundle.resonator, bundle.loss,
                                          bundle.resonator.phi2)
    curve_i1 = quasistatic.response_curve(grid, bundle.p1_in_W,
                                          bundle.resonator, bundle.loss,
                                          bundle.resonator.phi1)
    rows = itertools.chain(
        (("I2R_vs_I1R", a, r) for a, r in zip(grid, curve_i2)),
        (("I1R_vs_I2R", a, r) for a, r in zip(grid, curve_i1)))
    paths = [write_csv(out / "fig5.csv",
                       ("curve", "assumed_intensity_W",
                        "responding_intensity_W"), rows)]
    if plot:
        paths.append(write_svg(out / "fig5.svg", grid,
                               {"I2R vs I1R": curve_i2,
                                "I1R vs I2R": curve_i1},
                               "assumed intensity (W)",
                               "responding intensity (W)"))
    return paths


def fig6_drive() -> dynamics.DriveSignal:
    return dynamics.DriveSignal(
        port1=(dynamics.Segment(FIG6_CONTROL_ON_S, FIG6_CONTROL_W),
               dynamics.Segment(FIG6_CONTROL_OFF_S, 0.0)),
        port2=(dynamics.Segment(0.0, FIG6_TARGET_W),))


def cmd_fig6(bundle, out: Path, plot: bool) -> list[Path]:
    ts = dynamics.simulate(fig6_drive(), FIG6_DURATION_S,
                           bundle.resonator, bundle.loss)
    times = dynamics.switching_times(ts)
    print(f"on_latency_ps = {times.on_latency_s * 1e12:.1f}")
    print(f"off_latency_ps = {times.off_latency_s * 1e12:.1f}")
    paths = [write_csv(out / "fig6.csv", dynamics.TimeSeries.CSV_COLUMNS,
                       ts.rows())]
    if plot:
        paths.append(write_svg(out / "fig6.svg", ts.t * 1e9,
                               {"reflected target (2A)": ts.out2a,
                                "transmitted target (2B)": ts.out2b,
                                "control input": ts.in1},
                               "time (ns)", "power (W)", logy=True))
    return paths


def fig7_drives() -> tuple[dynamics.DriveSignal, dynamics.DriveSignal]:
    target = (dynamics.Segment(FIG7_TARGET_ON_S, FIG7_LEVEL_W),)
    with_control = dynamics.DriveSignal(
        port1=(dynamics.Segment(FIG7_CONTROL_ON_S, FIG7_LEVEL_W),
               dynamics.Segment(FIG7_CONTROL_OFF_S, 0.0)),
        port2=target)
    without_control = dynamics.DriveSignal(port2=target)
    return with_control, without_control


def cmd_fig7(bundle, out: Path, plot: bool) -> list[Path]:
    with_control, without_control = fig7_drives()
    ts_on = dynamics.simulate(with_control, FIG7_DURATION_S,
                              bundle.resonator, bundle.loss)
    ts_off = dynamics.simulate(without_control, FIG7_DURATION_S,
                               bundle.resonator, bundle.loss)
    times = dynamics.switching_times(ts_on)
    print(f"on_latency_ps = {times.on_latency_s * 1e12:.1f}")
    print(f"off_latency_ps = {times.off_latency_s * 1e12:.1f}")
    paths = [
        write_csv(out / "fig7_control_on.csv",
                  dynamics.TimeSeries.CSV_COLUMNS, ts_on.rows()),
        write_csv(out / "fig7_control_off.csv",
                  dynamics.TimeSeries.CSV_COLUMNS, ts_off.rows()),
    ]
    if plot:
        paths.append(write_svg(out / "fig7.svg", ts_on.t * 1e9,
                               {"transmitted, control on": ts_on.out2b,
                                "reflected, control on": ts_on.out2a,
                                "reflected, no control": ts_off.out2a},
                               "time (ns)", "power (W)"))
    return paths


def cmd_fig9(bundle, out: Path, plot: bool) -> list[Path]:
    grid = np.linspace(0.05, 4.0, 80)
    center_nm = 0.5 * (bundle.resonator.lambda1 + bundle.resonator.lambda2) * 1e9
    log_ratio = rubidium.self_tpa_curve(grid, center_nm, bundle.vapor.gamma2)
    paths = [write_csv(out / "fig9.csv",
                       ("delta_lambda_nm", "log10_ratio"),
                       zip(grid, log_ratio))]
    if plot:
        paths.append(write_svg(out / "fig9.svg", grid,
                               {"log10(Rs/R2)": log_ratio},
                               "wavelength difference (nm)",
                               "log10 self/cross TPA"))
    return paths


_DETUNING_GRID = np.linspace(0.01, 2.12, 212)


def cmd_fig10(bundle, out: Path, plot: bool) -> list[Path]:
    rho = rubidium.required_density(_DETUNING_GRID, bundle.vapor)
    log_rho = np.log10(rho)
    paths = [write_csv(out / "fig10.csv",
                       ("detuning_nm", "log10_density_per_cc"),
                       zip(_DETUNING_GRID, log_rho))]
    if plot:
        paths.append(write_svg(out / "fig10.svg", _DETUNING_GRID,
                               {"log10 rho": log_rho},
                               "detuning (nm)", "log10 density (cm^-3)"))
    return paths


def cmd_fig11(bundle, out: Path, plot: bool) -> list[Path]:
    temp_c = rubidium.required_temperature_curve(_DETUNING_GRID, bundle.vapor)
    paths = [write_csv(out / "fig11.csv",
                       ("detuning_nm", "temperature_C"),
                       zip(_DETUNING_GRID, temp_c))]
    if plot:
        paths.append(write_svg(out / "fig11.svg", _DETUNING_GRID,
                               {"T": temp_c},
                               "detuning (nm)", "cell temperature (C)"))
    return paths


def table1_rows(bundle: ParameterBundle) -> list[tuple[str, float, float, float, float]]:
    """(name, computed, reference, relative deviation, tolerance) rows."""
    res, loss, vap = bundle.resonator, bundle.loss, bundle.vapor
    lam_center = 0.5 * (res.lambda1 + res.lambda2)
    flux = rubidium.effective_alpha(res, vap.R20, lam_center)
    f = performance.enhancement_factor(res.lambda1, res.Q, res.n_eff, res.L_m)
    gamma_q = performance.gamma_from_Q(res.lambda1, res.Q, res.n_eff)
    rho_thermal = rubidium.density_from_temperature(bundle.temperature_K)
    rho_required = float(rubidium.required_density(vap.delta_lambda, vap))
    temp_required_c = rubidium.temperature_for_density(rho_required) - 273.15
    derived_area = res.V / (math.pi * res.D * 100.0)

    rows = [
        ("circumference_cm", res.L_cm, 1.5708e-2, 1e-4),
        ("mode_area_cm2", derived_area, 4.83e-9, 5e-3),
        ("enhancement_factor", f, 30350.0, 1e-2),
        ("roundtrip_time_s", flux.dt_roundtrip, 6.81e-13, 5e-3),
        ("photon_energy_J", flux.photon_energy, 2.55e-19, 5e-3),
        ("single_photon_flux_W", flux.P_f, 3.74e-7, 5e-3),
        ("baseline_tpa_loss_per_cm", flux.L0, 4.08e-2, 1e-2),
        ("alpha0_cm_per_GW", flux.alpha0, 5.27e5, 1e-2),
        ("gamma_from_Q_per_cm", gamma_q, 2.13e-3, 2e-2),
        ("density_at_T_per_cc", rho_thermal, 5.6e10, 3e-2),
        ("required_density_per_cc", rho_required, 5.6e10, 3e-2),
        ("required_temperature_C", temp_required_c, 43.0, 2.0 / 43.0),
    ]
    return [(name, value, ref, abs(value - ref) / abs(ref), tol)
            for name, value, ref, tol in rows]


def cmd_table1(bundle, out: Path, plot: bool) -> list[Path]:
    rows = table1_rows(bundle)
    lines = [f"{'quantity':<28} {'computed':>16} {'reference':>12} "
             f"{'rel_dev':>10}  status"]
    failed = []
    for name, value, ref, dev, tol in rows:
        status = "PASS" if dev <= tol else "FAIL"
        if status == "FAIL":
            failed.append(name)
        lines.append(f"{name:<28} {value:>16.6e} {ref:>12.4e} "
                     f"{dev:>10.2e}  {status}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    path = out / "table1.txt"
    path.write_text(text, encoding="utf-8")
    if failed:
        raise quasistatic.DivergenceError(
            "table1 rows outside tolerance: " + ", ".join(failed), [])
    return [path]


def solution_text(sol: quasistatic.SteadySolution) -> str:
    lines = [
        f"I1R_W = {sol.I1R!r}",
        f"I2R_W = {sol.I2R!r}",
        f"branch = {sol.branch}",
        f"stable = {sol.stable}",
        f"spectral_radius = {sol.spectral_radius!r}",
        f"iterations = {sol.iterations}",
        f"out_1A_W = {sol.outputs.p1a!r}",
        f"out_1B_W = {sol.outputs.p1b!r}",
        f"out_2A_W = {sol.outputs.p2a!r}",
        f"out_2B_W = {sol.outputs.p2b!r}",
    ]
    return "\n".join(lines) + "\n"


def cmd_solve(bundle, out: Path, plot: bool) -> list[Path]:
    sol = quasistatic.solve_fixed_point(bundle.p1_in_W, bundle.p2_in_W,
                                        bundle.resonator, bundle.loss)
    text = solution_text(sol)
    print(text, end="")
    path = out / "solution.txt"
    path.write_text(text, encoding="utf-8")
    return [path]


def cmd_simulate(bundle, out: Path, plot: bool,
                 duration_s: float = 5e-9) -> list[Path]:
    drive = dynamics.DriveSignal.constant(bundle.p1_in_W, bundle.p2_in_W)
    ts = dynamics.simulate(drive, duration_s, bundle.resonator, bundle.loss)
    paths = [write_csv(out / "simulate.csv", dynamics.TimeSeries.CSV_COLUMNS,
                       ts.rows())]
    if plot:
        paths.append(write_svg(out / "simulate.svg", ts.t * 1e9,
                               {"I1R": ts.i1r, "I2R": ts.i2r},
                               "time (ns)", "circulating power (W)"))
    return paths


def parse_grid(spec: str) -> tuple[str, np.ndarray]:
    """Parse KEY=start:stop:steps[:log] into a key and its grid values."""
    if "=" not in spec:
        raise ConfigError(f"grid spec {spec!r} is not of the form "
                          f"KEY=start:stop:steps[:log]")
    key, rhs = spec.split("=", 1)
    key = key.strip()
    if key not in DEFAULT_CONFIG_VALUES and key != "vapor.level3_energy_J":
        raise ConfigError(f"grid references unknown key {key!r}")
    parts = rhs.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ConfigError(f"grid spec {spec!r} is not of the form "
                          f"KEY=start:stop:steps[:log]")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"grid spec {spec!r}: {exc}") from exc
    if steps < 1:
        raise ConfigError(f"grid spec {spec!r}: steps must be >= 1")
    if len(parts) == 4:
        values = np.logspace(math.log10(start), math.log10(stop), steps)
    else:
        values = np.linspace(start, stop, steps)
    return key, values


def cmd_sweep(bundle_raw: dict, out: Path, plot: bool, grids: list[str],
              report: str = "solve") -> list[Path]:
    if not grids:
        raise ConfigError("sweep requires at least one --grid KEY=... spec")
    parsed = [parse_grid(g) for g in grids]
    keys = [key for key, _ in parsed]
    if report == "solve":
        header = tuple(keys) + ("I1R_W", "I2R_W", "out_1A_W", "out_1B_W",
                                "out_2A_W", "out_2B_W", "branch", "stable",
                                "spectral_radius", "iterations")
    else:
        header = tuple(keys) + ("f", "R_crit", "gamma_Q_per_cm",
                                "P_c_W", "crosstalk", "insertion_loss")
    rows = []
    for combo in itertools.product(*(vals for _, vals in parsed)):
        raw = dict(bundle_raw)
        for key, value in zip(keys, combo):
            raw[key] = repr(float(value))
        bundle = bundle_from_raw(raw)
        point = tuple(float(v) for v in combo)
        if report == "solve":
            sol = quasistatic.solve_fixed_point(bundle.p1_in_W,
                                                bundle.p2_in_W,
                                                bundle.resonator, bundle.loss)
            rows.append(point
                        + (sol.I1R, sol.I2R, sol.outputs.p1a, sol.outputs.p1b,
                           sol.outputs.p2a, sol.outputs.p2b, sol.branch,
                           sol.stable, sol.spectral_radius, sol.iterations))
        else:
            rep = performance.perf_report(bundle)
            rows.append(point + (rep.f, rep.R_crit, rep.gamma_Q, rep.P_c,
                                 rep.crosstalk, rep.insertion_loss))
    return [write_csv(out / "sweep.csv", header, rows)]


def cmd_perf(bundle, out: Path, plot: bool) -> list[Path]:
    report = performance.perf_report(bundle)
    lines = [
        f"enhancement_factor = {report.f!r}",
        f"critical_coupling_R = {report.R_crit!r}",
        f"gamma_from_Q_per_cm = {report.gamma_Q!r}",
        f"gamma_configured_per_cm = {report.gamma_configured!r}",
        f"balance_power_formula_W = {report.P_c!r}",
        f"balance_power_quoted_W = {report.P_c_quoted!r}",
        f"balance_power_ratio = {report.P_c_ratio!r}",
        f"balance_residual = {report.balance_residual!r}",
        f"crosstalk = {report.crosstalk!r}",
        f"insertion_loss = {report.insertion_loss!r}",
    ]
    text = "\n".join(lines) + "\n"
    print(text, end="")
    path = out / "perf.txt"
    path.write_text(text, encoding="utf-8")
    return [path]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenoswitch",
        description="Microresonator two-photon-absorption switch simulator")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="parameter file (built-in nominal set if omitted)")
    parser.add_argument("--out", metavar="DIR", default="out",
                        help="output directory (default: ./out)")
    parser.add_argument("--plot", action="store_true",
                        help="also emit SVG plots")
    parser.add_argument("--override", metavar="K=V", action="append",
                        default=[], help="override a config key (repeatable)")
    parser.add_argument("--grid", metavar="KEY=start:stop:steps[:log]",
                        action="append", default=[],
                        help="sweep grid (sweep command, repeatable)")
    parser.add_argument("--duration", metavar="SECONDS", type=float,
                        default=5e-9, help="simulate command run length")
    parser.add_argument("--report", choices=("solve", "perf"),
                        default="solve",
                        help="row contents for the sweep command")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            raw = dict(DEFAULT_CONFIG_VALUES)
        else:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return EXIT_IO
            raw = parse_config_text(text)
        raw = apply_overrides(raw, args.override)
        bundle = bundle_from_raw(raw)
    except (ConfigError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        if args.command == "sweep":
            paths = cmd_sweep(raw, out, args.plot, args.grid, args.report)
        elif args.command == "simulate":
            paths = cmd_simulate(bundle, out, args.plot, args.duration)
        else:
            handler = {
                "fig3": cmd_fig3, "fig4": cmd_fig4, "fig5": cmd_fig5,
                "fig6": cmd_fig6, "fig7": cmd_fig7, "fig9": cmd_fig9,
                "fig10": cmd_fig10, "fig11": cmd_fig11,
                "table1": cmd_table1, "solve": cmd_solve, "perf": cmd_perf,
            }[args.command]
            paths = handler(bundle, out, args.plot)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (quasistatic.DivergenceError, quasistatic.NoSymmetricSolutionError,
            quasistatic.SingularResonanceError, dynamics.NotSwitchedError,
            dynamics.IndeterminateStateError, dynamics.EmptyRunError,
            rubidium.TemperatureRangeError,
            rubidium.VirtualLevelResonanceError,
            performance.OutsideApproximationError) as exc:
        print(f"error ({args.command}): {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
