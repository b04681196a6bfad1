"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 singular grid points
(outputs still written), 4 oracle threshold breach, 5 divergence or an
unstable configuration refused by ``oracle``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from omitlab import __version__
from omitlab.errors import Diverged, NoRealRoot, SingularPoint
from omitlab.params import (
    ConfigError,
    SystemParams,
    Topology,
    drive_amplitudes,
    load_config,
    paper_defaults,
    validate,
)
from omitlab.steady_state import solve
from omitlab.sweeps import (
    FIGURES,
    SpectrumSeries,
    detuning_grid,
    figure_preset,
    gain_ratio_sweep,
    group_delay,
    power_grid,
    power_sweep,
    spectrum_sweep,
)
from omitlab.svg import line_chart

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_THRESHOLD = 4
EXIT_DIVERGED = 5

PRESETS = {"paper-single": Topology.SINGLE, "paper-double": Topology.DOUBLE}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON file with SystemParams fields (SI units)")
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from the reference parameter set")
    p.add_argument("--out", default="omitlab-out", help="output directory")
    p.add_argument("--svg", action="store_true", help="also write an SVG line chart")
    p.add_argument("--points", type=int, help="grid size")
    p.add_argument("--kappa-ratio", type=float, help="set kappa = ratio * gamma")
    p.add_argument("--j-ratio", type=float, help="set J = ratio * gamma (double only)")
    p.add_argument("--probe-ratio", type=float, help="eps_p / eps_l")
    p.add_argument("--p-l", type=float, help="pump power in W")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="omitlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"omitlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("steady", parents=[common], help="steady state and stability")

    sp = sub.add_parser("spectrum", parents=[common], help="response versus probe detuning")
    sp.add_argument("--span", type=float, default=0.1, help="half-width in units of omega_m")

    dp = sub.add_parser("delay", parents=[common], help="group delays at resonance")
    dp.add_argument("--delta-p", type=float, default=0.0, help="probe detuning in rad/s")

    pp = sub.add_parser("power-sweep", parents=[common], help="group delays versus pump power")
    pp.add_argument("--p-min", type=float, default=1e-6)
    pp.add_argument("--p-max", type=float, default=2e-3)

    gp = sub.add_parser("gain-sweep", parents=[common], help="response versus kappa/gamma")
    gp.add_argument("--ratio-min", type=float, default=0.0)
    gp.add_argument("--ratio-max", type=float, default=1.6)

    fp = sub.add_parser("figure", parents=[common], help="reproduce one figure panel")
    fp.add_argument("name", help=f"one of {', '.join(FIGURES)}")

    op = sub.add_parser("oracle", parents=[common], help="time-domain check of the closed form")
    op.add_argument("--allow-unstable", action="store_true")
    op.add_argument("--extrapolate", action="store_true",
                    help="Richardson-extrapolate in probe amplitude (two runs)")
    op.add_argument("--periods", type=int, default=4000)
    return parser


def resolve_params(args: argparse.Namespace) -> SystemParams:
    """Preset defaults, then the config file, then explicit flags."""
    base = paper_defaults(PRESETS[args.preset]) if args.preset else None
    if args.config:
        params = load_config(args.config, base)
    elif base is not None:
        params = base
    else:
        params = paper_defaults(Topology.SINGLE)
    if args.kappa_ratio is not None:
        params = params.with_kappa_ratio(args.kappa_ratio)
    if args.j_ratio is not None:
        params = replace(params, coupling_j=args.j_ratio * params.gamma)
    if args.probe_ratio is not None:
        params = replace(params, probe_ratio=args.probe_ratio)
    if args.p_l is not None:
        params = replace(params, p_l=args.p_l)
    problems = validate(params)
    if problems:
        raise ConfigError("; ".join(problems))
    return params


def _require_probe(params: SystemParams) -> None:
    if params.probe_ratio <= 0 or params.p_l <= 0:
        raise ConfigError("probe_ratio: eps_p must be > 0 for transmission and efficiency")


def _write_manifest(out: Path, args: argparse.Namespace, argv: list[str]) -> None:
    manifest = {
        "command": args.command,
        "argv": argv,
        "config_path": args.config or "",
        "output_dir": str(out),
        "seedless_deterministic": True,
        "tool_version": __version__,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _write_series(out: Path, stem: str, series: SpectrumSeries) -> None:
    (out / f"{stem}.csv").write_bytes(series.to_csv().encode("ascii"))


def _svg(out: Path, stem: str, bundle: dict[str, SpectrumSeries], observables) -> None:
    for obs in observables:
        curves = {
            label: (s.swept_values, s.observables[obs])
            for label, s in bundle.items()
            if obs in s.observables
        }
        if not curves:
            continue
        first = next(iter(bundle.values()))
        svg = line_chart(curves, title=f"{stem}: {obs}", xlabel=first.swept_name, ylabel=obs,
                         logx=first.swept_name == "p_l")
        (out / f"{stem}_{obs}.svg").write_text(svg)


def _series_meta(bundle: dict[str, SpectrumSeries]) -> dict:
    return {label: s.metadata for label, s in bundle.items()}


def cmd_steady(args, params, out: Path) -> int:
    ss = solve(params, drive_amplitudes(params))
    data = {"params": params.to_dict(), "steady_state": ss.to_dict()}
    _write_json(out / "steady.json", data)
    print(json.dumps(ss.to_dict(), indent=2))
    if not ss.stable:
        print("warning: steady state is linearly unstable", file=sys.stderr)
    return EXIT_OK


def cmd_spectrum(args, params, out: Path) -> int:
    _require_probe(params)
    grid = detuning_grid(params, args.points or 401, args.span)
    series = spectrum_sweep(params, drive_amplitudes(params), grid)
    _write_series(out, "spectrum", series)
    _write_json(out / "meta.json", series.metadata)
    if args.svg:
        _svg(out, "spectrum", {"spectrum": series}, ("t_p2", "eta"))
    return EXIT_SINGULAR if series.gaps else EXIT_OK


def cmd_delay(args, params, out: Path) -> int:
    _require_probe(params)
    drive = drive_amplitudes(params)
    ss = solve(params, drive)
    result = group_delay(params, drive, ss=ss, delta_p=args.delta_p)
    data = {
        "params": params.to_dict(),
        "delta_p": args.delta_p,
        "tau_g": result.tau_g,
        "tau_g_prime": result.tau_g_prime,
        "step_used": result.step_used,
        "converged": result.converged,
        "stable": ss.stable,
    }
    _write_json(out / "delay.json", data)
    print(f"tau_g = {result.tau_g:.6e} s, tau_g' = {result.tau_g_prime:.6e} s"
          f"{'' if result.converged else ' (not converged)'}")
    return EXIT_OK


def cmd_power_sweep(args, params, out: Path) -> int:
    _require_probe(params)
    grid = power_grid(args.points or 200, args.p_min, args.p_max)
    series = power_sweep(params, grid)
    _write_series(out, "power_sweep", series)
    _write_json(out / "meta.json", series.metadata)
    if args.svg:
        _svg(out, "power_sweep", {"power_sweep": series}, ("tau_g", "tau_g_prime"))
    return EXIT_SINGULAR if series.gaps else EXIT_OK


def cmd_gain_sweep(args, params, out: Path) -> int:
    _require_probe(params)
    if params.topology is not Topology.DOUBLE:
        raise ConfigError("topology: gain-sweep needs the double topology")
    ratios = np.linspace(args.ratio_min, args.ratio_max, args.points or 401)
    series = gain_ratio_sweep(params, drive_amplitudes(params), ratios)
    _write_series(out, "gain_sweep", series)
    _write_json(out / "meta.json", series.metadata)
    if args.svg:
        _svg(out, "gain_sweep", {"gain_sweep": series}, ("t_p2", "eta"))
    return EXIT_SINGULAR if series.gaps else EXIT_OK


def cmd_figure(args, out: Path) -> int:
    bundle = figure_preset(args.name, points=args.points)
    for label, series in bundle.items():
        _write_series(out, f"{args.name}_{label}", series)
    _write_json(out / f"{args.name}.meta.json", _series_meta(bundle))
    if args.svg:
        first = next(iter(bundle.values()))
        names = [n for n in first.observables if n not in ("stable", "converged")]
        _svg(out, args.name, bundle, names)
    gaps = sum(s.gaps for s in bundle.values())
    return EXIT_SINGULAR if gaps else EXIT_OK


def cmd_oracle(args, params, out: Path) -> int:
    from omitlab.oracle import compare

    _require_probe(params)
    drive = drive_amplitudes(params)
    ss = solve(params, drive)
    if not ss.stable and not args.allow_unstable:
        print(
            "refusing: steady state is linearly unstable (max Re eigenvalue "
            f"{max(e.real for e in ss.stability_eigs):.3e} 1/s); pass --allow-unstable to try",
            file=sys.stderr,
        )
        return EXIT_DIVERGED
    try:
        report = compare(params, drive, periods=args.periods, extrapolate=args.extrapolate)
    except Diverged as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    data = {"params": params.to_dict(), "report": report.to_dict()}
    _write_json(out / "oracle.json", data)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_THRESHOLD


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        if args.command == "figure":
            if args.name not in FIGURES:
                print(f"unknown figure {args.name!r}; valid names: {', '.join(FIGURES)}",
                      file=sys.stderr)
                return EXIT_CONFIG
            out.mkdir(parents=True, exist_ok=True)
            code = cmd_figure(args, out)
        else:
            params = resolve_params(args)
            out.mkdir(parents=True, exist_ok=True)
            handler = {
                "steady": cmd_steady,
                "spectrum": cmd_spectrum,
                "delay": cmd_delay,
                "power-sweep": cmd_power_sweep,
                "gain-sweep": cmd_gain_sweep,
                "oracle": cmd_oracle,
            }[args.command]
            code = handler(args, params, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularPoint, NoRealRoot) as exc:
        print(f"singular configuration: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    _write_manifest(out, args, argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
