"""Parameter sweeps, group delays and figure presets."""

from __future__ import annotations

import enum
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from omitlab.errors import DegenerateDenominator, NoRealRoot, SingularPoint
from omitlab.params import DriveFields, SystemParams, Topology, drive_amplitudes, paper_defaults
from omitlab.response import evaluate, first_order, second_order, transmission
from omitlab.steady_state import SteadyState, solve

SPECTRUM_SPAN = 0.1  # half-width of figure spectra, in units of omega_m
SPECTRUM_POINTS = 401
POWER_RANGE = (1e-6, 2e-3)
POWER_POINTS = 200
DEFAULT_STEP = 1e-6  # finite-difference step, in units of omega_m
DELAY_RTOL = 1e-3
MAX_HALVINGS = 3

_RECOVERABLE = (SingularPoint, DegenerateDenominator, NoRealRoot, ZeroDivisionError)


class DelayKind(str, enum.Enum):
    PROBE = "probe"
    SECOND_ORDER = "second"
    BOTH = "both"


@dataclass
class SpectrumSeries:
    """Observables sampled along one swept parameter; ``None`` marks a gap."""

    swept_name: str
    swept_values: tuple[float, ...]
    observables: dict[str, list[float | None]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.swept_values)
        if n < 2:
            raise ValueError("a series needs at least two points")
        if any(b <= a for a, b in zip(self.swept_values, self.swept_values[1:])):
            raise ValueError(f"{self.swept_name} values must be strictly increasing")
        for name, values in self.observables.items():
            if len(values) != n:
                raise ValueError(f"observable {name} has {len(values)} values, expected {n}")

    def array(self, name: str) -> np.ndarray:
        """Observable as a float array with NaN in the gaps."""
        return np.array([np.nan if v is None else v for v in self.observables[name]])

    @property
    def gaps(self) -> int:
        """Number of grid points with at least one missing observable."""
        cols = list(self.observables.values())
        return sum(any(c[i] is None for c in cols) for i in range(len(self.swept_values)))

    def to_csv(self) -> str:
        names = list(self.observables)
        buf = io.StringIO()
        buf.write(",".join(["swept", *names]) + "\n")
        for i, x in enumerate(self.swept_values):
            row = [_fmt(x)] + [_fmt(self.observables[name][i]) for name in names]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


@dataclass(frozen=True)
class DelayResult:
    tau_g: float
    tau_g_prime: float
    step_used: float
    converged: bool


def default_workers() -> int:
    raw = os.environ.get("OMITLAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


def _ordered_map(fn: Callable, items: Sequence, workers: int | None) -> list:
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def unwrap_phase(raw: Iterable[float]) -> list[float]:
    """Remove 2*pi jumps so that adjacent differences fall in (-pi, pi]."""
    values = [float(v) for v in raw]
    if not values:
        raise ValueError("unwrap_phase needs at least one value")
    out = [values[0]]
    for prev_raw, cur_raw in zip(values, values[1:]):
        out.append(out[-1] + _wrap(cur_raw - prev_raw))
    return out


def _wrap(delta: float) -> float:
    """Map a phase difference into (-pi, pi]."""
    wrapped = math.remainder(delta, 2.0 * math.pi)
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped


def _unwrap_with_gaps(raw: list[float | None]) -> list[float | None]:
    present = [v for v in raw if v is not None]
    if not present:
        return list(raw)
    unwrapped = iter(unwrap_phase(present))
    return [None if v is None else next(unwrapped) for v in raw]


def _check_grid(grid: Sequence[float], name: str) -> tuple[float, ...]:
    values = tuple(float(v) for v in grid)
    if len(values) < 2 or any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} grid must be strictly increasing with at least two points")
    return values


def spectrum_sweep(
    params: SystemParams,
    drive: DriveFields,
    grid: Sequence[float],
    workers: int | None = None,
) -> SpectrumSeries:
    """Response versus probe detuning ``delta_p = xi - delta_l`` (rad/s)."""
    values = _check_grid(grid, "delta_p")
    ss = solve(params, drive)

    def point(delta_p: float):
        try:
            return evaluate(delta_p + params.delta_l, params, drive, ss)
        except _RECOVERABLE:
            return None

    responses = _ordered_map(point, values, workers)
    obs: dict[str, list[float | None]] = {
        "t_p2": [None if r is None else r.t_p2 for r in responses],
        "eta": [None if r is None else r.eta for r in responses],
        "arg_tp": _unwrap_with_gaps(
            [None if r is None else float(np.angle(r.t_p)) for r in responses]
        ),
        "arg_A2": _unwrap_with_gaps(
            [None if r is None else float(np.angle(r.a_plus_2)) for r in responses]
        ),
        "stable": [float(ss.stable)] * len(values),
    }
    meta = {
        "params": params.to_dict(),
        "swept": "delta_p",
        "units": "rad/s",
        "multistable": ss.multistable,
    }
    return SpectrumSeries("delta_p", values, obs, meta)


def _phases(xi: float, params, drive, ss) -> tuple[float, float]:
    first = first_order(xi, params, drive, ss)
    a2 = second_order(xi, params, drive, ss, first)
    t_p = transmission(first[0], drive, params)
    return float(np.angle(t_p)), float(np.angle(a2))


def _central(params, drive, ss, xi0: float, h: float) -> tuple[float, float]:
    lo = _phases(xi0 - h, params, drive, ss)
    hi = _phases(xi0 + h, params, drive, ss)
    tau = _wrap(hi[0] - lo[0]) / (2.0 * h)
    # the second-order sideband sits at 2 xi, hence the extra factor 1/2
    tau2 = _wrap(hi[1] - lo[1]) / (2.0 * h) / 2.0
    return tau, tau2


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= DELAY_RTOL * max(abs(a), abs(b)) or a == b


def group_delay(
    params: SystemParams,
    drive: DriveFields,
    which: DelayKind | str = DelayKind.BOTH,
    step: float | None = None,
    ss: SteadyState | None = None,
    delta_p: float = 0.0,
) -> DelayResult:
    """Group delays from central differences of the transmitted phases.

    Evaluated at ``xi = delta_l + delta_p``; the step is halved until the
    result changes by less than 0.1 % (at most three halvings). Quantities
    not requested by ``which`` are returned as NaN.
    """
    which = DelayKind(which)
    h = DEFAULT_STEP * params.omega_m if step is None else float(step)
    if not h > 0:
        raise ValueError("step must be positive")
    if ss is None:
        ss = solve(params, drive)
    xi0 = params.delta_l + delta_p
    want_probe = which in (DelayKind.PROBE, DelayKind.BOTH)
    want_second = which in (DelayKind.SECOND_ORDER, DelayKind.BOTH)

    prev = _central(params, drive, ss, xi0, h)
    converged = False
    for _ in range(MAX_HALVINGS):
        h /= 2.0
        cur = _central(params, drive, ss, xi0, h)
        ok_probe = not want_probe or _close(prev[0], cur[0])
        ok_second = not want_second or _close(prev[1], cur[1])
        prev = cur
        if ok_probe and ok_second:
            converged = True
            break
    return DelayResult(
        tau_g=prev[0] if want_probe else math.nan,
        tau_g_prime=prev[1] if want_second else math.nan,
        step_used=h,
        converged=converged,
    )


def power_sweep(
    params: SystemParams,
    grid: Sequence[float],
    step: float | None = None,
    delta_p: float = 0.0,
    workers: int | None = None,
) -> SpectrumSeries:
    """Group delays at ``delta_p`` versus pump power (W)."""
    values = _check_grid(grid, "p_l")
    if values[0] <= 0:
        raise ValueError("pump powers must be positive")

    def point(p_l: float):
        p = replace(params, p_l=p_l)
        drive = drive_amplitudes(p)
        try:
            ss = solve(p, drive)
            return ss, group_delay(p, drive, DelayKind.BOTH, step, ss, delta_p)
        except _RECOVERABLE:
            return None

    results = _ordered_map(point, values, workers)
    obs = {
        "tau_g": [None if r is None else r[1].tau_g for r in results],
        "tau_g_prime": [None if r is None else r[1].tau_g_prime for r in results],
        "stable": [None if r is None else float(r[0].stable) for r in results],
        "converged": [None if r is None else float(r[1].converged) for r in results],
    }
    meta = {"params": params.to_dict(), "swept": "p_l", "units": "W", "delta_p": delta_p}
    return SpectrumSeries("p_l", values, obs, meta)


def gain_ratio_sweep(
    params: SystemParams,
    drive: DriveFields,
    ratios: Sequence[float],
    delta_p: float = 0.0,
    workers: int | None = None,
) -> SpectrumSeries:
    """Transmission and sideband efficiency versus ``kappa / gamma``."""
    if params.topology is not Topology.DOUBLE:
        raise ValueError("gain_ratio_sweep needs the double topology")
    values = _check_grid(ratios, "kappa_ratio")

    def point(ratio: float):
        p = params.with_kappa_ratio(ratio)
        try:
            ss = solve(p, drive)
            return evaluate(p.delta_l + delta_p, p, drive, ss)
        except _RECOVERABLE:
            return None

    responses = _ordered_map(point, values, workers)
    obs = {
        "t_p2": [None if r is None else r.t_p2 for r in responses],
        "eta": [None if r is None else r.eta for r in responses],
        "stable": [None if r is None else float(r.stable) for r in responses],
    }
    meta = {"params": params.to_dict(), "swept": "kappa_ratio", "units": "1", "delta_p": delta_p}
    return SpectrumSeries("kappa_ratio", values, obs, meta)


def sign_changes(series: SpectrumSeries, name: str) -> list[float]:
    """Swept positions where an observable changes sign (geometric midpoints, gaps skipped)."""
    pts = [
        (x, v) for x, v in zip(series.swept_values, series.observables[name]) if v is not None
    ]
    crossings = []
    for (x0, v0), (x1, v1) in zip(pts, pts[1:]):
        if v0 == 0 or (v0 > 0) != (v1 > 0):
            mid = math.sqrt(x0 * x1) if x0 > 0 and x1 > 0 else 0.5 * (x0 + x1)
            crossings.append(mid)
    return crossings


def detuning_grid(params: SystemParams, points: int = SPECTRUM_POINTS,
                  span: float = SPECTRUM_SPAN) -> np.ndarray:
    return np.linspace(-span, span, points) * params.omega_m


def power_grid(points: int = POWER_POINTS, lo: float = POWER_RANGE[0],
               hi: float = POWER_RANGE[1]) -> np.ndarray:
    return np.geomspace(lo, hi, points)


FIGURES = ("Fig2a", "Fig2b", "Fig2c", "Fig2d", "Fig3a", "Fig3b",
           "Fig4a", "Fig4b", "Fig4c", "Fig4d")

_SPECTRUM_FIGS = {
    "Fig2a": (Topology.SINGLE, (-1.0, 1.0)),
    "Fig2b": (Topology.SINGLE, (-1.0, 1.0)),
    "Fig3a": (Topology.DOUBLE, (0.4, 1.0, 1.6)),
}
_POWER_FIGS = {
    "Fig2c": (Topology.SINGLE, -1.0),
    "Fig2d": (Topology.SINGLE, 1.0),
    "Fig4a": (Topology.DOUBLE, -1.0),
    "Fig4b": (Topology.DOUBLE, 0.4),
    "Fig4c": (Topology.DOUBLE, 1.0),
    "Fig4d": (Topology.DOUBLE, 1.6),
}
GAIN_SWEEP_RANGE = (0.0, 1.6)


def _label(ratio: float) -> str:
    return f"kappa_ratio_{ratio:g}"


def figure_preset(
    name: str,
    points: int | None = None,
    workers: int | None = None,
) -> dict[str, SpectrumSeries]:
    """All series behind one figure panel, keyed by a file-safe label.

    Detuning axes span ``+-0.1 omega_m`` with 401 points, power axes are
    log-spaced over 1 uW .. 2 mW with 200 points and the gain-to-loss axis
    covers 0 .. 1.6 with 401 points. ``points`` overrides the count.
    """
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; valid: {', '.join(FIGURES)}")
    if name in _SPECTRUM_FIGS:
        topology, ratios = _SPECTRUM_FIGS[name]
        base = paper_defaults(topology)
        grid = detuning_grid(base, points or SPECTRUM_POINTS)
        bundle = {}
        for ratio in ratios:
            p = base.with_kappa_ratio(ratio)
            series = spectrum_sweep(p, drive_amplitudes(p), grid, workers)
            series.metadata.update(figure=name, kappa_ratio=ratio)
            bundle[_label(ratio)] = series
        return bundle
    if name in _POWER_FIGS:
        topology, ratio = _POWER_FIGS[name]
        p = paper_defaults(topology).with_kappa_ratio(ratio)
        series = power_sweep(p, power_grid(points or POWER_POINTS), workers=workers)
        series.metadata.update(figure=name, kappa_ratio=ratio)
        return {_label(ratio): series}
    base = paper_defaults(Topology.DOUBLE)
    ratios = np.linspace(*GAIN_SWEEP_RANGE, points or SPECTRUM_POINTS)
    series = gain_ratio_sweep(base, drive_amplitudes(base), ratios, workers=workers)
    series.metadata.update(figure=name)
    return {"gain_ratio": series}
