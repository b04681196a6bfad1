"""Physical parameters and drive amplitudes.

All rates are used numerically as quoted (``omega_c = 1.93e14``,
``gamma = 6.43e6``, ``gamma_m = 2.4e5``); only the mechanical frequency
carries an explicit 2*pi.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

HBAR = 1.0545718e-34  # J s


class Topology(str, enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


@dataclass(frozen=True)
class SystemParams:
    """One optomechanical configuration, SI units.

    ``kappa`` is signed. For the single cavity it is the net optical rate
    (``kappa < 0`` is a lossy cavity); for the coupled pair it is the gain
    of the second resonator. ``coupling_j`` must be zero for a single
    cavity.

    The optomechanical coupling is derived as ``omega_c / radius``;
    ``g_override`` replaces it for limiting cases such as ``g = 0``.
    """

    topology: Topology = Topology.SINGLE
    m: float = 50e-12
    omega_m: float = 2 * math.pi * 23.4e6
    gamma_m: float = 2.4e5
    omega_c: float = 1.93e14
    gamma: float = 6.43e6
    kappa: float = -6.43e6
    coupling_j: float = 0.0
    radius: float = 34.5e-6
    delta_l: float = 2 * math.pi * 23.4e6
    p_l: float = 933e-6
    probe_ratio: float = 0.05
    hbar: float = HBAR
    g_override: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.topology, Topology):
            object.__setattr__(self, "topology", Topology(self.topology))

    @property
    def g(self) -> float:
        """Optomechanical coupling in rad/(s m)."""
        if self.g_override is not None:
            return self.g_override
        return self.omega_c / self.radius

    @property
    def omega_l(self) -> float:
        return self.omega_c - self.delta_l

    @property
    def is_double(self) -> bool:
        return self.topology is Topology.DOUBLE

    def with_kappa_ratio(self, ratio: float) -> SystemParams:
        return replace(self, kappa=ratio * self.gamma)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["topology"] = self.topology.value
        return d


@dataclass(frozen=True)
class DriveFields:
    eps_l: float
    eps_p: float


def paper_defaults(topology: Topology | str = Topology.SINGLE) -> SystemParams:
    """Parameter set used for every figure; the double cavity gets ``J = gamma``.

    ``kappa`` defaults to ``-gamma`` (passive); pick the gain with
    :meth:`SystemParams.with_kappa_ratio`.
    """
    topology = Topology(topology)
    omega_m = 2 * math.pi * 23.4e6
    gamma = 6.43e6
    return SystemParams(
        topology=topology,
        m=50e-12,
        omega_m=omega_m,
        gamma_m=2.4e5,
        omega_c=1.93e14,
        gamma=gamma,
        kappa=-gamma,
        coupling_j=gamma if topology is Topology.DOUBLE else 0.0,
        radius=34.5e-6,
        delta_l=omega_m,
        p_l=933e-6,
        probe_ratio=0.05,
        hbar=HBAR,
    )


def drive_amplitudes(params: SystemParams) -> DriveFields:
    """Pump and probe amplitudes ``eps_l = sqrt(2 gamma P_l / (hbar omega_l))``."""
    if params.p_l < 0:
        raise ValueError(f"p_l must be >= 0, got {params.p_l}")
    eps_l = math.sqrt(2.0 * params.gamma * params.p_l / (params.hbar * params.omega_l))
    return DriveFields(eps_l=eps_l, eps_p=params.probe_ratio * eps_l)


def validate(params: SystemParams) -> list[str]:
    """Return one message per violated invariant (empty when valid)."""
    problems = []
    positive = ("m", "omega_m", "gamma", "radius", "hbar")
    non_negative = ("gamma_m", "p_l", "probe_ratio")
    for name in positive:
        value = getattr(params, name)
        if not (value > 0 and math.isfinite(value)):
            problems.append(f"{name}: must be > 0, got {value!r}")
    for name in non_negative:
        value = getattr(params, name)
        if not (value >= 0 and math.isfinite(value)):
            problems.append(f"{name}: must be >= 0, got {value!r}")
    for name in ("omega_c", "kappa", "coupling_j", "delta_l"):
        value = getattr(params, name)
        if not math.isfinite(value):
            problems.append(f"{name}: must be finite, got {value!r}")
    if params.topology is Topology.SINGLE and params.coupling_j != 0:
        problems.append(
            f"coupling_j: must be 0 for the single topology, got {params.coupling_j!r}"
        )
    if params.omega_l <= 0:
        problems.append("delta_l: pump frequency omega_c - delta_l must be > 0")
    return problems


_FIELD_NAMES = {f.name for f in fields(SystemParams)}


def params_from_dict(
    data: Mapping[str, Any], base: SystemParams | None = None
) -> SystemParams:
    """Build parameters from a JSON-like mapping, rejecting unknown keys."""
    unknown = sorted(set(data) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
    values = {}
    for key, raw in data.items():
        if key == "topology":
            try:
                values[key] = Topology(str(raw).lower())
            except ValueError:
                raise ConfigError(f"topology: expected 'single' or 'double', got {raw!r}")
        elif key == "g_override" and raw is None:
            values[key] = None
        else:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ConfigError(f"{key}: expected a number, got {raw!r}")
            values[key] = float(raw)
    if base is None:
        base = paper_defaults(values.get("topology", Topology.SINGLE))
    return replace(base, **values)


def load_config(path: str | Path, base: SystemParams | None = None) -> SystemParams:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return params_from_dict(data, base)
