"""Classical steady state and its linear stability.

Both topologies reduce to ``a1 = eps_l / (d0 - i g x)`` with a complex
constant ``d0`` and the radiation-pressure balance
``x = hbar g / (m omega_m^2) |a1|^2``. In the scaled variable
``u = g x / |d0|`` this is the monic cubic

    u^3 - 2 q u^2 + u - s = 0,    q = Im(d0)/|d0|,  s = hbar g^2 eps_l^2 / (m omega_m^2 |d0|^3)

which is solved through its companion matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from omitlab.errors import NoRealRoot, SingularPoint
from omitlab.params import DriveFields, SystemParams, Topology

REAL_ROOT_TOL = 1e-8
STABILITY_TOL = 1e-6  # in units of gamma


@dataclass(frozen=True)
class SteadyState:
    x_s: float
    a1_s: complex
    a2_s: complex
    all_real_roots: tuple[float, ...]
    selected_index: int
    stability_eigs: tuple[complex, ...] = field(default=())
    stable: bool = False

    @property
    def multistable(self) -> bool:
        return len(self.all_real_roots) > 1

    def to_dict(self) -> dict:
        return {
            "x_s": self.x_s,
            "a1_s": [self.a1_s.real, self.a1_s.imag],
            "a2_s": [self.a2_s.real, self.a2_s.imag],
            "all_real_roots": list(self.all_real_roots),
            "selected_index": self.selected_index,
            "stability_eigs": [[z.real, z.imag] for z in self.stability_eigs],
            "stable": self.stable,
        }


def _bare_denominator(params: SystemParams) -> complex:
    """``d0`` such that ``a1_s = eps_l / (d0 - i g x_s)``."""
    if params.topology is Topology.SINGLE:
        return complex(-params.kappa, params.delta_l)
    inner = complex(-params.kappa, params.delta_l)
    if inner == 0:
        raise SingularPoint("i*delta_l - kappa = 0: second-cavity steady state undefined")
    return complex(params.gamma, params.delta_l) + params.coupling_j**2 / inner


def cubic_coefficients(params: SystemParams, drive: DriveFields) -> tuple[np.ndarray, float]:
    """Monic cubic in ``u = g x / |d0|`` and the factor ``|d0| / g`` back to metres."""
    d0 = _bare_denominator(params)
    scale = abs(d0)
    if scale == 0:
        raise SingularPoint("bare cavity denominator vanishes")
    g = params.g
    q = d0.imag / scale
    s = params.hbar * g**2 * drive.eps_l**2 / (params.m * params.omega_m**2 * scale**3)
    return np.array([1.0, -2.0 * q, 1.0, -s]), scale / g


def _real_roots(coeffs: np.ndarray) -> list[float]:
    roots = np.roots(coeffs)
    real = []
    for r in roots:
        if abs(r.imag) <= REAL_ROOT_TOL * max(1.0, abs(r)):
            real.append(_newton_polish(coeffs, r.real))
    return sorted(real)


def _newton_polish(coeffs: np.ndarray, u: float, steps: int = 4) -> float:
    dcoeffs = np.polyder(coeffs)
    for _ in range(steps):
        d = np.polyval(dcoeffs, u)
        if d == 0:
            break
        step = np.polyval(coeffs, u) / d
        if not np.isfinite(step):
            break
        u -= step
    return float(u)


def _solve_cubic(params: SystemParams, drive: DriveFields) -> tuple[list[float], int]:
    if params.g == 0 or drive.eps_l == 0:
        return [0.0], 0
    coeffs, to_metres = cubic_coefficients(params, drive)
    roots_u = _real_roots(coeffs)
    if not roots_u:
        raise NoRealRoot(f"no real root for cubic {coeffs}")
    roots_x = [u * to_metres for u in roots_u]
    non_negative = [i for i, x in enumerate(roots_x) if x >= 0]
    if not non_negative:
        raise NoRealRoot(f"no non-negative real root among {roots_x}")
    return roots_x, non_negative[0]


def solve_single(params: SystemParams, drive: DriveFields) -> SteadyState:
    """Lower-branch steady state of the single cavity."""
    if params.topology is not Topology.SINGLE:
        raise ValueError("solve_single needs the single topology")
    roots, idx = _solve_cubic(params, drive)
    x_s = roots[idx]
    a1 = drive.eps_l / complex(-params.kappa, params.delta_l - params.g * x_s)
    return _with_stability(params, x_s, a1, 0j, roots, idx)


def solve_double(params: SystemParams, drive: DriveFields) -> SteadyState:
    """Lower-branch steady state of the active-passive pair."""
    if params.topology is not Topology.DOUBLE:
        raise ValueError("solve_double needs the double topology")
    d0 = _bare_denominator(params)
    roots, idx = _solve_cubic(params, drive)
    x_s = roots[idx]
    a1 = drive.eps_l / (d0 - 1j * params.g * x_s)
    a2 = 1j * params.coupling_j * a1 / complex(-params.kappa, params.delta_l)
    return _with_stability(params, x_s, a1, a2, roots, idx)


def solve(params: SystemParams, drive: DriveFields) -> SteadyState:
    if params.topology is Topology.SINGLE:
        return solve_single(params, drive)
    return solve_double(params, drive)


def _with_stability(params, x_s, a1, a2, roots, idx) -> SteadyState:
    bare = SteadyState(
        x_s=float(x_s),
        a1_s=complex(a1),
        a2_s=complex(a2),
        all_real_roots=tuple(float(r) for r in roots),
        selected_index=idx,
    )
    eigs = stability_eigenvalues(params, bare)
    stable = bool(max(e.real for e in eigs) < -STABILITY_TOL * params.gamma)
    return SteadyState(
        x_s=bare.x_s,
        a1_s=bare.a1_s,
        a2_s=bare.a2_s,
        all_real_roots=bare.all_real_roots,
        selected_index=idx,
        stability_eigs=tuple(complex(e) for e in eigs),
        stable=stable,
    )


def _complex_block(z: complex) -> np.ndarray:
    """Real 2x2 matrix acting like multiplication by ``z``."""
    return np.array([[z.real, -z.imag], [z.imag, z.real]])


def jacobian(params: SystemParams, ss: SteadyState) -> np.ndarray:
    """Real Jacobian of the mean-field equations at ``ss`` (probe off).

    State ordering: ``(Re a1, Im a1, [Re a2, Im a2,] x, dx/dt)``.
    """
    g = params.g
    force = params.hbar * g / params.m
    double = params.topology is Topology.DOUBLE
    n = 6 if double else 4
    ix = n - 2
    jac = np.zeros((n, n))
    if double:
        loss = -params.gamma
    else:
        loss = params.kappa
    jac[0:2, 0:2] = _complex_block(complex(loss, g * ss.x_s - params.delta_l))
    coupling_x = 1j * g * ss.a1_s
    jac[0, ix] = coupling_x.real
    jac[1, ix] = coupling_x.imag
    if double:
        jac[0:2, 2:4] = _complex_block(1j * params.coupling_j)
        jac[2:4, 0:2] = _complex_block(1j * params.coupling_j)
        jac[2:4, 2:4] = _complex_block(complex(params.kappa, -params.delta_l))
    jac[ix, ix + 1] = 1.0
    jac[ix + 1, 0] = 2.0 * force * ss.a1_s.real
    jac[ix + 1, 1] = 2.0 * force * ss.a1_s.imag
    jac[ix + 1, ix] = -params.omega_m**2
    jac[ix + 1, ix + 1] = -params.gamma_m
    return jac


def stability_eigenvalues(params: SystemParams, ss: SteadyState) -> list[complex]:
    eigs = np.linalg.eigvals(jacobian(params, ss))
    return sorted((complex(e) for e in eigs), key=lambda z: (-z.real, z.imag))


def self_consistency_residual(params: SystemParams, ss: SteadyState) -> float:
    """Relative mismatch of the radiation-pressure balance."""
    k = params.hbar * params.g / (params.m * params.omega_m**2)
    target = k * abs(ss.a1_s) ** 2
    return abs(ss.x_s - target) / max(abs(ss.x_s), np.finfo(float).tiny)
