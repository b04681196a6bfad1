"""Closed-form sideband response in the frequency domain.

The fluctuations around the steady state are expanded in harmonics of the
pump-probe beat ``xi``. The first-order amplitudes ``A+(1)``, ``X(1)`` and
the upper second-order sideband ``A+(2)`` follow from three complex
response functions:

* ``lam(xi) = m (omega_m^2 - xi^2 - i xi Gamma_m)`` (mechanics),
* ``lam1(xi)``, the optical response at ``omega_l + xi``,
* ``lam2(xi) = conj(lam1(-xi))``, the conjugated response at ``omega_l - xi``.

For the coupled pair the second resonator is eliminated exactly, which
adds ``J^2 / (i(delta_l - xi) - kappa)`` to ``lam1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from omitlab.errors import BalancePole, DegenerateDenominator, SingularPoint
from omitlab.params import DriveFields, SystemParams, Topology
from omitlab.steady_state import SteadyState

DEGENERATE_TOL = 1e-30


@dataclass(frozen=True)
class LambdaSet:
    lam: complex
    lam1: complex
    lam2: complex
    at_xi: float


@dataclass(frozen=True)
class SidebandResponse:
    xi: float
    a_plus_1: complex
    x_1: complex
    a_plus_2: complex
    t_p: complex
    eta: float
    stable: bool

    @property
    def t_p2(self) -> float:
        return abs(self.t_p) ** 2


def mechanical_lambda(xi: float, params: SystemParams) -> complex:
    return params.m * complex(params.omega_m**2 - xi**2, -xi * params.gamma_m)


def optical_lambda(xi: float, params: SystemParams, ss: SteadyState) -> complex:
    """``lam1(xi)``: inverse optical susceptibility at the upper frequency."""
    detuning = complex(0.0, params.delta_l - params.g * ss.x_s)
    if params.topology is Topology.SINGLE:
        return complex(-params.kappa, -xi) + detuning
    inner = complex(-params.kappa, params.delta_l - xi)
    if inner == 0:
        raise SingularPoint(
            f"i(delta_l - xi) - kappa = 0 at xi = {xi!r}: second resonator is lossless and resonant"
        )
    return complex(params.gamma, -xi) + detuning + params.coupling_j**2 / inner


def lambda_set(xi: float, params: SystemParams, ss: SteadyState) -> LambdaSet:
    lam1 = optical_lambda(xi, params, ss)
    lam2 = optical_lambda(-xi, params, ss).conjugate()
    return LambdaSet(lam=mechanical_lambda(xi, params), lam1=lam1, lam2=lam2, at_xi=xi)


def _photon_pressure(params: SystemParams, ss: SteadyState) -> float:
    """``hbar g^2 |a_s|^2``, the optical spring strength."""
    return params.hbar * params.g**2 * abs(ss.a1_s) ** 2


def _linear_denominator(ls: LambdaSet, pressure: float) -> complex:
    d = ls.lam * ls.lam1 * ls.lam2 + 1j * (ls.lam1 - ls.lam2) * pressure
    scale = abs(ls.lam * ls.lam1 * ls.lam2) + abs(ls.lam1 - ls.lam2) * pressure
    if d == 0 or abs(d) < DEGENERATE_TOL * scale:
        raise DegenerateDenominator(f"response denominator vanishes at xi = {ls.at_xi!r}")
    return d


def first_order(
    xi: float, params: SystemParams, drive: DriveFields, ss: SteadyState
) -> tuple[complex, complex]:
    """First-order amplitudes ``(A+(1), X(1))`` at beat frequency ``xi``."""
    ls = lambda_set(xi, params, ss)
    pressure = _photon_pressure(params, ss)
    d1 = _linear_denominator(ls, pressure)
    eps_p = drive.eps_p
    a_plus_1 = (ls.lam * ls.lam2 + 1j * pressure) * eps_p / d1
    x_1 = ls.lam2 * params.hbar * params.g * ss.a1_s.conjugate() * eps_p / d1
    return a_plus_1, x_1


def second_order(
    xi: float,
    params: SystemParams,
    drive: DriveFields,
    ss: SteadyState,
    first: tuple[complex, complex],
) -> complex:
    """Upper second-order sideband ``A+(2)`` from the first-order pair at the same ``xi``."""
    a_plus_1, x_1 = first
    one = lambda_set(xi, params, ss)
    two = lambda_set(2.0 * xi, params, ss)
    g = params.g
    hbar = params.hbar
    a_s = ss.a1_s
    n_s = abs(a_s) ** 2
    pressure = _photon_pressure(params, ss)
    c1 = -1j * hbar * g**4 * a_s * n_s
    c2 = hbar * g**3 * (two.lam2 - one.lam2) * n_s + 1j * g * one.lam2 * two.lam * two.lam2
    if one.lam2 == 0:
        raise DegenerateDenominator(f"lam2 vanishes at xi = {xi!r}")
    d2 = one.lam2 * _linear_denominator(two, pressure)
    return (c1 * x_1**2 + c2 * a_plus_1 * x_1) / d2


def transmission(a_plus_1: complex, drive: DriveFields, params: SystemParams) -> complex:
    """Probe transmission amplitude ``t_p = 1 - (gamma / eps_p) A+(1)``."""
    if drive.eps_p == 0:
        raise ValueError("transmission is undefined for eps_p = 0")
    return 1.0 - params.gamma / drive.eps_p * a_plus_1


def efficiency(a_plus_2: complex, drive: DriveFields, params: SystemParams) -> float:
    """Second-order sideband efficiency ``|gamma A+(2) / eps_p|``."""
    if drive.eps_p == 0:
        raise ValueError("efficiency is undefined for eps_p = 0")
    return abs(params.gamma / drive.eps_p * a_plus_2)


def evaluate(
    xi: float, params: SystemParams, drive: DriveFields, ss: SteadyState
) -> SidebandResponse:
    first = first_order(xi, params, drive, ss)
    a2 = second_order(xi, params, drive, ss, first)
    return SidebandResponse(
        xi=xi,
        a_plus_1=first[0],
        x_1=first[1],
        a_plus_2=a2,
        t_p=transmission(first[0], drive, params),
        eta=efficiency(a2, drive, params),
        stable=ss.stable,
    )


def eta_approx_ep(params: SystemParams, drive: DriveFields, ss: SteadyState) -> float:
    """Resonant sideband efficiency of the coupled pair in the ``x_s -> 0`` limit.

    Diagnostic only: the expression has a fourth-order pole at
    ``J^2 = kappa gamma`` and is not used by the sweeps.
    """
    if params.topology is not Topology.DOUBLE:
        raise ValueError("eta_approx_ep needs the double topology")
    j2 = params.coupling_j**2
    kappa, gamma = params.kappa, params.gamma
    balance = j2 - kappa * gamma
    if abs(balance) < 1e-12 * j2 or balance == 0:
        raise BalancePole(f"J^2 - kappa*gamma = {balance!r} at gain-loss balance")
    hbar, g, m = params.hbar, params.g, params.m
    n_s = abs(ss.a1_s) ** 2
    num = 1j * hbar**2 * g**4 * n_s * ss.a1_s.conjugate() * kappa**4 * gamma * drive.eps_p
    den = (
        2.0
        * m**2
        * params.gamma_m**2
        * params.omega_m**3
        * balance**3
        * (m * params.omega_m * params.gamma_m * balance + 1j * hbar * g**2 * n_s * (j2 - kappa**2))
    )
    return float(abs(num / den))


def response_grid(
    xis: np.ndarray, params: SystemParams, drive: DriveFields, ss: SteadyState
) -> list[SidebandResponse | None]:
    """Evaluate on many beat frequencies; singular points become ``None``."""
    out: list[SidebandResponse | None] = []
    for xi in xis:
        try:
            out.append(evaluate(float(xi), params, drive, ss))
        except (SingularPoint, DegenerateDenominator):
            out.append(None)
    return out
