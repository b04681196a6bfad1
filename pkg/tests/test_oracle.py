import math
from dataclasses import replace

import numpy as np
import pytest

from omitlab.errors import Diverged, WindowTooShort
from omitlab.oracle import Trajectory, compare, extract_harmonics, integrate
from omitlab.params import DriveFields, drive_amplitudes, paper_defaults

from conftest import prepared


def period(p):
    return 2 * math.pi / p.omega_m


def test_extract_synthetic_two_tone():
    xi = 2 * math.pi * 1e6
    dt = (2 * math.pi / xi) / 64
    t = np.arange(64 * 800) * dt
    a1 = 3.0 - 1j + (0.2 + 0.1j) * np.exp(-1j * xi * t) + (0.01 - 0.03j) * np.exp(-2j * xi * t)
    traj = Trajectory(t=t, x=np.zeros_like(t), a1=a1, a2=a1[:0], dt=dt)
    amps = extract_harmonics(traj, xi, (1, 2, 3), discard=0.0)
    assert abs(amps[1] - (0.2 + 0.1j)) < 1e-12
    assert abs(amps[2] - (0.01 - 0.03j)) < 1e-12
    assert abs(amps[3]) < 1e-12


def test_extract_window_too_short():
    xi = 1.0
    dt = 0.1
    t = np.arange(1000) * dt
    traj = Trajectory(t=t, x=t * 0, a1=t * 0j, a2=t[:0] * 0j, dt=dt)
    with pytest.raises(WindowTooShort):
        extract_harmonics(traj, xi)


def test_dt_guard(single_passive):
    d = drive_amplitudes(single_passive)
    with pytest.raises(ValueError):
        integrate(single_passive, d, 1e-6, period(single_passive) / 100)


def test_zero_drive_stays_at_rest():
    p = replace(paper_defaults(), p_l=0.0)
    traj = integrate(p, drive_amplitudes(p), 50 * period(p), period(p) / 200)
    assert np.all(traj.a1 == 0) and np.all(traj.x == 0)


@pytest.mark.parametrize("topo", ["single", "double"])
def test_pump_only_settles_on_steady_state(topo):
    p, d, ss = prepared(replace(paper_defaults(topo), probe_ratio=0.0))
    traj = integrate(p, d, 2000 * period(p), period(p) / 200, ss=ss)
    assert abs(traj.a1[-1] - ss.a1_s) / abs(ss.a1_s) < 1e-6
    assert abs(traj.x[-1] - ss.x_s) / abs(ss.x_s) < 1e-6


def test_perturbation_decays_when_stable(single_passive):
    p, d, ss = prepared(replace(single_passive, probe_ratio=0.0))
    kicked = replace(ss, x_s=ss.x_s * 1.01, a1_s=ss.a1_s * 1.01)
    traj = integrate(p, d, 300 * period(p), period(p) / 200, start=kicked, ss=ss)
    early = abs(traj.a1[0] - ss.a1_s)
    assert abs(traj.a1[-1] - ss.a1_s) < 1e-3 * early


def test_unstable_bare_gain_diverges():
    p = replace(paper_defaults().with_kappa_ratio(1.0), g_override=0.0)
    with pytest.warns(UserWarning):
        with pytest.raises(Diverged):
            integrate(p, drive_amplitudes(p), 500 * period(p), period(p) / 200)


def _amps(p, d, ss, periods=2400, spp=400, start=None):
    traj = integrate(p, d, periods * period(p), period(p) / spp, start=start, ss=ss)
    return extract_harmonics(traj, p.delta_l, (1, 2))


def _rel(a, b):
    return max(abs(a[k] - b[k]) / abs(b[k]) for k in (1, 2))


def test_step_window_and_start_independence(single_passive):
    p, d, ss = prepared(single_passive)
    ref = _amps(p, d, ss)
    assert _rel(_amps(p, d, ss, spp=800), ref) < 1e-4
    assert _rel(_amps(p, d, ss, periods=2404), ref) < 1e-4
    assert _rel(_amps(p, d, ss, start=ss), ref) < 1e-4


def test_second_order_scales_quadratically(single_passive):
    base = replace(single_passive, probe_ratio=0.005)
    p, d, ss = prepared(base)
    d2 = DriveFields(d.eps_l, 2 * d.eps_p)
    m1, m2 = _amps(p, d, ss), _amps(p, d2, ss)
    assert abs(m2[2] / m1[2]) == pytest.approx(4.0, abs=1e-3)
    assert abs(m2[1] / m1[1]) == pytest.approx(2.0, abs=1e-3)


@pytest.mark.parametrize("topo", ["single", "double"])
def test_extrapolated_compare_passes(topo):
    p, d, _ = prepared(paper_defaults(topo))
    report = compare(p, d, periods=2000, extrapolate=True)
    assert report.stable and report.perturbative and report.extrapolated
    assert report.rel_err[1] < 1e-4 and report.rel_err[2] < 1e-4
    assert report.passed
    data = report.to_dict()
    assert data["passed"] is True and set(data["rel_err"]) == {"1", "2"}
