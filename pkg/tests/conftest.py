import pytest

from omitlab import Topology, drive_amplitudes, paper_defaults, solve


@pytest.fixture
def single_passive():
    return paper_defaults(Topology.SINGLE).with_kappa_ratio(-1.0)


@pytest.fixture
def single_active():
    return paper_defaults(Topology.SINGLE).with_kappa_ratio(1.0)


@pytest.fixture
def double_passive():
    return paper_defaults(Topology.DOUBLE).with_kappa_ratio(-1.0)


def prepared(params):
    drive = drive_amplitudes(params)
    return params, drive, solve(params, drive)
