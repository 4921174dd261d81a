import os

import pytest
from hypothesis import HealthCheck, settings

from qpmutation import exactlin as el
from qpmutation.qpmut import QP
from qpmutation.quiver import Quiver
from qpmutation.repcat import Representation

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

F32003 = el.PrimeField(32003)


def three_cycle_quiver():
    return Quiver.from_arrows(["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1")])


def three_cycle_qp(F=F32003, D=12):
    return QP.make(three_cycle_quiver(), F, [(1, ("c", "b", "a"))], D)


def running_rep(F=F32003, a=1, b=0, c=0):
    return Representation(three_cycle_qp(F), {"1": 1, "2": 1, "3": 1},
                          {"a": [[a]], "b": [[b]], "c": [[c]]})


@pytest.fixture
def F():
    return F32003


@pytest.fixture
def qp3():
    return three_cycle_qp()


@pytest.fixture
def M_run():
    return running_rep()
