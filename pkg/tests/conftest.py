import numpy as np
import pytest

from resilient_dmfac.attacks import AASignal, DoSSchedule
from resilient_dmfac.cpl import CompensatorParams
from resilient_dmfac.engine import Scenario
from resilient_dmfac.plant import AgentModel, LeaderModel, TL_FOLLOWER
from resilient_dmfac.topology import CommGraph
from resilient_dmfac.twin_layer import MfacGains

FOUR_ADJ = [[0, 0, 0, 1], [1, 0, 1, 0], [0, 1, 0, 0], [1, 0, 1, 0]]
FOUR_PINS = [1, 0, 1, 0]

ACCEPTANCE_LINES = []


@pytest.fixture
def four_graph():
    return CommGraph(FOUR_ADJ, FOUR_PINS)


def linear_scenario(horizon=150, dos=None, compensate=True, aa=("0",) * 4,
                    leader="1", graph=None):
    """Unit-PPD plants y(k+1) = u(k) on both layers."""
    graph = graph or CommGraph(FOUR_ADJ, FOUR_PINS)
    n = graph.n_followers
    return Scenario(
        graph=graph,
        leader=LeaderModel(leader),
        cpl_models=[AgentModel("u")] * n,
        tl_models=[AgentModel("u", TL_FOLLOWER)] * n,
        aa=[AASignal(a, 0.03) for a in aa[:n]],
        tl_gains=MfacGains(eta=1, mu=1, gamma=0.6, lam=1),
        cpl_gains=MfacGains(eta=1, mu=1, gamma=0.8, lam=1),
        comp=CompensatorParams(gamma_r=0.4, d_bar=0.03),
        horizon=horizon,
        dos=dos if dos is not None else DoSSchedule((), horizon),
        compensate=compensate,
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
