"""
DoS schedules and the duty-cycle budget
=======================================

Draw random schedules under a budget (M, beta), check the prefix condition,
and watch the twin layer hold its inputs while communication is jammed.
"""
import numpy as np

from resilient_dmfac import DoSBudget, generate_schedule, run, validate_budget
from resilient_dmfac.attacks import DoSSchedule
from resilient_dmfac.engine import Scenario
from resilient_dmfac.scenario import bundled_scenario

budget = DoSBudget(M=10, beta=0.2)
for seed in range(3):
    s = generate_schedule(budget, 600, seed, window_end=150)
    print(seed, s.intervals, "attacked:", s.attacked_steps, "ok:", validate_budget(s, budget))

# counting attacked steps against M + beta*k shows where the budget binds
s = generate_schedule(budget, 200, 0)
used = np.cumsum(1 - s.flags())
slack = budget.M + budget.beta * np.arange(201) - used
print("tightest slack:", slack.min(), "at k =", int(slack.argmin()))

# one long burst on an otherwise quiet run
sc: Scenario = bundled_scenario().with_changes(dos=DoSSchedule(((40, 60),), 600))
tr = run(sc)
print("u~ during the burst (agent 1):", np.unique(tr.utl[40:60, 0]))
print("y~ during the burst (agent 1):", np.unique(tr.ytl[40:61, 0]))
