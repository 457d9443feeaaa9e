"""Resilient leader-following consensus for unknown nonlinear multi-agent systems.

A twin layer of virtual followers runs distributed model-free adaptive control
and rides out DoS attacks by holding its inputs; each physical follower then
tracks its twin one step ahead while estimating and cancelling the increments
of an actuation attack.
"""
from .analysis import (BoundReport, ConditionReport, bound_report, check_conditions,
                       compute_b, compute_bt, estimate_rates, format_report, measure_uub)
from .attacks import (AASignal, DoSBudget, DoSSchedule, aa_value, dos_flag, generate_schedule,
                      validate_budget, validate_variation)
from .engine import DivergenceError, Scenario, SimTrace, export_csv, read_csv, run
from .expr import Expression, evaluate, fmt, parse
from .plant import AgentModel, LeaderModel, audit_ppd_bound, follower_step, leader_output
from .scenario import load_scenario, bundled_scenario
from .topology import CommGraph, is_connected_with_leader_access, laplacian, max_row_gain
from .twin_layer import MfacGains

__version__ = "0.1.0"
