"""Discrete-time agent simulation: launch, planning, surveil, battery, RTL."""

from congestsim.sim.battery import Battery, drain_battery, sample_battery_capacity
from congestsim.sim.blocks import BlockTracker, RawBlockEvent, update_block_state
from congestsim.sim.planner import AgentSnapshot, plan_path
from congestsim.sim.trial import LogEvent, SimParams, TrialLog, run_trial

__all__ = [
    "AgentSnapshot",
    "Battery",
    "BlockTracker",
    "LogEvent",
    "RawBlockEvent",
    "SimParams",
    "TrialLog",
    "drain_battery",
    "plan_path",
    "run_trial",
    "sample_battery_capacity",
    "update_block_state",
]
