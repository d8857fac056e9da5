"""Deterministic swarm launch-zone congestion simulator and experiment
harness: launch-zone capacity analysis, wave-structured mission plans,
discrete-time trials with blockage metrics, and the statistics used to
compare configurations."""

__version__ = "0.1.0"
