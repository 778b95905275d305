"""Recurrence entanglement purification: simulation and bilateral gate optimization."""

__version__ = "0.1.0"
