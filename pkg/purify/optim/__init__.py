"""Ensemble sampling, average cost, gradients and the gate search."""
