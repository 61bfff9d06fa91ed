"""Discrete-time lattice planning over time-indexed constraints."""
