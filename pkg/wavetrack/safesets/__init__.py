"""Occupancy maps, tracking error bounds and planner constraint sets."""
