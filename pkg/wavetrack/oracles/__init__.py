"""Independent reference computations used by tests and self-check."""
