"""Helper utilities for logging and observability."""
