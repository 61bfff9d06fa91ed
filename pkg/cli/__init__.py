"""Command-line interface for wavetrack."""
