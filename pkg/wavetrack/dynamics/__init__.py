"""Vehicle, wave and relative-system models."""
