"""Configuration, errors, scenario schema and violation records."""
