"""Command-line entry points for cylinder-verify."""
