"""Command-line application for the parametric wave lab."""
