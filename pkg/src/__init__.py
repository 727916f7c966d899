"""Parametric Wave Lab - simulation and analysis of sum- and difference-frequency parametric amplification."""

__version__ = "0.1.0"
