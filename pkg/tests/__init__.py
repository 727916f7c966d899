"""Tests for the parametric wave lab."""
