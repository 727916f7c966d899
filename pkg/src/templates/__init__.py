"""Report templates for the parametric wave lab."""
