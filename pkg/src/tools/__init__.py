"""Output writers for simulation data and run manifests."""
