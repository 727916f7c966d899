"""Parameter sweeps over pump frequency, couplings and antenna position."""
