"""Figure presets and run report generators."""
