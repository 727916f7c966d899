"""Physical models, closed forms and simulators."""
