"""Behavioral-weighting equilibrium solver for interdependent security games."""
