"""Bethe ansatz equations for zero roots: system, continuation solver and seeds."""
