"""Closed-form thermodynamic-limit results, QPT scan and finite-size comparisons."""
