"""
Numerical workbench for the integrable antiperiodic J1-J2 spin chain.
"""

__version__ = "1.0.0"
