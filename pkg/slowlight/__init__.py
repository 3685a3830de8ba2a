"""
SlowLight QFC

Simulation library for single-photon frequency conversion in a slow-light
four-level atomic medium: full Maxwell-Bloch dynamics, the adiabatic
coupled-wave model and its closed-form solution.
"""

__version__ = "0.1.0"
