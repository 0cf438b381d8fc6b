"""Single-excitation simulations of topological superconducting-qubit chains."""

__version__ = "0.1.0"
