"""Multi-energy benchmark workbench.

A deterministic quasi-static simulator of a coupled low-voltage feeder and
district-heating branch with a power-to-heat facility, plus the experiment
toolchain around it: factor/recipe exchange formats, OAT and Saltelli/Sobol
experiment designs, variance-based sensitivity indices with bootstrap
confidence intervals, and polynomial response-surface meta-models.
"""

__version__ = "0.1.0"
