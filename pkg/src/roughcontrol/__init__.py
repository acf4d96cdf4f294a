"""Signature-based stochastic optimal control toolkit.

Truncated tensor algebra, path signatures of fractional Brownian drivers,
signature-feedback policies, adjoint gradient training, semi-analytic
benchmark values and a quadratic linearization solver, with a CLI front end.
"""

__version__ = "0.1.0"
