"""Numerical laboratory for large sieve inequalities with power moduli
over the Gaussian integers: exact Z[i] arithmetic, lattice Poisson
summation, spacing counts, differenced exponential sums, and a sweep
harness comparing the proved and conjectured bound shapes.
"""

__version__ = "0.1.0"
