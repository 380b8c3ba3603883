"""Finite polar-space toolkit.

Builds the Hermitian surface H(3,q^2) and the elliptic quadric Q^-(5,q)
for odd primes q, the Klein correspondence between them, the five-class
association schemes on both sides, U-set configurations, and a
feasibility search for pseudo-ovals through a fixed line.
"""

__version__ = "0.1.0"
