"""Exact verification of E8 anomaly cancellation formulas for spin^c manifolds.

The package builds elliptic-genus integrands as truncated q-series over a
graded ring of characteristic classes, matches them against bases of
modular forms, and checks the resulting characteristic-form identities at
random rational geometries.
"""

__version__ = "0.1.0"
