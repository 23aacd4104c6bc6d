"""Exact arithmetic for P-recursive sequences and D-finite power series.

The package provides, in layers:

* exact rationals/polynomials/rational functions and the modular plumbing
  (CRT, rational reconstruction) under :mod:`holokit.poly` and
  :mod:`holokit.modular`;
* the non-commutative operator algebra (differential and shift Ore
  operators, GCRD/LCLM) under :mod:`holokit.ore`;
* recurrence <-> ODE <-> algebraic-equation conversions under
  :mod:`holokit.convert`;
* closure properties (sums, products, rescaling) under
  :mod:`holokit.closure`;
* the guessing engine under :mod:`holokit.guess`;
* sequence/series materialization including binary-splitting evaluation
  under :mod:`holokit.evaluate`;
* end-to-end worked case studies under :mod:`holokit.casestudy`;
* a command-line front end under :mod:`holokit.cli`.
"""

from .poly import Poly, RatFun, integer_roots, rat_from_str, rat_to_str
from .modular import PrimeSet, crt_combine, rational_reconstruct

__all__ = [
    "Poly", "RatFun", "integer_roots", "rat_from_str", "rat_to_str",
    "PrimeSet", "crt_combine", "rational_reconstruct",
]

__version__ = "0.1.0"
