"""Coefficient-field adapters: exact Q(x) and modular F_p(x).

The conversion and closure algorithms are written once against this tiny
protocol and instantiated either with exact rational functions (small
inputs) or with per-prime images (large inputs, later CRT-lifted).  Only
the operations the algorithms actually use are exposed.
"""

from __future__ import annotations

import numpy as np

from . import zpoly
from .modular import reduce_fraction_mod
from .poly import Poly, RatFun


class QxField:
    """Exact rational functions over Q."""

    name = "Q(x)"

    @staticmethod
    def zero():
        return RatFun.zero()

    @staticmethod
    def one():
        return RatFun.one()

    @staticmethod
    def from_poly(p: Poly):
        return RatFun(p, Poly.one(), _reduced=True)

    @staticmethod
    def from_int(v: int):
        return RatFun(Poly.const(v))

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    @staticmethod
    def deriv(a):
        return a.derivative()


class ZpxField:
    """Rational functions over F_p, numpy-backed."""

    def __init__(self, p: int):
        self.p = p
        self.name = f"F_{p}(x)"

    def zero(self):
        return zpoly.ZpRatFun.from_poly(zpoly.ZERO, self.p)

    def one(self):
        return zpoly.ZpRatFun.const(1, self.p)

    def from_poly(self, p: Poly):
        vals = [reduce_fraction_mod(c, self.p) for c in p.coeffs]
        return zpoly.ZpRatFun.from_poly(np.array(vals, dtype=np.int64), self.p)

    def from_int(self, v: int):
        return zpoly.ZpRatFun.const(v, self.p)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    def neg(self, a):
        return self.zero() - a

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    @staticmethod
    def deriv(a):
        return a.derivative()
