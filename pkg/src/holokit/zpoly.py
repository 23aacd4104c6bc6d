"""Vectorized polynomial arithmetic over F_p (internal).

Polynomials are little-endian int64 numpy arrays of residues in ``[0, p)``
with no trailing zeros; the zero polynomial is the empty array.  Primes used
here must stay below 2^25 so that a convolution block of up to 2048 products
fits in a signed 64-bit accumulator.

This layer backs the modular closure/conversion paths: Gaussian elimination
over F_p(x) done by evaluation at many points plus Cauchy interpolation, and
plain F_p(x) fraction arithmetic (:class:`ZpRatFun`).
"""

from __future__ import annotations

import numpy as np

_CONV_BLOCK = 2048

ZERO = np.zeros(0, dtype=np.int64)


def trim(a):
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return a[:n]


def from_ints(values, p):
    return trim(np.array([v % p for v in values], dtype=np.int64))


def zadd(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] = (out[: len(b)] + b) % p
    return trim(out)


def zsub(a, b, p):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.int64)
    out[: len(a)] = a
    out[: len(b)] = (out[: len(b)] - b) % p
    return trim(out)


def zmul(a, b, p):
    if len(a) == 0 or len(b) == 0:
        return ZERO
    if len(b) > len(a):
        a, b = b, a
    if len(b) <= _CONV_BLOCK:
        return trim(np.convolve(a, b) % p)
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for start in range(0, len(b), _CONV_BLOCK):
        block = b[start: start + _CONV_BLOCK]
        out[start: start + len(a) + len(block) - 1] = (
            out[start: start + len(a) + len(block) - 1] + np.convolve(a, block) % p) % p
    return trim(out)


def zmul_scalar(a, c, p):
    c %= p
    if c == 0 or len(a) == 0:
        return ZERO
    return a * c % p


def zdivmod(a, b, p):
    if len(b) == 0:
        raise ZeroDivisionError("polynomial division by zero mod p")
    if len(a) < len(b):
        return ZERO, a
    rem = a.copy()
    db = len(b) - 1
    inv = pow(int(b[-1]), -1, p)
    quot = np.zeros(len(a) - db, dtype=np.int64)
    for i in range(len(a) - 1 - db, -1, -1):
        c = rem[i + db]
        if c:
            f = c * inv % p
            quot[i] = f
            rem[i: i + db + 1] = (rem[i: i + db + 1] - f * b) % p
    return trim(quot), trim(rem[:db])


def zgcd(a, b, p):
    while len(b):
        a, b = b, zdivmod(a, b, p)[1]
    if len(a):
        a = a * pow(int(a[-1]), -1, p) % p
    return a


def zmonic(a, p):
    if len(a) == 0:
        return a
    return a * pow(int(a[-1]), -1, p) % p


def zderiv(a, p):
    if len(a) <= 1:
        return ZERO
    return trim(a[1:] * np.arange(1, len(a), dtype=np.int64) % p)


def zeval_many(a, xs, p):
    """Evaluate at every point of xs (int64 array) by Horner."""
    acc = np.zeros(len(xs), dtype=np.int64)
    for c in a[::-1]:
        acc = (acc * xs + c) % p
    return acc


def znewton_interp(xs, ys, p):
    """Interpolating polynomial (deg < len(xs)) through (xs[i], ys[i]) mod p."""
    n = len(xs)
    dd = ys.astype(np.int64) % p
    for j in range(1, n):
        diff = (xs[j:] - xs[: n - j]) % p
        inv = _inv_many(diff, p)
        dd[j:] = (dd[j:] - dd[j - 1: n - 1]) % p * inv % p
    # Horner on the Newton form: poly <- poly*(x - xs[i]) + dd[i]
    poly = np.zeros(n, dtype=np.int64)
    poly[0] = dd[n - 1] % p
    deg = 0
    for i in range(n - 2, -1, -1):
        seg = poly[: deg + 1].copy()
        poly[1: deg + 2] = seg
        poly[0] = 0
        poly[: deg + 1] = (poly[: deg + 1] - xs[i] * seg) % p
        poly[0] = (poly[0] + dd[i]) % p
        deg += 1
    return trim(poly)


def _inv_many(values, p):
    """Batched modular inverse (Montgomery trick)."""
    values = values % p
    n = len(values)
    prefix = np.ones(n + 1, dtype=object)
    for i in range(n):
        prefix[i + 1] = prefix[i] * int(values[i]) % p
    inv_all = pow(int(prefix[n]), -1, p)
    out = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[i] = prefix[i] * inv_all % p
        inv_all = inv_all * int(values[i]) % p
    return out


def zeea_ratrecon(modpoly, f, p, num_bound):
    """Rational function reconstruction: find (n, d) with n = d*f mod modpoly.

    Stops the extended Euclidean algorithm at the first remainder of degree
    <= num_bound; returns (num, den) with den monic, or None if the
    denominator fails an invertibility check.
    """
    r0, r1 = modpoly, f
    t0, t1 = ZERO, np.ones(1, dtype=np.int64)
    while len(r1) - 1 > num_bound:
        q, r = zdivmod(r0, r1, p)
        r0, r1 = r1, r
        t0, t1 = t1, zsub(t0, zmul(q, t1, p), p)
    if len(t1) == 0:
        return None
    g = zgcd(r1, t1, p)
    if len(g) > 1:
        r1 = zdivmod(r1, g, p)[0]
        t1 = zdivmod(t1, g, p)[0]
    inv = pow(int(t1[-1]), -1, p)
    return r1 * inv % p, t1 * inv % p


class ZpRatFun:
    """Reduced fraction of F_p[x] polynomials; denominator monic."""

    __slots__ = ("num", "den", "p")

    def __init__(self, num, den, p, reduced=False):
        if len(den) == 0:
            raise ZeroDivisionError("zero denominator mod p")
        if not reduced and len(num) and len(den) > 1:
            g = zgcd(num, den, p)
            if len(g) > 1:
                num = zdivmod(num, g, p)[0]
                den = zdivmod(den, g, p)[0]
        if len(num) == 0:
            den = np.ones(1, dtype=np.int64)
        elif den[-1] != 1:
            inv = pow(int(den[-1]), -1, p)
            num = num * inv % p
            den = den * inv % p
        self.num = num
        self.den = den
        self.p = p

    @classmethod
    def from_poly(cls, num, p):
        return cls(trim(np.asarray(num, dtype=np.int64) % p), np.ones(1, dtype=np.int64), p, reduced=True)

    @classmethod
    def const(cls, c, p):
        return cls.from_poly(np.array([c % p], dtype=np.int64), p)

    def is_zero(self):
        return len(self.num) == 0

    def __add__(self, other):
        p = self.p
        if np.array_equal(self.den, other.den):
            return ZpRatFun(zadd(self.num, other.num, p), self.den.copy(), p)
        num = zadd(zmul(self.num, other.den, p), zmul(other.num, self.den, p), p)
        return ZpRatFun(num, zmul(self.den, other.den, p), p)

    def __sub__(self, other):
        p = self.p
        if np.array_equal(self.den, other.den):
            return ZpRatFun(zsub(self.num, other.num, p), self.den.copy(), p)
        num = zsub(zmul(self.num, other.den, p), zmul(other.num, self.den, p), p)
        return ZpRatFun(num, zmul(self.den, other.den, p), p)

    def __mul__(self, other):
        p = self.p
        if self.is_zero() or other.is_zero():
            return ZpRatFun.from_poly(ZERO, p)
        g1 = zgcd(self.num, other.den, p)
        g2 = zgcd(other.num, self.den, p)
        n1 = zdivmod(self.num, g1, p)[0] if len(g1) > 1 else self.num
        d2 = zdivmod(other.den, g1, p)[0] if len(g1) > 1 else other.den
        n2 = zdivmod(other.num, g2, p)[0] if len(g2) > 1 else other.num
        d1 = zdivmod(self.den, g2, p)[0] if len(g2) > 1 else self.den
        return ZpRatFun(zmul(n1, n2, p), zmul(d1, d2, p), p, reduced=True)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero mod p")
        return ZpRatFun(self.den, self.num, self.p)

    def __truediv__(self, other):
        return self * other.inverse()

    def derivative(self):
        p = self.p
        if len(self.den) == 1:
            return ZpRatFun(zderiv(self.num, p), self.den.copy(), p, reduced=True)
        num = zsub(zmul(zderiv(self.num, p), self.den, p),
                   zmul(self.num, zderiv(self.den, p), p), p)
        return ZpRatFun(num, zmul(self.den, self.den, p), p)

    def eval_many(self, xs):
        """(numerator values, denominator values) over a point array."""
        return zeval_many(self.num, xs, self.p), zeval_many(self.den, xs, self.p)

    def max_degree(self):
        return max(len(self.num) - 1, len(self.den) - 1)
