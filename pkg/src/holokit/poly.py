"""Exact dense univariate polynomials and rational functions.

A :class:`Poly` is a dense coefficient list, index = degree, either over the
rationals (coefficients are ``fractions.Fraction``) or over a prime field
(coefficients are ints in ``[0, p)`` with ``modulus=p``).  The zero polynomial
is the empty coefficient tuple; trailing zeros are never stored, so equality
of values is equality of representations.

:class:`RatFun` is a reduced fraction of two rational polynomials with monic
denominator; it is the coefficient field Q(x) used transiently inside the
operator algebra and closure algorithms.

Rationals serialize as ``p/q`` (or ``p`` when q = 1), base 10, no whitespace;
polynomials serialize as ordered arrays of such strings.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import ParseError, ZeroPolynomial

_RAT_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def rat_from_str(text: str) -> Fraction:
    """Parse ``p/q`` or ``p`` (base 10, no whitespace) into a Fraction."""
    if not isinstance(text, str) or not _RAT_RE.match(text):
        raise ParseError(f"not a rational: {text!r}")
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def rat_to_str(value) -> str:
    """Serialize a rational as ``p/q``, or ``p`` when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _as_coeff(value, modulus):
    if modulus is None:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise TypeError(f"rational coefficient expected, got {type(value).__name__}")
    return int(value) % modulus


class Poly:
    """Dense univariate polynomial over Q (default) or over F_p."""

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs=(), modulus=None):
        norm = [_as_coeff(c, modulus) for c in coeffs]
        while norm and not norm[-1]:
            norm.pop()
        object.__setattr__(self, "coeffs", tuple(norm))
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, modulus=None):
        return cls((), modulus)

    @classmethod
    def one(cls, modulus=None):
        return cls((1,), modulus)

    @classmethod
    def x(cls, modulus=None):
        return cls((0, 1), modulus)

    @classmethod
    def const(cls, value, modulus=None):
        return cls((value,), modulus)

    @classmethod
    def from_roots_int(cls, roots):
        """Product of (x - r) over the given integer roots."""
        result = cls.one()
        for r in roots:
            result = result * cls((-r, 1))
        return result

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self):
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def leading(self):
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs and self.modulus == other.modulus
        if isinstance(other, (int, Fraction)):
            return self == Poly((other,), self.modulus)
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.modulus))

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*x^{k}" if k else f"{c}")
        return "Poly(" + " + ".join(terms) + (f" mod {self.modulus})" if self.modulus else ")")

    def _check_ring(self, other):
        if self.modulus != other.modulus:
            raise TypeError("polynomials over different coefficient rings")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly((other,), self.modulus)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_ring(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.modulus)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly((other,), self.modulus)
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly.zero(self.modulus)
            return Poly([c * other for c in self.coeffs], self.modulus)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_ring(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(self.modulus)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Poly(out, self.modulus)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.modulus)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _inv_coeff(self, c):
        if self.modulus is None:
            return Fraction(1) / c
        return pow(c, -1, self.modulus)

    def __divmod__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly((other,), self.modulus)
        self._check_ring(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        inv_lead = self._inv_coeff(other.leading())
        quot = [0] * max(len(rem) - db, 0)
        mod = self.modulus
        for i in range(len(rem) - 1 - db, -1, -1):
            c = rem[i + db]
            if not c:
                continue
            factor = c * inv_lead if mod is None else (c * inv_lead) % mod
            quot[i] = factor
            for j, bc in enumerate(other.coeffs):
                rem[i + j] -= factor * bc
            if mod is not None:
                for j in range(i, i + db + 1):
                    rem[j] %= mod
        return Poly(quot, mod), Poly(rem[:db] if db > 0 else [], mod)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other) -> bool:
        return (other % self).is_zero()

    # -- calculus / composition -------------------------------------------

    def derivative(self):
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.modulus)

    def shift_arg(self, a):
        """p(x + a) by synthetic Taylor shift."""
        out = Poly.zero(self.modulus)
        for c in reversed(self.coeffs):
            out = out * Poly((a, 1), self.modulus) + c
        return out

    def scale_arg(self, c):
        """p(c * x)."""
        scaled = []
        power = Fraction(1) if self.modulus is None else 1
        for coeff in self.coeffs:
            scaled.append(coeff * power)
            power = power * c
        return Poly(scaled, self.modulus)

    def __call__(self, point):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * point + c
            if self.modulus is not None:
                acc %= self.modulus
        if self.modulus is None and not isinstance(point, Fraction):
            return acc
        return acc

    # -- normal forms ------------------------------------------------------

    def monic(self):
        if self.is_zero():
            return self
        inv = self._inv_coeff(self.leading())
        return self * inv if self.modulus is None else Poly(
            [(c * inv) % self.modulus for c in self.coeffs], self.modulus)

    def content_and_primitive(self):
        """Write self = c * P with P a primitive integer polynomial.

        P has coprime integer coefficients and positive leading coefficient;
        c is a Fraction (0 for the zero polynomial).  Rational field only.
        """
        if self.modulus is not None:
            raise TypeError("content is defined over the rationals only")
        if self.is_zero():
            return Fraction(0), self
        den_lcm = 1
        for c in self.coeffs:
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
        ints = [int(c * den_lcm) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if ints[-1] < 0:
            g = -g
        content = Fraction(g, den_lcm)
        return content, Poly([v // g for v in ints])

    def primitive(self):
        return self.content_and_primitive()[1]

    def gcd(self, other):
        """Polynomial gcd; primitive positive-leading over Q, monic over F_p."""
        if isinstance(other, (int, Fraction)):
            other = Poly((other,), self.modulus)
        self._check_ring(other)
        if self.modulus is not None:
            a, b = self, other
            while not b.is_zero():
                a, b = b, a % b
            return a.monic()
        return _gcd_primitive_q(self, other)

    def reduce_mod(self, p: int) -> "Poly":
        """Image in F_p[x]; fails if a coefficient denominator vanishes mod p."""
        if self.modulus is not None:
            raise TypeError("already over a prime field")
        out = []
        for c in self.coeffs:
            if c.denominator % p == 0:
                raise ZeroDivisionError(f"denominator of {c} vanishes mod {p}")
            out.append(c.numerator * pow(c.denominator, -1, p) % p)
        return Poly(out, p)

    # -- serialization -----------------------------------------------------

    def to_strings(self):
        if self.modulus is not None:
            return [str(c) for c in self.coeffs]
        return [rat_to_str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items, modulus=None):
        if modulus is not None:
            return cls([int(s) for s in items], modulus)
        return cls([rat_from_str(s) for s in items])


def _gcd_primitive_q(f: Poly, g: Poly) -> Poly:
    """Gcd over Q via a primitive pseudo-remainder sequence on integer parts."""
    if f.is_zero():
        return g.primitive() if not g.is_zero() else g
    if g.is_zero():
        return f.primitive()
    a = f.primitive()
    b = g.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        # pseudo-remainder: lc(b)^(deg a - deg b + 1) * a  reduced by b
        delta = a.degree - b.degree + 1
        scaled = a * (b.leading() ** delta)
        _, rem = divmod(scaled, b)
        a, b = b, rem.primitive() if not rem.is_zero() else rem
    return a.primitive()


class RatFun:
    """Reduced rational function num/den over Q with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _reduced=False):
        if not isinstance(num, Poly):
            num = Poly((Fraction(num),)) if not isinstance(num, (tuple, list)) else Poly(num)
        if den is None:
            den = Poly.one()
        elif not isinstance(den, Poly):
            den = Poly((Fraction(den),)) if not isinstance(den, (tuple, list)) else Poly(den)
        if num.modulus is not None or den.modulus is not None:
            raise TypeError("RatFun is defined over the rationals")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced and not num.is_zero() and den.degree > 0:
            g = num.gcd(den)
            if g.degree > 0:
                num = num // g
                den = den // g
        if num.is_zero():
            den = Poly.one()
        elif not (den.degree == 0 and den.coeffs[0] == 1):
            lead = den.leading()
            if lead != 1:
                inv = Fraction(1) / lead
                num = num * inv
                den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    @classmethod
    def zero(cls):
        return cls(Poly.zero(), Poly.one(), _reduced=True)

    @classmethod
    def one(cls):
        return cls(Poly.one(), Poly.one(), _reduced=True)

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.degree == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RatFun(other if isinstance(other, Poly) else Poly((Fraction(other),)))
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.is_polynomial():
            return f"RatFun({self.num!r})"
        return f"RatFun({self.num!r}, {self.den!r})"

    @staticmethod
    def _coerce(value):
        if isinstance(value, RatFun):
            return value
        if isinstance(value, Poly):
            return RatFun(value, Poly.one(), _reduced=True)
        if isinstance(value, (int, Fraction)):
            return RatFun(Poly((Fraction(value),)), Poly.one(), _reduced=True)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RatFun.zero()
        if self.is_polynomial() and other.is_polynomial():
            return RatFun(self.num * other.num, Poly.one(), _reduced=True)
        # cross-reduce before multiplying to keep degrees down
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1 = self.num // g1 if g1.degree > 0 else self.num
        d2 = other.den // g1 if g1.degree > 0 else other.den
        n2 = other.num // g2 if g2.degree > 0 else other.num
        d1 = self.den // g2 if g2.degree > 0 else self.den
        return RatFun(n1 * n2, d1 * d2, _reduced=True)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def derivative(self):
        if self.is_polynomial():
            return RatFun(self.num.derivative(), Poly.one(), _reduced=True)
        n, d = self.num, self.den
        return RatFun(n.derivative() * d - n * d.derivative(), d * d)

    def shift_arg(self, a):
        """f(x + a)."""
        return RatFun(self.num.shift_arg(a), self.den.shift_arg(a))

    def __call__(self, point):
        den = self.den(point)
        if den == 0:
            raise ZeroDivisionError(f"pole at {point}")
        return Fraction(self.num(point)) / den


def integer_roots(p: Poly):
    """All integer roots of a nonzero rational polynomial, ascending.

    Candidates are read off the primitive integer part: an integer root must
    divide the trailing nonzero coefficient.  Candidates are sieved modulo two
    word primes before exact evaluation.
    """
    if not isinstance(p, Poly) or p.modulus is not None:
        raise TypeError("integer_roots expects a polynomial over Q")
    if p.is_zero():
        raise ZeroPolynomial("integer_roots of the zero polynomial")
    prim = p.primitive()
    coeffs = [int(c) for c in prim.coeffs]
    roots = []
    # strip powers of x: root 0
    low = 0
    while coeffs[low] == 0:
        low += 1
    if low > 0:
        roots.append(0)
    coeffs = coeffs[low:]
    if len(coeffs) <= 1:
        return sorted(roots)
    trailing = abs(coeffs[0])
    divisors = _divisors(trailing)
    sieve_primes = (2147483629, 2147483563)
    reduced = [[c % q for c in coeffs] for q in sieve_primes]
    for d in divisors:
        for cand in (d, -d):
            ok = True
            for q, cs in zip(sieve_primes, reduced):
                acc = 0
                point = cand % q
                for c in reversed(cs):
                    acc = (acc * point + c) % q
                if acc != 0:
                    ok = False
                    break
            if ok and _eval_int(coeffs, cand) == 0:
                roots.append(cand)
    return sorted(set(roots))


def _eval_int(coeffs, point):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * point + c
    return acc


def _divisors(n: int):
    """All positive divisors of n (n >= 1), via factorization."""
    factors = _factorize(n)
    divs = [1]
    for prime, exp in factors.items():
        divs = [d * prime**e for d in divs for e in range(exp + 1)]
    return sorted(divs)


def _factorize(n: int):
    factors = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    f = 17
    while f * f <= n and f < 1 << 20:
        while n % f == 0:
            factors[f] = factors.get(f, 0) + 1
            n //= f
        f += 2
    if n > 1:
        for q in _pollard_factor(n):
            factors[q] = factors.get(q, 0) + 1
    return factors


def _pollard_factor(n: int):
    """Full factorization of n (odd, no factor < 2^20) by Pollard rho."""
    if n == 1:
        return []
    if _is_prime(n):
        return [n]
    d = n
    seed = 1
    while d == n:
        seed += 1
        d = _pollard_rho(n, seed)
    return sorted(_pollard_factor(d) + _pollard_factor(n // d))


def _pollard_rho(n: int, seed: int) -> int:
    x = y = 2
    d = 1
    while d == 1:
        x = (x * x + seed) % n
        y = (y * y + seed) % n
        y = (y * y + seed) % n
        d = math.gcd(abs(x - y), n)
    return d


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
