"""Ore operators: the non-commutative algebra behind relations.

An operator is sum(c_i * D^i) where D is either the derivation d/dx
(kind "diff", commutation D*a = a*D + a') or the shift S: n -> n+1
(kind "shift", commutation S*a(n) = a(n+1)*S).  Coefficients live in Q(x)
during computations; the canonical form clears them to polynomials with
overall content 1 and a positive sign on the leading coefficient, which is
the equality standard used throughout the package.

GCRD and LCLM are computed by the skew Euclidean algorithm with primitive
reduction after every remainder step to keep coefficient growth in check;
the LCLM comes from the cofactors of the extended remainder sequence.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (DivisionByZeroOperator, KindMismatch, NotEnoughData,
                     ZeroPolynomial)
from .poly import Poly, RatFun, rat_from_str

DIFF = "diff"
SHIFT = "shift"


def _as_ratfun(value):
    if isinstance(value, RatFun):
        return value
    if isinstance(value, Poly):
        return RatFun(value, Poly.one(), _reduced=True)
    return RatFun(Poly((Fraction(value),)), Poly.one(), _reduced=True)


class OreOperator:
    """sum(coeffs[i] * D^i) over Q(x), kind "diff" or "shift"."""

    __slots__ = ("kind", "variable", "coeffs")

    def __init__(self, kind, variable, coeffs):
        if kind not in (DIFF, SHIFT):
            raise ValueError(f"unknown operator kind {kind!r}")
        coeffs = [_as_ratfun(c) for c in coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "variable", variable)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("OreOperator is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, kind, variable):
        return cls(kind, variable, ())

    @classmethod
    def one(cls, kind, variable):
        return cls(kind, variable, (Poly.one(),))

    @classmethod
    def generator(cls, kind, variable):
        return cls(kind, variable, (Poly.zero(), Poly.one()))

    @classmethod
    def from_poly_lists(cls, kind, variable, lists):
        return cls(kind, variable, [Poly([Fraction(v) for v in item]) for item in lists])

    # -- queries -----------------------------------------------------------

    @property
    def order(self):
        """Order (degree in D); -1 for the zero operator."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def leading(self):
        if not self.coeffs:
            raise ZeroPolynomial("zero operator has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        if not isinstance(other, OreOperator):
            return NotImplemented
        return (self.kind == other.kind and self.variable == other.variable
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.kind, self.variable, self.coeffs))

    def __repr__(self):
        sym = "D" if self.kind == DIFF else "S"
        if self.is_zero():
            return f"OreOperator({self.kind}, 0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            cs = "(" + "+".join(f"{v}*{self.variable}^{k}" if k else f"{v}"
                                for k, v in enumerate(c.num.coeffs) if v) + ")"
            if not c.is_polynomial():
                cs += "/(...)"
            parts.append(cs if i == 0 else f"{cs}*{sym}^{i}")
        return f"OreOperator({self.kind}; " + " + ".join(parts) + ")"

    def _check_compatible(self, other):
        if self.kind != other.kind or self.variable != other.variable:
            raise KindMismatch(
                f"cannot combine {self.kind}({self.variable}) with "
                f"{other.kind}({other.variable})")

    # -- commutation -------------------------------------------------------

    def _sigma(self, r: RatFun, steps=1) -> RatFun:
        if self.kind == SHIFT:
            return r.shift_arg(steps)
        return r

    def _delta(self, r: RatFun) -> RatFun:
        if self.kind == DIFF:
            return r.derivative()
        return RatFun.zero()

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, OreOperator):
            return NotImplemented
        self._check_compatible(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return OreOperator(self.kind, self.variable, out)

    def __neg__(self):
        return OreOperator(self.kind, self.variable, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, OreOperator):
            return NotImplemented
        return self + (-other)

    def scaled(self, factor) -> "OreOperator":
        """Left multiplication by an element of Q(x)."""
        factor = _as_ratfun(factor)
        return OreOperator(self.kind, self.variable,
                           [factor * c for c in self.coeffs])

    def _d_times(self):
        """D * self, one application of the commutation rule."""
        out = [RatFun.zero()] * (len(self.coeffs) + 1)
        for j, c in enumerate(self.coeffs):
            out[j + 1] = out[j + 1] + self._sigma(c)
            d = self._delta(c)
            if not d.is_zero():
                out[j] = out[j] + d
        return OreOperator(self.kind, self.variable, out)

    def __mul__(self, other):
        if not isinstance(other, OreOperator):
            return NotImplemented
        self._check_compatible(other)
        if self.is_zero() or other.is_zero():
            return OreOperator.zero(self.kind, self.variable)
        result = OreOperator.zero(self.kind, self.variable)
        power = other
        for i, a in enumerate(self.coeffs):
            if i > 0:
                power = power._d_times()
            if not a.is_zero():
                result = result + power.scaled(a)
        return result

    def __pow__(self, n):
        result = OreOperator.one(self.kind, self.variable)
        for _ in range(n):
            result = result * self
        return result

    # -- canonical form ----------------------------------------------------

    def canonical(self) -> "OreOperator":
        """Primitive polynomial-coefficient form, positive leading sign.

        Clears denominators, removes the full polynomial gcd of the
        coefficients (content included) and fixes the sign of the leading
        coefficient's leading term.  Idempotent.
        """
        if self.is_zero():
            return self
        den = Poly.one()
        for c in self.coeffs:
            g = den.gcd(c.den)
            den = (den // g) * c.den
        polys = [c.num * (den // c.den) for c in self.coeffs]
        gcd = Poly.zero()
        for q in polys:
            if not q.is_zero():
                gcd = gcd.gcd(q) if not gcd.is_zero() else q.primitive()
            if gcd.degree == 0:
                break
        content = Fraction(0)
        import math
        for q in polys:
            if q.is_zero():
                continue
            c, _ = q.content_and_primitive()
            content = Fraction(math.gcd(content.numerator, c.numerator),
                               (content.denominator * c.denominator)
                               // math.gcd(content.denominator, c.denominator))
        divisor = gcd * content if gcd.degree > 0 else Poly((content,))
        polys = [q // divisor for q in polys]
        if polys[-1].leading() < 0:
            polys = [-q for q in polys]
        return OreOperator(self.kind, self.variable, polys)

    def polynomial_coeffs(self):
        """Coefficients of the canonical form, as Poly objects."""
        return [c.num for c in self.canonical().coeffs]

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "kind": self.kind,
            "variable": self.variable,
            "coefficients": [p.to_strings() for p in self.polynomial_coeffs()],
        }

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"], data["variable"],
                   [Poly.from_strings(item) for item in data["coefficients"]])

    def to_text(self):
        arrays = "; ".join("[" + ",".join(p.to_strings()) + "]"
                           for p in self.polynomial_coeffs())
        return f"kind={self.kind} var={self.variable}; [{arrays}]"

    @classmethod
    def from_text(cls, text):
        from .errors import ParseError
        import re
        m = re.match(r"^kind=(diff|shift)\s+var=(\w+);\s*\[(.*)\]$", text.strip())
        if not m:
            raise ParseError(f"malformed operator text: {text!r}")
        kind, var, body = m.groups()
        coeffs = []
        for chunk in re.findall(r"\[([^\[\]]*)\]", body):
            items = [s for s in chunk.split(",") if s.strip()]
            coeffs.append(Poly([rat_from_str(s.strip()) for s in items]))
        return cls(kind, var, coeffs)


def ore_mul(a: OreOperator, b: OreOperator) -> OreOperator:
    """Product in the Ore algebra; order adds."""
    return a * b


def right_divmod(a: OreOperator, b: OreOperator):
    """Q, R with a = Q*b + R and order(R) < order(b), exact over Q(x)."""
    a._check_compatible(b)
    if b.is_zero():
        raise DivisionByZeroOperator("right division by the zero operator")
    kind, var = a.kind, a.variable
    quot = OreOperator.zero(kind, var)
    rem = a
    lead_b = b.leading()
    while not rem.is_zero() and rem.order >= b.order:
        k = rem.order - b.order
        c = rem.leading() / b._sigma(lead_b, k)
        mono = OreOperator(kind, var, [RatFun.zero()] * k + [c])
        quot = quot + mono
        rem = rem - mono * b
        if not rem.is_zero() and rem.order >= b.order + k:
            raise AssertionError("right division failed to reduce the order")
    return quot, rem


def right_divides(b: OreOperator, a: OreOperator) -> bool:
    """True when b right-divides a (remainder zero)."""
    if a.is_zero():
        return True
    return right_divmod(a, b)[1].is_zero()


def gcrd(a: OreOperator, b: OreOperator) -> OreOperator:
    """Greatest common right divisor, canonical form.

    Its solution space is the intersection of the two solution spaces.
    """
    a._check_compatible(b)
    if a.is_zero() and b.is_zero():
        raise ZeroPolynomial("gcrd of two zero operators")
    x, y = a.canonical() if a else a, b.canonical() if b else b
    while not y.is_zero():
        _, r = right_divmod(x, y)
        x, y = y, r.canonical() if not r.is_zero() else r
    return x.canonical()


def lclm(a: OreOperator, b: OreOperator) -> OreOperator:
    """Least common left multiple, canonical form.

    Computed from the cofactors of the extended Euclidean scheme: tracking
    r_i = u_i*a + v_i*b, the first vanishing remainder gives
    u*a = -v*b = LCLM(a, b).  Its solution space is the sum of the two
    solution spaces; order <= order(a) + order(b).
    """
    a._check_compatible(b)
    if a.is_zero() or b.is_zero():
        raise ZeroPolynomial("lclm needs two nonzero operators")
    kind, var = a.kind, a.variable
    one = OreOperator.one(kind, var)
    zero = OreOperator.zero(kind, var)
    r0, r1 = a.canonical(), b.canonical()
    u0, u1 = one, zero
    while not r1.is_zero():
        q, r2 = right_divmod(r0, r1)
        u2 = u0 - q * u1
        if not r2.is_zero():
            # primitive reduction: scale the remainder row consistently
            canon = r2.canonical()
            scale = _scaling_factor(r2, canon)
            r2 = canon
            u2 = u2.scaled(scale)
        r0, r1 = r1, r2
        u0, u1 = u1, u2
    return (u1 * a).canonical()


def _scaling_factor(before: OreOperator, after: OreOperator) -> RatFun:
    """lambda with after = lambda * before (compare leading coefficients)."""
    return after.leading() / before.leading()


def apply_operator(op: OreOperator, data):
    """Act on a term list (shift kind) or truncated series (diff kind).

    For kind "shift" and data u_0..u_{M-1} the result is the list
    j -> sum_i c_i(j) u_{j+i}, j = 0..M-1-order.  For kind "diff" and series
    coefficients the result is the truncation of sum_i p_i(x) f^(i)(x) to
    M - order coefficients.  Raises NotEnoughData when nothing of positive
    length can be produced.
    """
    data = [Fraction(v) for v in data]
    if op.is_zero():
        return [Fraction(0)] * len(data)
    can = op.canonical()
    polys = [c.num for c in can.coeffs]
    s = can.order
    out_len = len(data) - s
    if out_len <= 0:
        raise NotEnoughData(
            f"need more than {s} values to apply an order-{s} operator")
    if op.kind == SHIFT:
        out = []
        for j in range(out_len):
            acc = Fraction(0)
            for i, c in enumerate(polys):
                if not c.is_zero():
                    acc += c(Fraction(j)) * data[j + i]
            out.append(acc)
        return out
    # differential: accumulate p_i(x) * f^(i)(x) truncated
    out = [Fraction(0)] * out_len
    deriv = data
    for i, c in enumerate(polys):
        if i > 0:
            deriv = [k * deriv[k] for k in range(1, len(deriv))]
        if c.is_zero():
            continue
        for a, ca in enumerate(c.coeffs):
            if not ca:
                continue
            for m in range(min(out_len - a, len(deriv))):
                out[a + m] += ca * deriv[m]
    return out
