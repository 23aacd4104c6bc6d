"""Relation types: recurrences, linear ODEs, algebraic equations.

A :class:`Recurrence` is sum(c_i(n) * u(n+i), i=0..r) = q(n) for all n >= 0,
with polynomial c_i and polynomial (optional) right-hand side q, plus enough
initial terms to pin the sequence past every zero of the leading coefficient.
A :class:`DiffEquation` is the differential analogue on power series
coefficients.  An :class:`AlgebraicEquation` is a bivariate P(x, y) together
with a seed value y(0) selecting one power-series branch.

All three are immutable value objects with a shared JSON schema
({kind, variable, coefficients, initial, inhomogeneous}).  The canonical
form used for equality in tests clears coefficients to integers with overall
content 1 and a positive leading sign; common polynomial factors are kept,
since dividing them out would change where the relation is claimed to hold.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import (InconsistentTerms, MissingInitialTerms, ParseError,
                     SingularSeed, ZeroPolynomial)
from .ore import DIFF, SHIFT, OreOperator
from .poly import Poly, integer_roots, rat_from_str, rat_to_str


def _as_poly(value) -> Poly:
    if isinstance(value, Poly):
        if value.modulus is not None:
            raise TypeError("relations take polynomials over Q")
        return value
    if isinstance(value, (list, tuple)):
        return Poly([Fraction(v) for v in value])
    return Poly((Fraction(value),))


def _as_terms(values):
    return tuple(Fraction(v) for v in values)


def _vector_canonical(polys, sign_index=None):
    """Scale polynomials jointly: integer coefficients, content 1, positive
    leading coefficient at ``sign_index`` (default: last nonzero entry)."""
    content = Fraction(0)
    for q in polys:
        if q.is_zero():
            continue
        c, _ = q.content_and_primitive()
        content = Fraction(math.gcd(content.numerator, c.numerator),
                           (content.denominator * c.denominator)
                           // math.gcd(content.denominator, c.denominator))
    if content == 0:
        return list(polys)
    inv = 1 / content
    scaled = [q * inv for q in polys]
    anchor = scaled[sign_index] if sign_index is not None else None
    if anchor is None or anchor.is_zero():
        anchor = next((q for q in reversed(scaled) if not q.is_zero()), None)
    if anchor is not None and anchor.leading() < 0:
        scaled = [-q for q in scaled]
    return scaled


class _RelationBase:
    """Shared plumbing for Recurrence and DiffEquation."""

    __slots__ = ("coeffs", "initial", "inhomogeneous", "variable")

    _kind_tag = None
    _ore_kind = None

    def __init__(self, coeffs, initial=(), inhomogeneous=None, variable=None):
        polys = [_as_poly(c) for c in coeffs]
        while polys and polys[-1].is_zero():
            polys.pop()
        if not polys:
            raise ZeroPolynomial(f"{type(self).__name__} needs a nonzero relation")
        object.__setattr__(self, "coeffs", tuple(polys))
        object.__setattr__(self, "initial", _as_terms(initial))
        inh = _as_poly(inhomogeneous) if inhomogeneous is not None else Poly.zero()
        object.__setattr__(self, "inhomogeneous", inh)
        object.__setattr__(self, "variable", variable or self._default_variable)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Poly:
        return self.coeffs[-1]

    def is_homogeneous(self):
        return self.inhomogeneous.is_zero()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.coeffs == other.coeffs and self.initial == other.initial
                and self.inhomogeneous == other.inhomogeneous
                and self.variable == other.variable)

    def __hash__(self):
        return hash((type(self).__name__, self.coeffs, self.initial,
                     self.inhomogeneous, self.variable))

    def __repr__(self):
        from .textform import format_relation
        return f"{type(self).__name__}[{format_relation(self, 'pretty')}]"

    # -- normal form -------------------------------------------------------

    def canonical(self):
        polys = _vector_canonical(list(self.coeffs) + [self.inhomogeneous],
                                  sign_index=len(self.coeffs) - 1)
        return type(self)(polys[:-1], self.initial, polys[-1], self.variable)

    def same_relation(self, other) -> bool:
        """Equality of the defining equation in canonical form
        (initial data not compared)."""
        a, b = self.canonical(), other.canonical()
        return a.coeffs == b.coeffs and a.inhomogeneous == b.inhomogeneous

    def same_operator(self, other) -> bool:
        """Solution-level equality for homogeneous relations: the canonical
        Ore forms agree (common polynomial factors removed)."""
        return (self.is_homogeneous() and other.is_homogeneous()
                and self.operator().canonical() == other.operator().canonical())

    def operator(self) -> OreOperator:
        """The annihilating Ore operator of the homogeneous part."""
        return OreOperator(self._ore_kind, self.variable, self.coeffs)

    @classmethod
    def from_operator(cls, op: OreOperator, initial=(), inhomogeneous=None):
        if op.kind != cls._ore_kind:
            raise ParseError(f"operator kind {op.kind} does not fit {cls.__name__}")
        polys = [c.num for c in op.canonical().coeffs]
        return cls(polys, initial, inhomogeneous, op.variable)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        data = {
            "kind": self._kind_tag,
            "variable": self.variable,
            "coefficients": [p.to_strings() for p in self.coeffs],
            "initial": [rat_to_str(v) for v in self.initial],
        }
        if not self.inhomogeneous.is_zero():
            data["inhomogeneous"] = self.inhomogeneous.to_strings()
        return data

    @classmethod
    def from_json(cls, data):
        if data.get("kind") != cls._kind_tag:
            raise ParseError(f"expected kind {cls._kind_tag!r}, got {data.get('kind')!r}")
        try:
            coeffs = [Poly.from_strings(item) for item in data["coefficients"]]
            initial = [rat_from_str(s) for s in data.get("initial", [])]
            inhomog = data.get("inhomogeneous")
            inh = Poly.from_strings(inhomog) if inhomog is not None else None
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed {cls._kind_tag} object: {exc}") from exc
        return cls(coeffs, initial, inh, data.get("variable"))


class Recurrence(_RelationBase):
    """sum(c_i(n) u(n+i)) = q(n) for all n >= 0, with initial terms."""

    _kind_tag = "rec"
    _ore_kind = SHIFT
    _default_variable = "n"

    def blocked_indices(self):
        """Term indices that the relation cannot produce (leading zeros)."""
        r = self.order
        return [r + root for root in integer_roots(self.leading) if root >= 0]

    def required_initial_count(self):
        """Number of leading terms needed to determine the whole sequence."""
        blocked = self.blocked_indices()
        return max(self.order, (blocked[-1] + 1) if blocked else 0)

    def rhs_at(self, n) -> Fraction:
        return Fraction(self.inhomogeneous(Fraction(n)))

    def residuals(self, terms):
        """Row values sum c_i(j) terms[j+i] - q(j) for every full window."""
        terms = [Fraction(t) for t in terms]
        r = self.order
        out = []
        for j in range(len(terms) - r):
            acc = -self.rhs_at(j)
            for i, c in enumerate(self.coeffs):
                if not c.is_zero():
                    acc += c(Fraction(j)) * terms[j + i]
            out.append(acc)
        return out

    def check_consistent(self):
        """Initial terms must satisfy every fully-determined row."""
        if any(v != 0 for v in self.residuals(self.initial)):
            raise InconsistentTerms("initial terms contradict the recurrence")
        need = self.required_initial_count()
        if len(self.initial) < need:
            missing = [i for i in range(len(self.initial), need)
                       if i < self.order or (i in self.blocked_indices())]
            raise MissingInitialTerms(missing or list(range(len(self.initial), need)))
        return self

    def terms(self, count):
        from .evaluate import unroll
        return unroll(self, count)


class DiffEquation(_RelationBase):
    """sum(p_i(x) y^(i)(x)) = q(x) with initial series coefficients."""

    _kind_tag = "ode"
    _ore_kind = DIFF
    _default_variable = "x"

    def canonical(self):
        # dividing an ODE by a common polynomial factor keeps the solution
        # set (multiplication by a nonzero function is injective on series),
        # unlike the recurrence case, so the primitive form removes it
        polys = list(self.coeffs) + [self.inhomogeneous]
        gcd = Poly.zero()
        for q in polys:
            if not q.is_zero():
                gcd = q.primitive() if gcd.is_zero() else gcd.gcd(q)
            if gcd.degree == 0:
                break
        if gcd.degree > 0:
            polys = [q // gcd if not q.is_zero() else q for q in polys]
        polys = _vector_canonical(polys, sign_index=len(self.coeffs) - 1)
        return type(self)(polys[:-1], self.initial, polys[-1], self.variable)

    def induced_recurrence(self) -> Recurrence:
        from .convert import diffeq_to_rec
        return diffeq_to_rec(self)

    def series(self, count):
        from .evaluate import series_from_diffeq
        return series_from_diffeq(self, count)

    def check_consistent(self):
        rec = self.induced_recurrence()
        # enough stored coefficients, and they satisfy the induced recurrence
        need = rec.required_initial_count()
        if len(self.initial) < need:
            raise MissingInitialTerms(list(range(len(self.initial), need)))
        if any(v != 0 for v in rec.residuals(self.initial)):
            raise InconsistentTerms(
                "initial series coefficients contradict the equation")
        return self


class AlgebraicEquation:
    """P(x, y) = 0 with a seed y(0) picking a power-series branch.

    ``coeffs_y[i]`` is the Poly in x multiplying y^i.  The branch through the
    seed is unique when dP/dy(0, seed) != 0.
    """

    __slots__ = ("coeffs_y", "seed")

    def __init__(self, coeffs_y, seed=0):
        polys = [_as_poly(c) for c in coeffs_y]
        while polys and polys[-1].is_zero():
            polys.pop()
        if not polys:
            raise ZeroPolynomial("algebraic equation needs a nonzero polynomial")
        object.__setattr__(self, "coeffs_y", tuple(polys))
        object.__setattr__(self, "seed", Fraction(seed))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraicEquation is immutable")

    @property
    def degree_y(self):
        return len(self.coeffs_y) - 1

    @property
    def degree_x(self):
        return max((p.degree for p in self.coeffs_y if not p.is_zero()), default=-1)

    def __eq__(self, other):
        if not isinstance(other, AlgebraicEquation):
            return NotImplemented
        return self.coeffs_y == other.coeffs_y and self.seed == other.seed

    def __hash__(self):
        return hash((self.coeffs_y, self.seed))

    def __repr__(self):
        from .textform import format_relation
        return f"AlgebraicEquation[{format_relation(self, 'pretty')}]"

    def canonical(self):
        return AlgebraicEquation(_vector_canonical(self.coeffs_y), self.seed)

    def same_relation(self, other) -> bool:
        return self.canonical().coeffs_y == other.canonical().coeffs_y

    def dy(self) -> "list[Poly]":
        """Coefficients (in y) of dP/dy."""
        return [self.coeffs_y[i] * i for i in range(1, len(self.coeffs_y))]

    def dy_at(self, x_value, y_value) -> Fraction:
        acc = Fraction(0)
        for i, p in enumerate(self.dy()):
            acc += Fraction(p(Fraction(x_value))) * Fraction(y_value) ** i
        return acc

    def check_seed(self):
        """P(0, seed) = 0 and dP/dy(0, seed) != 0, else the branch is not
        pinned down."""
        value = sum((Fraction(p(Fraction(0))) * self.seed**i
                     for i, p in enumerate(self.coeffs_y)), Fraction(0))
        if value != 0:
            raise InconsistentTerms(f"seed {self.seed} is not a root of P(0, y)")
        if self.dy_at(0, self.seed) == 0:
            raise SingularSeed("dP/dy vanishes at the seed; branch not unique")
        return self

    def substitute_series(self, series):
        """P(x, f(x)) truncated to len(series) coefficients."""
        n = len(series)
        series = [Fraction(v) for v in series]
        acc = [Fraction(0)] * n
        # Horner in y over truncated series
        for p in reversed(self.coeffs_y):
            acc = _trunc_mul(acc, series, n)
            for k, c in enumerate(p.coeffs[: n]):
                acc[k] += c
        return acc

    def series_newton(self, count):
        """Power-series branch through the seed by coefficient recursion.

        Independent of the ODE route; used as an oracle and for initial
        coefficients.
        """
        self.check_seed()
        f = [self.seed] + [Fraction(0)] * (count - 1)
        dpdy0 = self.dy_at(0, self.seed)
        for k in range(1, count):
            residual = self.substitute_series(f[: k + 1])
            # P(x, f + c x^k) = P(x, f) + c x^k dP/dy(0, seed) + O(x^{k+1})
            f[k] = -residual[k] / dpdy0
        return f

    def to_json(self):
        return {
            "kind": "algeq",
            "coefficients_y": [p.to_strings() for p in self.coeffs_y],
            "seed": rat_to_str(self.seed),
        }

    @classmethod
    def from_json(cls, data):
        try:
            coeffs = [Poly.from_strings(item) for item in data["coefficients_y"]]
            seed = rat_from_str(str(data.get("seed", "0")))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed algebraic equation: {exc}") from exc
        return cls(coeffs, seed)


def _trunc_mul(a, b, n):
    out = [Fraction(0)] * n
    for i, ai in enumerate(a):
        if not ai:
            continue
        if i >= n:
            break
        for j, bj in enumerate(b[: n - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def relation_from_json(data):
    """Dispatch on the JSON kind tag."""
    kind = data.get("kind")
    if kind == "rec":
        return Recurrence.from_json(data)
    if kind == "ode":
        return DiffEquation.from_json(data)
    if kind == "algeq":
        return AlgebraicEquation.from_json(data)
    raise ParseError(f"unknown relation kind {kind!r}")
