"""Materializing sequences and series: unrolling, binary splitting, catalogs.

``unroll`` is plain forward substitution through the recurrence, dividing by
the leading coefficient and reporting precisely which initial terms are
missing when that coefficient vanishes.  ``nth_term`` reaches one remote term
in quasi-optimal big-integer time: the recurrence step becomes a companion
matrix, the interval [lo, hi) becomes a balanced product tree of integer
matrices over one cleared denominator, and only the root is turned back into
rationals.  Short intervals fall back to straight iteration.

``named_series`` covers the catalog needed by the worked pipelines: Gauss
hypergeometric coefficients, binomial series (1+x)^c, and exp, each returned
together with its first-order coefficient recurrence.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidParameter, MissingInitialTerms, NotEnoughData
from .poly import Poly
from .relations import AlgebraicEquation, DiffEquation, Recurrence

SPLIT_THRESHOLD = 32


def unroll(rec: Recurrence, count: int):
    """First ``count`` terms u_0..u_{count-1}, exact forward substitution."""
    r = rec.order
    terms = [Fraction(v) for v in rec.initial[:count]]
    if len(terms) >= count:
        return terms[:count]
    if len(terms) < min(r, count):
        raise MissingInitialTerms(range(len(terms), min(r, count)))
    lead = rec.leading
    while len(terms) < count:
        m = len(terms)
        n = m - r
        c = Fraction(lead(Fraction(n)))
        if c == 0:
            raise MissingInitialTerms([m])
        acc = rec.rhs_at(n)
        for i in range(r):
            ci = rec.coeffs[i]
            if not ci.is_zero():
                acc -= Fraction(ci(Fraction(n))) * terms[n + i]
        terms.append(acc / c)
    return terms


class SplitMatrix:
    """Companion-matrix product over an index interval [lo, hi).

    ``mat`` is the integer matrix product of the cleared companion matrices,
    ``den`` the product of the cleared leading coefficients; the exact
    rational product is mat/den.  Products over adjacent intervals compose:
    combine(left, right) covers [left.lo, right.hi).
    """

    __slots__ = ("lo", "hi", "mat", "den")

    def __init__(self, lo, hi, mat, den):
        self.lo = lo
        self.hi = hi
        self.mat = mat
        self.den = den

    @staticmethod
    def identity(r, at):
        return SplitMatrix(at, at, tuple(tuple(int(i == j) for j in range(r))
                                         for i in range(r)), 1)

    def combine(self, right: "SplitMatrix") -> "SplitMatrix":
        if right.lo != self.hi:
            raise ValueError("intervals must be adjacent")
        # matrices act on the left: interval [lo,hi) maps V(lo) to V(hi)
        mat = _mat_mul(right.mat, self.mat)
        return SplitMatrix(self.lo, right.hi, mat, self.den * right.den)


def _mat_mul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
                 for i in range(n))


def _companion_int(rec_coeffs_int, n, r):
    """Cleared companion matrix at step n: den * M(n), den = lead(n)."""
    lead = _eval_int(rec_coeffs_int[r], n)
    rows = []
    for i in range(r - 1):
        rows.append(tuple(lead if j == i + 1 else 0 for j in range(r)))
    rows.append(tuple(-_eval_int(rec_coeffs_int[i], n) for i in range(r)))
    return tuple(rows), lead


def _eval_int(coeffs, point):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * point + c
    return acc


def _split_product(rec_coeffs_int, r, lo, hi):
    """SplitMatrix over [lo, hi); straight iteration under the threshold."""
    if hi - lo <= SPLIT_THRESHOLD:
        out = SplitMatrix.identity(r, lo)
        for n in range(lo, hi):
            mat, den = _companion_int(rec_coeffs_int, n, r)
            if den == 0:
                raise MissingInitialTerms([n + r])
            out = out.combine(SplitMatrix(n, n + 1, mat, den))
        return out
    mid = (lo + hi) // 2
    return _split_product(rec_coeffs_int, r, lo, mid).combine(
        _split_product(rec_coeffs_int, r, mid, hi))


def _cleared_int_coeffs(rec: Recurrence):
    """Coefficient polynomials scaled to integers, as int lists."""
    lcm = 1
    for p in rec.coeffs:
        for c in p.coeffs:
            g = _gcd(lcm, c.denominator)
            lcm = lcm // g * c.denominator
    out = []
    for p in rec.coeffs:
        out.append([int(c * lcm) for c in p.coeffs] or [0])
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def nth_term(rec: Recurrence, index: int) -> Fraction:
    """u_index by binary splitting; equals unroll(rec, index+1)[-1]."""
    if not rec.is_homogeneous():
        raise InvalidParameter("nth_term needs a homogeneous recurrence")
    r = rec.order
    start = max(r, rec.required_initial_count())
    if index < start or r == 0:
        return unroll(rec, index + 1)[index]
    if len(rec.initial) < start:
        raise MissingInitialTerms(range(len(rec.initial), start))
    prefix = [Fraction(v) for v in rec.initial[:start]]
    coeffs_int = _cleared_int_coeffs(rec)
    # V(m) = (u_m .. u_{m+r-1});  V(start - r) -> V(index - r + 1)
    lo = start - r
    hi = index - r + 1
    product = _split_product(coeffs_int, r, lo, hi)
    vec = prefix[lo: lo + r]
    top = sum(product.mat[r - 1][j] * vec[j] for j in range(r))
    return top / product.den


def series_from_diffeq(deq: DiffEquation, count: int):
    """Taylor coefficients of the solution, via the induced recurrence."""
    return unroll(deq.induced_recurrence(), count)


def series_from_algeq(alg: AlgebraicEquation, count: int):
    """Coefficients of the unique branch through the seed.

    Goes through the ODE route and back-substitutes into P as a safety net.
    """
    from .convert import algeq_to_diffeq
    deq = algeq_to_diffeq(alg)
    series = series_from_diffeq(deq, count)
    residual = alg.substitute_series(series)
    if any(v != 0 for v in residual):
        raise AssertionError("series from the ODE route fails back-substitution")
    return series


# ---------------------------------------------------------------------------
# named series catalog
# ---------------------------------------------------------------------------


def twoF1_recurrence(a, b, c) -> Recurrence:
    """Coefficient recurrence of 2F1(a, b; c; x):
    (n+1)(c+n) u_{n+1} - (a+n)(b+n) u_n = 0, u_0 = 1."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if c.denominator == 1 and c <= 0:
        raise InvalidParameter("2F1 parameter c must avoid non-positive integers")
    c0 = -(Poly([a, 1]) * Poly([b, 1]))
    c1 = Poly([0, 1]).shift_arg(1) * Poly([c, 1])
    return Recurrence([c0, c1], [1]).canonical()


def pow1p_recurrence(c) -> Recurrence:
    """Coefficient recurrence of (1+x)^c: (n+1) u_{n+1} - (c-n) u_n = 0."""
    c = Fraction(c)
    return Recurrence([Poly([-c, 1]), Poly([1, 1])], [1]).canonical()


def exp_recurrence() -> Recurrence:
    """(n+1) u_{n+1} - u_n = 0, u_0 = 1."""
    return Recurrence([Poly([-1]), Poly([1, 1])], [1])


def named_series(kind, count, *params):
    """(first ``count`` coefficients, defining recurrence) for a catalog entry.

    kind is "twoF1" (params a, b, c), "pow1p" (param c) or "exp".
    """
    if kind == "twoF1":
        if len(params) != 3:
            raise InvalidParameter("twoF1 takes parameters a, b, c")
        rec = twoF1_recurrence(*params)
    elif kind == "pow1p":
        if len(params) != 1:
            raise InvalidParameter("pow1p takes one parameter c")
        rec = pow1p_recurrence(*params)
    elif kind == "exp":
        if params:
            raise InvalidParameter("exp takes no parameters")
        rec = exp_recurrence()
    else:
        raise InvalidParameter(f"unknown series kind {kind!r}")
    return unroll(rec, count), rec


# ---------------------------------------------------------------------------
# truncated series helpers
# ---------------------------------------------------------------------------


def trunc_mul(a, b, count):
    out = [Fraction(0)] * count
    for i, ai in enumerate(a[:count]):
        if not ai:
            continue
        for j, bj in enumerate(b[: count - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def trunc_pow(a, exponent, count):
    result = [Fraction(1)] + [Fraction(0)] * (count - 1)
    base = [Fraction(v) for v in a[:count]]
    e = exponent
    while e:
        if e & 1:
            result = trunc_mul(result, base, count)
        e >>= 1
        if e:
            base = trunc_mul(base, base, count)
    return result


def series_scale_x(series, factor):
    """Coefficients of f(factor * x)."""
    out = []
    power = Fraction(1)
    for c in series:
        out.append(Fraction(c) * power)
        power *= factor
    return out


def series_derivative(series):
    return [k * Fraction(series[k]) for k in range(1, len(series))]


def decimal_digit_count(n) -> int:
    """Number of decimal digits of an integer, without str conversion
    (which Python caps for huge values)."""
    n = abs(int(n))
    if n == 0:
        return 1
    guess = max((n.bit_length() - 1) * 30103 // 100000, 0)
    while 10**guess <= n:
        guess += 1
    return guess
