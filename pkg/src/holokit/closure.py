"""Closure properties: sums, products and rescalings of holonomic objects.

Everything here is a linear-algebra ansatz over Q(n) or Q(x): the combined
object and its shifts/derivatives are expressed in a finite module spanned by
shifted/differentiated factors, and the first linear dependency among
them is the output relation.  The ansatz sees only the defining equations,
never the initial values, so the output annihilates *every* pair of solutions
(that is what makes the closure proof-grade); initial terms of the output are
recomputed by direct unrolling of the inputs.

Small inputs run with exact rational functions.  Large products switch to
the modular path: the whole derivative iteration is replayed modulo each
prime with one cleared denominator per column (so the hot loop is pure
polynomial convolution), and the dependency is recovered by evaluation,
Cauchy interpolation and CRT lifting.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg, zpoly
from .convert import homogenize_diffeq, homogenize_rec, ode_series
from .errors import ZeroRatio
from .evaluate import series_scale_x, unroll
from .ore import lclm
from .poly import Poly, RatFun
from .relations import DiffEquation, Recurrence

# ---------------------------------------------------------------------------
# recurrences (shift side, exact Q(n) arithmetic)
# ---------------------------------------------------------------------------


class _ShiftReducer:
    """Representations of u_{n+k} in the basis u_n .. u_{n+r-1} over Q(n)."""

    def __init__(self, rec: Recurrence):
        self.order = rec.order
        lead = RatFun(rec.leading, Poly.one(), _reduced=True)
        self.reduction = [RatFun(-c, Poly.one(), _reduced=True) / lead
                          for c in rec.coeffs[:-1]]
        vec = [RatFun.zero()] * self.order
        vec[0] = RatFun.one()
        self.current = vec  # representation of u_{n+k}, k = 0 to start

    def step(self):
        """Advance u_{n+k} -> u_{n+k+1}."""
        shifted = [c.shift_arg(1) for c in self.current]
        out = [RatFun.zero()] * self.order
        for j in range(self.order - 1):
            out[j + 1] = shifted[j]
        top = shifted[self.order - 1]
        if not top.is_zero():
            for i, red in enumerate(self.reduction):
                out[i] = out[i] + top * red
        self.current = out


def _rec_combo_columns(r1: Recurrence, r2: Recurrence, mode, max_count):
    """Columns representing w_{n+k} in the combined module."""
    a, b = _ShiftReducer(r1), _ShiftReducer(r2)
    columns = []
    for _ in range(max_count):
        if mode == "add":
            columns.append(list(a.current) + list(b.current))
        else:
            columns.append([x * y for x in a.current for y in b.current])
        a.step()
        b.step()
    return columns


def _degenerate(rec: Recurrence):
    return rec.order == 0


def _combine_initial(out_rel, r1, r2, combine):
    skeleton = Recurrence(out_rel, (), None)
    need = max(skeleton.required_initial_count(), skeleton.order)
    t1 = unroll(r1, need)
    t2 = unroll(r2, need)
    return [combine(x, y) for x, y in zip(t1, t2)]


def _rec_closure(r1: Recurrence, r2: Recurrence, mode) -> Recurrence:
    if not r1.is_homogeneous():
        r1 = homogenize_rec(r1)
    if not r2.is_homogeneous():
        r2 = homogenize_rec(r2)
    if _degenerate(r1) or _degenerate(r2):
        # order 0 forces the zero sequence (modulo finitely many free spots)
        if mode == "add":
            return (r2 if _degenerate(r1) else r1).canonical()
        return Recurrence([Poly.one()], (), None).canonical()
    dim = r1.order + r2.order if mode == "add" else r1.order * r2.order
    columns = _rec_combo_columns(r1, r2, mode, dim + 1)
    found = linalg.first_dependency_exact(columns)
    if found is None:
        raise AssertionError("closure ansatz must close within the module")
    _, gammas = found
    polys = linalg.dependency_to_polys(gammas)
    combine = (lambda x, y: x + y) if mode == "add" else (lambda x, y: x * y)
    initial = _combine_initial(polys, r1, r2, combine)
    return Recurrence(polys, initial, None).canonical()


def rec_add(r1: Recurrence, r2: Recurrence) -> Recurrence:
    """Recurrence for u_n + v_n; order <= order(r1) + order(r2)."""
    return _rec_closure(r1, r2, "add")


def rec_mul(r1: Recurrence, r2: Recurrence) -> Recurrence:
    """Recurrence for the Hadamard product u_n * v_n;
    order <= order(r1) * order(r2)."""
    return _rec_closure(r1, r2, "mul")


def geometric_scale(rec: Recurrence, ratio) -> Recurrence:
    """Recurrence for u_n * ratio^n, as a Hadamard product with the
    geometric sequence."""
    ratio = Fraction(ratio)
    if ratio == 0:
        raise ZeroRatio("geometric rescaling needs a nonzero ratio")
    geo = Recurrence([Poly([-ratio]), Poly.one()], [1])
    return rec_mul(rec, geo)


# ---------------------------------------------------------------------------
# D-finite series (differential side)
# ---------------------------------------------------------------------------


def diffeq_add(d1: DiffEquation, d2: DiffEquation) -> DiffEquation:
    """Annihilator of f + g, via the LCLM of the two operators."""
    if not d1.is_homogeneous():
        d1 = homogenize_diffeq(d1)
    if not d2.is_homogeneous():
        d2 = homogenize_diffeq(d2)
    op = lclm(d1.operator(), d2.operator())
    polys = [c.num for c in op.coeffs]
    skeleton = DiffEquation(polys, (), None)
    from .convert import _required_series_count
    need = max(_required_series_count(skeleton), 1)
    s1 = ode_series(d1, need)
    s2 = ode_series(d2, need)
    return DiffEquation(polys, [x + y for x, y in zip(s1, s2)], None).canonical()


class _QPolyRing:
    """Polynomial layer for the exact product iteration."""

    @staticmethod
    def from_qpoly(p):
        return p

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def deriv(a):
        return a.derivative()

    @staticmethod
    def scale(a, k):
        return a * k

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    @staticmethod
    def zero():
        return Poly.zero()

    @staticmethod
    def wrap(num, den):
        return RatFun(num, den, _reduced=True)


class _ZpPolyRing:
    """Polynomial layer for the per-prime product iteration."""

    def __init__(self, p):
        self.p = p

    def from_qpoly(self, q):
        from .modular import reduce_fraction_mod
        vals = [reduce_fraction_mod(c, self.p) for c in q.coeffs]
        return zpoly.trim(np.array(vals, dtype=np.int64))

    def mul(self, a, b):
        return zpoly.zmul(a, b, self.p)

    def add(self, a, b):
        return zpoly.zadd(a, b, self.p)

    def sub(self, a, b):
        return zpoly.zsub(a, b, self.p)

    def neg(self, a):
        return (-a) % self.p if len(a) else a

    def deriv(self, a):
        return zpoly.zderiv(a, self.p)

    def scale(self, a, k):
        return zpoly.zmul_scalar(a, k, self.p)

    @staticmethod
    def is_zero(a):
        return len(a) == 0

    @staticmethod
    def zero():
        return zpoly.ZERO

    def wrap(self, num, den):
        return zpoly.ZpRatFun(num, den, self.p, reduced=True)


def _product_columns(p1, p2, ring, max_count, symmetric):
    """Columns of h^(k) = (f*g)^(k) in the basis f^(i) g^(j).

    p1, p2 are the coefficient Poly lists of the two (canonical, homogeneous)
    equations.  Every column k carries the single cleared denominator
    W^k with W = lead(p1)*lead(p2), so the iteration is purely polynomial.
    When the two equations are equal the iteration runs in the symmetric
    basis m_ij = f^(i) g^(j) + f^(j) g^(i) (i < j), m_ii = f^(i) g^(i),
    halving the module dimension.
    """
    if symmetric:
        return _product_columns_sym(p1, ring, max_count)
    s1, s2 = len(p1) - 1, len(p2) - 1
    P = [ring.from_qpoly(q) for q in p1]
    Q = [ring.from_qpoly(q) for q in p2]
    w = ring.mul(P[s1], Q[s2])
    w_prime = ring.deriv(w)
    reps = {(0, 0): ring.from_qpoly(Poly.one())}
    columns = []
    den_power = ring.from_qpoly(Poly.one())
    cells = [(i, j) for i in range(s1) for j in range(s2)]
    for k in range(max_count):
        columns.append([ring.wrap(reps.get(c, ring.zero()), den_power) for c in cells])
        if k == max_count - 1:
            break
        new = {}

        def push(i, j, val):
            key = (i, j)
            new[key] = ring.add(new[key], val) if key in new else val

        for (i, j), num in reps.items():
            if ring.is_zero(num):
                continue
            # quotient-rule term: (num / W^k)' numerator part
            push(i, j, ring.sub(ring.mul(ring.deriv(num), w),
                                ring.scale(ring.mul(num, w_prime), k)))
            lifted = ring.mul(num, w)
            # f-derivative: f^(i) -> f^(i+1), reduced at the top
            if i + 1 < s1:
                push(i + 1, j, lifted)
            else:
                for a in range(s1):
                    if not ring.is_zero(P[a]):
                        push(a, j, ring.neg(ring.mul(ring.mul(num, P[a]), Q[s2])))
            # g-derivative
            if j + 1 < s2:
                push(i, j + 1, lifted)
            else:
                for b in range(s2):
                    if not ring.is_zero(Q[b]):
                        push(i, b, ring.neg(ring.mul(ring.mul(num, Q[b]), P[s1])))
        reps = {key: v for key, v in new.items() if not ring.is_zero(v)}
        den_power = ring.mul(den_power, w)
    return columns


def _product_columns_sym(p1, ring, max_count):
    """Symmetric-square variant: both factors satisfy the same equation."""
    s = len(p1) - 1
    P = [ring.from_qpoly(q) for q in p1]
    w = ring.mul(P[s], P[s])
    w_prime = ring.deriv(w)
    reps = {(0, 0): ring.from_qpoly(Poly.one())}
    columns = []
    den_power = ring.from_qpoly(Poly.one())
    cells = [(i, j) for i in range(s) for j in range(i, s)]
    for k in range(max_count):
        columns.append([ring.wrap(reps.get(c, ring.zero()), den_power) for c in cells])
        if k == max_count - 1:
            break
        new = {}

        def push(i, j, val, double=False):
            key = (i, j)
            if double:
                val = ring.scale(val, 2)
            new[key] = ring.add(new[key], val) if key in new else val

        def push_reduced(i, num):
            # the pair {f^(i) g^(s)} symmetrized: expand g^(s) (= f^(s) rule)
            for b in range(s):
                if ring.is_zero(P[b]):
                    continue
                val = ring.neg(ring.mul(ring.mul(num, P[b]), P[s]))
                push(min(i, b), max(i, b), val, double=(b == i))

        for (i, j), num in reps.items():
            if ring.is_zero(num):
                continue
            push(i, j, ring.sub(ring.mul(ring.deriv(num), w),
                                ring.scale(ring.mul(num, w_prime), k)))
            lifted = ring.mul(num, w)
            if i == j:
                # m_ii' = m_{i, i+1}
                if i + 1 < s:
                    push(i, i + 1, lifted)
                else:
                    push_reduced(i, num)
            else:
                # m_ij' = (i+1, j)-pair + (i, j+1)-pair
                if i + 1 == j:
                    push(j, j, lifted, double=True)
                else:
                    push(i + 1, j, lifted)
                if j + 1 < s:
                    push(i, j + 1, lifted)
                else:
                    push_reduced(i, num)
        reps = {key: v for key, v in new.items() if not ring.is_zero(v)}
        den_power = ring.mul(den_power, w)
    return columns


def diffeq_mul(d1: DiffEquation, d2: DiffEquation, method="auto") -> DiffEquation:
    """Annihilator of the Cauchy product f * g."""
    if not d1.is_homogeneous():
        d1 = homogenize_diffeq(d1)
    if not d2.is_homogeneous():
        d2 = homogenize_diffeq(d2)
    c1 = d1.canonical()
    c2 = d2.canonical()
    p1 = list(c1.coeffs)
    p2 = list(c2.coeffs)
    symmetric = p1 == p2
    s1, s2 = len(p1) - 1, len(p2) - 1
    dim = (s1 * (s1 + 1)) // 2 if symmetric else s1 * s2
    max_count = dim + 1
    max_deg = max(q.degree for q in p1 + p2)
    if method == "auto":
        method = "modular" if dim * (max_deg + 2) > 60 else "exact"
    if method == "exact":
        columns = _product_columns(p1, p2, _QPolyRing, max_count, symmetric)
        found = linalg.first_dependency_exact(columns)
        if found is None:
            raise AssertionError("product ansatz must close within the module")
        _, gammas = found
        polys = linalg.dependency_to_polys(gammas)
    else:
        def build(p):
            return _product_columns(p1, p2, _ZpPolyRing(p), max_count, symmetric)
        found = linalg.solve_poly_dependency(build, max_count)
        if found is None:
            raise AssertionError("product ansatz must close within the module")
        _, polys = found
    skeleton = DiffEquation(polys, (), None)
    from .convert import _required_series_count
    need = max(_required_series_count(skeleton), 1)
    sa = ode_series(d1, need)
    sb = ode_series(d2, need)
    from .evaluate import trunc_mul
    return DiffEquation(polys, trunc_mul(sa, sb, need), None).canonical()


def diffeq_derivative(deq: DiffEquation) -> DiffEquation:
    """Annihilator of f'(x) for every solution f of the input."""
    if not deq.is_homogeneous():
        deq = homogenize_diffeq(deq)
    c = deq.canonical()
    s = c.order
    lead = RatFun(c.leading, Poly.one(), _reduced=True)
    reduction = [RatFun(-q, Poly.one(), _reduced=True) / lead for q in c.coeffs[:-1]]
    # representation of g^(k) = f^(k+1) in the basis f^(0..s-1)
    current = [RatFun.zero()] * s
    if s == 1:
        current[0] = reduction[0]
    else:
        current[1] = RatFun.one()
    columns = []
    for _ in range(s + 1):
        columns.append(list(current))
        top = current[s - 1]
        shifted = [RatFun.zero()] + current[: s - 1]
        nxt = [c0.derivative() + sh for c0, sh in zip(current, shifted)]
        if not top.is_zero():
            nxt = [a + top * r for a, r in zip(nxt, reduction)]
        current = nxt
    found = linalg.first_dependency_exact(columns)
    if found is None:
        raise AssertionError("derivative ansatz must close within the module")
    _, gammas = found
    polys = linalg.dependency_to_polys(gammas)
    skeleton = DiffEquation(polys, (), None)
    from .convert import _required_series_count
    need = max(_required_series_count(skeleton), 1)
    base = ode_series(deq, need + 1)
    from .evaluate import series_derivative
    return DiffEquation(polys, series_derivative(base)[:need], None).canonical()


def diffeq_scale_x(deq: DiffEquation, factor) -> DiffEquation:
    """Equation satisfied by f(factor * x); the series analogue of
    geometric rescaling."""
    factor = Fraction(factor)
    if factor == 0:
        raise ZeroRatio("argument rescaling needs a nonzero factor")
    if not deq.is_homogeneous():
        deq = homogenize_diffeq(deq)
    inv = 1 / factor
    polys = [p.scale_arg(factor) * inv**i for i, p in enumerate(deq.coeffs)]
    return DiffEquation(polys, series_scale_x(deq.initial, factor),
                        None, deq.variable).canonical()
