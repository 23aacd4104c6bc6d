"""Conversions: recurrence <-> ODE, algebraic equation -> ODE, homogenization.

The recurrence-to-ODE direction works in the theta = x*d/dx calculus:
multiplication by n on coefficients corresponds to theta on the generating
function, a shift by i to division by x^i with boundary corrections.  Those
corrections are never dropped: they land in the inhomogeneous part of the
output (and vanish exactly when the recurrence extends by zeros to negative
indices).  A polynomial right-hand side q(n) contributes the rational series
sum q(n) x^n, cleared by multiplying the equation with (1-x)^(deg q + 1).

The ODE-to-recurrence direction matches coefficients of x^m in
sum p_{j,a} x^a y^(j): the term index is m+j-a, the weight the falling
factorial (m+j-a)(m+j-a-1)...(m-a+1), giving one polynomial band per shift
offset i = j-a.  Re-indexed so the lowest shift is u(n), the relation holds
for every n >= 0: rows that would reach negative powers of x vanish
identically because those coefficients are zero in a power series.

Algebraic equations become ODEs by derivative reduction in the quotient ring
Q(x)[y]/(P): y' = -P_x/P_y mod P, then the first linear dependency among
1, y, y', ..., y^(s).  Large inputs run per prime with CRT lifting; every
result is validated against the Newton series of the selected branch.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .errors import (AlreadyHomogeneous, MissingInitialTerms, NotSquarefree,
                     SingularSeed)
from .evaluate import unroll
from .fields import QxField, ZpxField
from .ore import DIFF, SHIFT, OreOperator
from .poly import Poly
from .relations import AlgebraicEquation, DiffEquation, Recurrence

# ---------------------------------------------------------------------------
# ODE -> recurrence
# ---------------------------------------------------------------------------


def _bands(deq: DiffEquation):
    """Coefficient bands: dict i -> C_i(m), the weight of u_{m+i} in the
    coefficient of x^m of sum p_j(x) y^(j)."""
    bands = {}
    for j, p in enumerate(deq.coeffs):
        for a, coeff in enumerate(p.coeffs):
            if not coeff:
                continue
            i = j - a
            ff = Poly.one()
            for t in range(j):
                ff = ff * Poly([Fraction(i - t), Fraction(1)])
            bands[i] = bands.get(i, Poly.zero()) + ff * coeff
    return {i: c for i, c in bands.items() if not c.is_zero()}


def _induced_relation(deq: DiffEquation) -> Recurrence:
    """Standard-form coefficient recurrence (no initial terms attached).

    Homogeneous equations only; the caller homogenizes first otherwise.
    """
    bands = _bands(deq)
    i_min, i_max = min(bands), max(bands)
    coeffs = []
    for i in range(i_min, i_max + 1):
        c = bands.get(i, Poly.zero())
        coeffs.append(c.shift_arg(-i_min) if not c.is_zero() else c)
    return Recurrence(coeffs, (), None, "n")


def ode_series(deq: DiffEquation, count: int):
    """Taylor coefficients of the solution pinned by deq.initial.

    Works for inhomogeneous equations too, by walking the coefficient bands
    directly (the identity holds for every x-power m >= 0, with absent terms
    at negative indices simply skipped).
    """
    bands = _bands(deq)
    i_max = max(bands)
    top = bands[i_max]
    q = deq.inhomogeneous
    u = [Fraction(v) for v in deq.initial[:count]]
    while len(u) < count:
        k = len(u)
        m = k - i_max
        if m < 0:
            raise MissingInitialTerms([k])
        c = Fraction(top(Fraction(m)))
        if c == 0:
            raise MissingInitialTerms([k])
        acc = Fraction(q.coeffs[m]) if m <= q.degree else Fraction(0)
        for i, band in bands.items():
            if i == i_max or m + i < 0:
                continue
            acc -= Fraction(band(Fraction(m))) * u[m + i]
        u.append(acc / c)
    return u


def _required_series_count(deq: DiffEquation) -> int:
    """Stored-coefficient count that pins the solution of deq."""
    if not deq.is_homogeneous():
        deq = DiffEquation(_homogenized_ode_polys(deq), (), None, deq.variable)
    return _induced_relation(deq).required_initial_count()


def diffeq_to_rec(deq: DiffEquation) -> Recurrence:
    """Recurrence on the Taylor coefficients of the solutions."""
    if not deq.is_homogeneous():
        deq = homogenize_diffeq(deq)
    skeleton = _induced_relation(deq)
    need = skeleton.required_initial_count()
    initial = list(deq.initial)
    if len(initial) < need:
        initial = ode_series(deq, need)
    return Recurrence(skeleton.coeffs, initial[:need] if need else initial[:skeleton.order],
                      None, "n").canonical()


# ---------------------------------------------------------------------------
# recurrence -> ODE
# ---------------------------------------------------------------------------


def _stirling2(max_k):
    """Table S[k][j]: theta^k = sum_j S[k][j] x^j D^j."""
    table = [[1]]
    for k in range(max_k):
        prev = table[-1]
        row = [0] * (k + 2)
        for j, v in enumerate(prev):
            row[j] += j * v
            row[j + 1] += v
        table.append(row)
    return table


def rec_to_diffeq(rec: Recurrence) -> DiffEquation:
    """ODE satisfied by the generating function sum u_n x^n."""
    r = rec.order
    if len(rec.initial) < r:
        raise MissingInitialTerms(range(len(rec.initial), r))
    max_deg = max(c.degree for c in rec.coeffs)
    stirling = _stirling2(max_deg)
    order = max_deg
    ode_coeffs = [Poly.zero() for _ in range(order + 1)]
    for i, c in enumerate(rec.coeffs):
        if c.is_zero():
            continue
        shifted = c.shift_arg(-i)  # c_i(theta - i)
        for k, ck in enumerate(shifted.coeffs):
            if not ck:
                continue
            for j, s2 in enumerate(stirling[k]):
                if s2:
                    mono = [Fraction(0)] * (r - i + j) + [ck * s2]
                    ode_coeffs[j] = ode_coeffs[j] + Poly(mono)
    # boundary corrections: partial rows at negative indices
    boundary = Poly.zero()
    init = [Fraction(v) for v in rec.initial]
    for j in range(-r, 0):
        rho = Fraction(0)
        for i in range(-j, r + 1):
            ci = rec.coeffs[i]
            if not ci.is_zero():
                rho += Fraction(ci(Fraction(j))) * init[j + i]
        if rho:
            boundary = boundary + Poly([Fraction(0)] * (r + j) + [rho])
    rhs = boundary
    if not rec.inhomogeneous.is_zero():
        q = rec.inhomogeneous
        d = q.degree
        clear = Poly([1, -1]) ** (d + 1)
        # N_q = (sum q(n) x^n) * (1-x)^(d+1) is a polynomial of degree <= d+1
        probe = 2 * d + 6
        series = [Fraction(q(Fraction(n))) for n in range(probe)]
        prod = _poly_times_series(clear, series, probe)
        if any(v != 0 for v in prod[d + 2:]):
            raise AssertionError("rhs series failed to clear to a polynomial")
        n_q = Poly(prod[: d + 2])
        ode_coeffs = [clear * p for p in ode_coeffs]
        rhs = clear * boundary + Poly([Fraction(0)] * r + [Fraction(1)]) * n_q
    deq0 = DiffEquation(ode_coeffs, (), rhs, "x")
    need = max(_required_series_count(deq0), 1)
    out = DiffEquation(ode_coeffs, unroll(rec, need), rhs, "x").canonical()
    # boundary terms flow through the inhomogeneous intermediate and are
    # folded away here; the emitted equation is always homogeneous
    if not out.is_homogeneous():
        out = homogenize_diffeq(out)
    return out


def _poly_times_series(p: Poly, series, count):
    out = [Fraction(0)] * count
    for a, ca in enumerate(p.coeffs):
        if not ca:
            continue
        for m, v in enumerate(series[: count - a]):
            if v:
                out[a + m] += ca * v
    return out


# ---------------------------------------------------------------------------
# homogenization
# ---------------------------------------------------------------------------


def _homogenized_ode_polys(deq: DiffEquation):
    q = deq.inhomogeneous
    ann = OreOperator(DIFF, deq.variable, [-q.derivative(), q])
    return [c.num for c in (ann * deq.operator()).canonical().coeffs]


def homogenize_diffeq(deq: DiffEquation) -> DiffEquation:
    """Left-compose with q*D - q', an annihilator of the polynomial rhs;
    order grows by exactly one."""
    if deq.is_homogeneous():
        raise AlreadyHomogeneous("equation has no inhomogeneous part")
    polys = _homogenized_ode_polys(deq)
    out0 = DiffEquation(polys, (), None, deq.variable)
    need = max(_induced_relation(out0).required_initial_count(), 1)
    initial = ode_series(deq, need) if len(deq.initial) < need else list(deq.initial)[:need]
    return DiffEquation(polys, initial, None, deq.variable).canonical()


def homogenize_rec(rec: Recurrence) -> Recurrence:
    """Compose with (S-1)^(deg q + 1), which annihilates the polynomial rhs."""
    if rec.is_homogeneous():
        raise AlreadyHomogeneous("recurrence has no inhomogeneous part")
    d = rec.inhomogeneous.degree
    step = OreOperator(SHIFT, rec.variable, [Poly([-1]), Poly([1])])
    ann = step ** (d + 1)
    polys = [c.num for c in (ann * rec.operator()).canonical().coeffs]
    out0 = Recurrence(polys, (), None, rec.variable)
    need = max(out0.required_initial_count(), out0.order)
    return Recurrence(polys, unroll(rec, need), None, rec.variable).canonical()


# ---------------------------------------------------------------------------
# algebraic equation -> ODE (derivative reduction in Q(x)[y]/(P))
# ---------------------------------------------------------------------------


def _ypoly_trim(u, field):
    while u and field.is_zero(u[-1]):
        u.pop()
    return u


def _ypoly_mul(u, v, field):
    if not u or not v:
        return []
    out = [field.zero() for _ in range(len(u) + len(v) - 1)]
    for i, a in enumerate(u):
        if field.is_zero(a):
            continue
        for j, b in enumerate(v):
            if not field.is_zero(b):
                out[i + j] = field.add(out[i + j], field.mul(a, b))
    return _ypoly_trim(out, field)


def _ypoly_divmod(u, v, field):
    if not v:
        raise ZeroDivisionError("division by zero y-polynomial")
    u = list(u)
    dv = len(v) - 1
    inv_lead = field.div(field.one(), v[-1])
    quot = [field.zero() for _ in range(max(len(u) - dv, 0))]
    for i in range(len(u) - 1 - dv, -1, -1):
        c = u[i + dv]
        if field.is_zero(c):
            continue
        f = field.mul(c, inv_lead)
        quot[i] = f
        for j, b in enumerate(v):
            u[i + j] = field.sub(u[i + j], field.mul(f, b))
    return quot, _ypoly_trim(u[:dv], field)


def _ypoly_gcd(u, v, field):
    u, v = list(u), list(v)
    while v:
        u, v = v, _ypoly_divmod(u, v, field)[1]
    if u:
        inv = field.div(field.one(), u[-1])
        u = [field.mul(c, inv) for c in u]
    return u


def _ypoly_invert(u, modpoly, field):
    """Inverse of u modulo modpoly (extended Euclid in field[y])."""
    r0, r1 = list(modpoly), list(u)
    t0, t1 = [], [field.one()]
    while r1:
        q, r2 = _ypoly_divmod(r0, r1, field)
        t2 = _ypoly_sub(t0, _ypoly_mul(q, t1, field), field)
        r0, r1, t0, t1 = r1, r2, t1, t2
    if len(r0) != 1:
        raise NotSquarefree("P and dP/dy share a factor; no inverse mod P")
    inv = field.div(field.one(), r0[0])
    return _ypoly_trim([field.mul(c, inv) for c in t0], field)


def _ypoly_sub(u, v, field):
    n = max(len(u), len(v))
    out = [field.zero() for _ in range(n)]
    for i, a in enumerate(u):
        out[i] = a
    for i, b in enumerate(v):
        out[i] = field.sub(out[i], b)
    return _ypoly_trim(out, field)


def _alg_derivation_columns(alg: AlgebraicEquation, field, max_count):
    """Columns [1, y, y', y'', ...] as vectors over field, reduced mod P."""
    pcoeffs = _ypoly_trim([field.from_poly(c) for c in alg.coeffs_y], field)
    m = len(pcoeffs) - 1
    p_y = _ypoly_trim([field.mul(pcoeffs[i], field.from_int(i))
                       for i in range(1, m + 1)], field)
    p_x = _ypoly_trim([field.from_poly(c.derivative()) for c in alg.coeffs_y], field)
    inv_py = _ypoly_invert(p_y, pcoeffs, field)
    neg_px = [field.sub(field.zero(), c) for c in p_x]
    yprime = _ypoly_divmod(_ypoly_mul(neg_px, inv_py, field), pcoeffs, field)[1]

    def as_vector(el):
        vec = [field.zero() for _ in range(m)]
        for i, c in enumerate(el):
            vec[i] = c
        return vec

    def ddx(el):
        part1 = _ypoly_trim([field.deriv(c) for c in el], field)
        dely = _ypoly_trim([field.mul(el[i], field.from_int(i))
                            for i in range(1, len(el))], field)
        part2 = _ypoly_divmod(_ypoly_mul(dely, yprime, field), pcoeffs, field)[1]
        total = [field.zero() for _ in range(max(len(part1), len(part2)))]
        for i, c in enumerate(part1):
            total[i] = c
        for i, c in enumerate(part2):
            total[i] = field.add(total[i], c)
        return _ypoly_trim(total, field)

    columns = [as_vector([field.one()])]
    element = _ypoly_divmod([field.zero(), field.one()], pcoeffs, field)[1]
    for _ in range(max_count - 1):
        columns.append(as_vector(element))
        element = ddx(element)
    return columns


def _alg_columns_modp(coeffs_int, p, max_count):
    """Denominator-free per-prime derivation columns for a big P(x, y).

    Same mathematics as :func:`_alg_derivation_columns`, but every object is
    a y-polynomial with F_p[x] coefficients and one tracked denominator, so
    the hot loop is pure convolution arithmetic.  The extended Euclidean
    scheme keeps the exact invariant t_i * P_y == r_i (mod P) under
    pseudo-division, which sidesteps coefficient fractions entirely.
    """
    import numpy as np

    from . import zpoly

    def ypoly(polys):
        out = [zpoly.from_ints(q, p) for q in polys]
        while out and len(out[-1]) == 0:
            out.pop()
        return out

    def ymul(u, v):
        if not u or not v:
            return []
        out = [zpoly.ZERO] * (len(u) + len(v) - 1)
        for i, a in enumerate(u):
            if len(a) == 0:
                continue
            for j, b in enumerate(v):
                if len(b):
                    out[i + j] = zpoly.zadd(out[i + j], zpoly.zmul(a, b, p), p)
        while out and len(out[-1]) == 0:
            out.pop()
        return out

    def yscale(u, c):
        return [zpoly.zmul(a, c, p) if len(a) else a for a in u]

    def ysub(u, v):
        out = [zpoly.ZERO] * max(len(u), len(v))
        for i, a in enumerate(u):
            out[i] = a
        for i, b in enumerate(v):
            out[i] = zpoly.zsub(out[i], b, p)
        while out and len(out[-1]) == 0:
            out.pop()
        return out

    def yprem(u, v):
        """(r, e): lc(v)^e * u == q*v + r with deg_y r < deg_y v."""
        r = list(u)
        e = 0
        lead = v[-1]
        dv = len(v) - 1
        while len(r) - 1 >= dv and r:
            e += 1
            shift = len(r) - 1 - dv
            top = r[-1]
            r = yscale(r, lead)
            sub = [zpoly.ZERO] * shift + yscale(v, top)
            r = ysub(r, sub)
            if len(r) - 1 >= dv + shift and r:
                raise AssertionError("pseudo-division failed to reduce")
        return r, e

    P = ypoly([[int(c) for c in q.coeffs] for q in coeffs_int])
    m = len(P) - 1
    if m < 1 or len(P[-1]) == 0:
        raise ZeroDivisionError("leading y-coefficient degenerates mod p")
    lc = P[-1]
    P_y = [zpoly.zmul_scalar(P[i], i, p) for i in range(1, m + 1)]
    while P_y and len(P_y[-1]) == 0:
        P_y.pop()
    P_x = [zpoly.zderiv(a, p) for a in P]
    while P_x and len(P_x[-1]) == 0:
        P_x.pop()
    # extended pseudo-Euclid: invariant t*P_y == r (mod P), run until r is
    # constant in y (zero remainder means P is not squarefree mod p).
    # Stripping the joint content each round keeps pseudo-remainder degree
    # growth linear; dividing r and t together preserves the invariant.
    r_prev, r_cur = P, P_y
    t_prev, t_cur = [], [np.ones(1, dtype=np.int64)]
    while r_cur and len(r_cur) - 1 > 0:
        rem, t_next = _yprem_with_cofactor(r_prev, r_cur, t_prev, t_cur, p)
        if rem:
            stripped = _ystrip(rem + t_next, p)
            rem, t_next = stripped[: len(rem)], stripped[len(rem):]
        r_prev, r_cur = r_cur, rem
        t_prev, t_cur = t_cur, t_next
    if not r_cur:
        raise ZeroDivisionError("P not squarefree mod p")
    r_const = r_cur[0]
    # y' = -P_x * t / (r_const * lc^e) after reduction mod P
    num = ymul(yscale(P_x, zpoly.from_ints([-1], p)), t_cur)
    if len(num) - 1 >= m:
        num, e = yprem(num, P)
    else:
        e = 0
    y_den = zpoly.zmul(r_const, _zpow(lc, e, p), p)
    stripped = _ystrip(num + [y_den], p)
    y_num, y_den = stripped[:-1], stripped[-1]

    def reduce_mod_P(u):
        if len(u) - 1 < m:
            return u, 0
        r, e = yprem(u, P)
        return r, e

    columns = []
    one = [zpoly.ZERO] * m
    one[0] = np.ones(1, dtype=np.int64)
    columns.append([zpoly.ZpRatFun(one[i], np.ones(1, dtype=np.int64), p, reduced=True)
                    for i in range(m)])
    # element y as vector; P may have degree 1 in y
    el = [zpoly.ZERO, np.ones(1, dtype=np.int64)]
    el, e0 = reduce_mod_P(el)
    den = _zpow(lc, e0, p)
    for _ in range(max_count - 1):
        vec = [zpoly.ZERO] * m
        for i, a in enumerate(el):
            vec[i] = a
        columns.append([zpoly.ZpRatFun(vec[i], den.copy(), p, reduced=True)
                        for i in range(m)])
        # derivative: (el/den)' + (d/dy el/den) * y'
        dp = zpoly.zderiv(den, p)
        part1 = [zpoly.zsub(zpoly.zmul(zpoly.zderiv(a, p), den, p),
                            zpoly.zmul(a, dp, p), p) for a in el]
        dely = [zpoly.zmul_scalar(el[i], i, p) for i in range(1, len(el))]
        while dely and len(dely[-1]) == 0:
            dely.pop()
        part2 = ymul(dely, y_num)
        part2, e2 = reduce_mod_P(part2)
        # denominators: part1 / den^2, part2 / (den * y_den * lc^e2)
        d1 = zpoly.zmul(den, den, p)
        d2 = zpoly.zmul(zpoly.zmul(den, y_den, p), _zpow(lc, e2, p), p)
        common = zpoly.zmul(d1, d2, p)
        merged = [zpoly.ZERO] * max(len(part1), len(part2))
        for i, a in enumerate(part1):
            merged[i] = zpoly.zmul(a, d2, p)
        for i, a in enumerate(part2):
            merged[i] = zpoly.zadd(merged[i], zpoly.zmul(a, d1, p), p)
        while merged and len(merged[-1]) == 0:
            merged.pop()
        stripped = _ystrip(merged + [common], p)
        el, den = stripped[:-1], stripped[-1]
    return columns


def _yprem_with_cofactor(r_prev, r_cur, t_prev, t_cur, p):
    """One pseudo-division step carrying the Euclidean cofactor along."""
    import numpy as np

    from . import zpoly

    def yscale(u, c):
        return [zpoly.zmul(a, c, p) if len(a) else a for a in u]

    def ysub(u, v):
        out = [zpoly.ZERO] * max(len(u), len(v))
        for i, a in enumerate(u):
            out[i] = a
        for i, b in enumerate(v):
            out[i] = zpoly.zsub(out[i], b, p)
        while out and len(out[-1]) == 0:
            out.pop()
        return out

    r = list(r_prev)
    t = list(t_prev)
    lead = r_cur[-1]
    dv = len(r_cur) - 1
    while r and len(r) - 1 >= dv:
        shift = len(r) - 1 - dv
        top = r[-1]
        r = yscale(r, lead)
        t = yscale(t, lead)
        r = ysub(r, [zpoly.ZERO] * shift + yscale(r_cur, top))
        t = ysub(t, [zpoly.ZERO] * shift + yscale(t_cur, top))
    return r, t


def _zpow(a, e, p):
    from . import zpoly
    import numpy as np
    out = np.ones(1, dtype=np.int64)
    for _ in range(e):
        out = zpoly.zmul(out, a, p)
    return out


def _ystrip(polys, p):
    """Divide a list of F_p[x] polynomials by their common gcd."""
    from . import zpoly
    g = zpoly.ZERO
    for a in polys:
        if len(a):
            g = zpoly.zgcd(g, a, p)
        if len(g) == 1:
            return list(polys)
    if len(g) <= 1:
        return list(polys)
    return [zpoly.zdivmod(a, g, p)[0] if len(a) else a for a in polys]


def _squarefree_part(alg: AlgebraicEquation) -> AlgebraicEquation:
    field = QxField
    pcoeffs = [field.from_poly(c) for c in alg.coeffs_y]
    m = len(pcoeffs) - 1
    if m < 1:
        return alg
    p_y = _ypoly_trim([field.mul(pcoeffs[i], field.from_int(i))
                       for i in range(1, m + 1)], field)
    g = _ypoly_gcd(list(pcoeffs), list(p_y), field)
    if len(g) <= 1:
        return alg
    reduced, rem = _ypoly_divmod(pcoeffs, g, field)
    if rem:
        raise NotSquarefree("squarefree reduction left a remainder")
    den = Poly.one()
    for c in reduced:
        lcm_g = den.gcd(c.den)
        den = (den // lcm_g) * c.den
    polys = [c.num * (den // c.den) for c in reduced]
    return AlgebraicEquation(polys, alg.seed)


def algeq_to_diffeq(alg: AlgebraicEquation, method="auto") -> DiffEquation:
    """Linear ODE (possibly inhomogeneous) annihilating every root of the
    squarefree part of P, in particular the branch through the seed."""
    alg.check_seed()
    alg = _squarefree_part(alg)
    try:
        alg.check_seed()
    except SingularSeed as exc:
        raise NotSquarefree(f"seed singular after squarefree reduction: {exc}")
    m = alg.degree_y
    max_count = m + 2  # 1, y, y', ..., y^(m) must be dependent
    if method == "auto":
        method = "modular" if m * (alg.degree_x + 2) > 60 else "exact"
    if method == "exact":
        columns = _alg_derivation_columns(alg, QxField, max_count)
        found = linalg.first_dependency_exact(columns)
        if found is None:
            raise AssertionError("dependency must exist in a finite module")
        _, gammas = found
        polys = linalg.dependency_to_polys(gammas)
    else:
        coeffs_int = list(alg.canonical().coeffs_y)

        def build(p):
            return _alg_columns_modp(coeffs_int, p, max_count)
        found = linalg.solve_poly_dependency(build, max_count)
        if found is None:
            raise AssertionError("dependency must exist in a finite module")
        _, polys = found
    # column 0 is the constant function 1; column k >= 1 is y^(k-1)
    ode_coeffs = polys[1:]
    inhomog = -polys[0]
    deq0 = DiffEquation(ode_coeffs, (), inhomog, "x")
    need = max(_required_series_count(deq0), 1)
    out = DiffEquation(ode_coeffs, alg.series_newton(need), inhomog, "x").canonical()
    _validate_against_newton(out, alg)
    return out


def _validate_against_newton(deq: DiffEquation, alg: AlgebraicEquation):
    from .ore import apply_operator
    depth = max(50, 2 * (deq.order + max(p.degree for p in deq.coeffs)) + 10)
    series = alg.series_newton(depth)
    values = apply_operator(deq.operator(), series)
    rhs = deq.inhomogeneous
    for k, v in enumerate(values):
        want = rhs.coeffs[k] if k <= rhs.degree else Fraction(0)
        if v != want:
            raise AssertionError("algebraic-to-ODE conversion failed validation")
