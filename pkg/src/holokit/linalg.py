"""Kernel computations over Q and Q(x), exact and modular.

Three layers:

* :func:`kernel_rational` -- textbook fraction arithmetic RREF, the reference
  ("rational") path.
* :func:`modular_kernel` -- reduce the matrix modulo a batch of word primes,
  eliminate each image with vectorized int64 arithmetic, align kernels by
  pivot structure, CRT-combine, lift by rational reconstruction and verify
  exactly over Q.  Unlucky primes (divergent pivot structure, vanishing
  denominators) are skipped and logged.
* :func:`solve_poly_dependency` -- minimal linear dependency of a sequence of
  vectors over Q(x), found per prime by evaluating at many points, batching
  the point-wise eliminations, and recovering each coordinate by rational
  function (Cauchy) interpolation; results CRT-lift like the scalar path.
  This is what keeps the closure/conversion algorithms fast when coefficient
  growth would drown exact fraction arithmetic.

Kernel bases use the reduced-row-echelon convention: one basis vector per
free column f, with v[f] = 1 and v[pivot_i] = -rref[i][f].  Both scalar paths
produce identical bases, which is what makes path-equality testable.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import zpoly
from .errors import ReconstructionFailed
from .modular import (CONV_PRIME_BOUND, PrimeSet, crt_combine,
                      rational_reconstruct, reduce_fraction_mod)
from .poly import Poly, RatFun

# ---------------------------------------------------------------------------
# exact rational path
# ---------------------------------------------------------------------------


def kernel_rational(rows):
    """Kernel basis of a matrix of rationals, exact RREF."""
    mat = [[Fraction(v) for v in row] for row in rows]
    ncols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return _kernel_from_rref(mat, pivots, ncols, one=Fraction(1))


def _kernel_from_rref(rref, pivots, ncols, one):
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [one * 0] * ncols
        vec[f] = one
        for i, pc in enumerate(pivots):
            vec[pc] = -rref[i][f]
        basis.append(tuple(vec))
    return basis


def matrix_times_vector_is_zero(rows, vec):
    for row in rows:
        acc = Fraction(0)
        for a, b in zip(row, vec):
            if a and b:
                acc += Fraction(a) * b
        if acc:
            return False
    return True


# ---------------------------------------------------------------------------
# modular scalar path
# ---------------------------------------------------------------------------


def _reduce_matrix_mod(rows, p):
    out = np.zeros((len(rows), len(rows[0])), dtype=np.int64)
    inv_cache = {}
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if isinstance(v, int):
                out[i, j] = v % p
            else:
                den = v.denominator
                inv = inv_cache.get(den)
                if inv is None:
                    d = den % p
                    if d == 0:
                        raise ZeroDivisionError(f"denominator {den} vanishes mod {p}")
                    inv = pow(d, -1, p)
                    inv_cache[den] = inv
                out[i, j] = v.numerator * inv % p
    return out


def _rref_mod(mat, p):
    """In-place RREF of an int64 matrix mod p; returns pivot column tuple."""
    rows, cols = mat.shape
    pivots = []
    r = 0
    for c in range(cols):
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            mat[[r, i]] = mat[[i, r]]
        mat[r] = mat[r] * pow(int(mat[r, c]), -1, p) % p
        col = mat[:, c].copy()
        col[r] = 0
        touched = np.nonzero(col)[0]
        if touched.size:
            mat[touched] = (mat[touched] - np.outer(col[touched], mat[r])) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return tuple(pivots)


def kernel_mod_p(rows, p):
    """(pivot tuple, kernel basis as k x ncols int64 array) of the image mod p."""
    mat = _reduce_matrix_mod(rows, p)
    pivots = _rref_mod(mat, p)
    ncols = mat.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-mat[i, f]) % p
    return pivots, basis


def modular_kernel(rows, primeset=None, initial_batch=3):
    """Exact kernel basis over Q via the modular + CRT + reconstruction path.

    Returns ``(basis, primeset)``; the basis equals what
    :func:`kernel_rational` produces.  Raises ReconstructionFailed if the
    prime budget is exhausted.
    """
    if primeset is None:
        primeset = PrimeSet()
    ncols = len(rows[0])
    per_prime = {}
    batch = initial_batch
    while True:
        for p in primeset.take(batch):
            try:
                per_prime[p] = kernel_mod_p(rows, p)
            except ZeroDivisionError as exc:
                primeset.mark_unlucky(p, str(exc))
        batch *= 2
        if not per_prime:
            continue
        # consensus pivot structure: maximal rank, then lexicographically
        # smallest pivot columns (unlucky reductions lose rank or shift right)
        best = min(per_prime.values(), key=lambda t: (-len(t[0]), t[0]))[0]
        good = {p: k for p, (piv, k) in per_prime.items() if piv == best}
        for p, (piv, _) in list(per_prime.items()):
            if piv != best:
                primeset.mark_unlucky(p, f"pivot structure {piv} != {best}")
                del per_prime[p]
        nvecs = ncols - len(best)
        if nvecs == 0:
            return [], primeset
        try:
            basis = _lift_kernel(good, nvecs, ncols)
        except ReconstructionFailed:
            if len(primeset.primes) + len(primeset.skipped) > 600:
                raise
            continue
        if all(matrix_times_vector_is_zero(rows, v) for v in basis):
            return basis, primeset
        # exact check failed: the consensus was poisoned; drop and widen
        for p in list(per_prime):
            primeset.mark_unlucky(p, "verification failure")
            del per_prime[p]


def _lift_kernel(good, nvecs, ncols):
    primes = sorted(good)
    basis = []
    for k in range(nvecs):
        vec = []
        for j in range(ncols):
            value, modulus = crt_combine([(int(good[p][k, j]), p) for p in primes])
            try:
                vec.append(rational_reconstruct(value, modulus))
            except Exception as exc:
                raise ReconstructionFailed(str(exc)) from exc
        basis.append(tuple(vec))
    return basis


# ---------------------------------------------------------------------------
# dependencies of vector sequences over Q(x)
# ---------------------------------------------------------------------------


def first_dependency_exact(vectors):
    """Minimal t with vectors[0..t] linearly dependent over Q(x).

    ``vectors`` is a sequence of equal-length RatFun vectors.  Returns
    ``(t, gammas)`` where gammas are RatFun with sum(gammas[k] *
    vectors[k]) = 0 and gammas[t] = 1, or None if all are independent.
    """
    basis = []  # rows: (reduced vector, combination over original indices)
    for t, vec in enumerate(vectors):
        vec = list(vec)
        combo = [RatFun(Poly.zero())] * t + [RatFun(Poly.one())]
        for pivot_col, row, row_combo in basis:
            c = vec[pivot_col]
            if not c.is_zero():
                vec = [a - c * b for a, b in zip(vec, row)]
                combo = [a - c * b for a, b in zip(combo, row_combo + [RatFun(Poly.zero())] * (len(combo) - len(row_combo)))]
        pivot_col = next((i for i, v in enumerate(vec) if not v.is_zero()), None)
        if pivot_col is None:
            return t, combo
        inv = vec[pivot_col].inverse()
        vec = [v * inv for v in vec]
        combo = [v * inv for v in combo]
        basis.append((pivot_col, vec, combo))
    return None


def dependency_to_polys(gammas):
    """Clear a RatFun dependency to a primitive integer Poly vector."""
    den = Poly.one()
    for g in gammas:
        den = _poly_lcm(den, g.den)
    polys = [g.num * (den // g.den) for g in gammas]
    return normalize_poly_vector(polys)


def _poly_lcm(a, b):
    g = a.gcd(b)
    return (a // g) * b


def normalize_poly_vector(polys):
    """Scale a Poly vector to coprime integer coefficients, positive leading
    coefficient in the last nonzero entry."""
    content = Fraction(0)
    for q in polys:
        if q.is_zero():
            continue
        c, _ = q.content_and_primitive()
        content = _frac_gcd(content, c)
    if content == 0:
        return list(polys)
    scaled = [q * (1 / content) for q in polys]
    last = next((q for q in reversed(scaled) if not q.is_zero()), None)
    if last is not None and last.leading() < 0:
        scaled = [-q for q in scaled]
    return scaled


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    import math
    return Fraction(math.gcd(a.numerator, b.numerator),
                    (a.denominator * b.denominator) // math.gcd(a.denominator, b.denominator))


# -- modular dependency path -------------------------------------------------


class DependencyUnlucky(Exception):
    """Internal: this prime/point combination cannot be used."""


def solve_poly_dependency(build_columns, max_count, primeset=None,
                          initial_batch=2, verify_primes=2):
    """Minimal dependency of Q(x)-vector columns via the modular path.

    ``build_columns(p)`` must return the list of columns (each a list of
    zpoly.ZpRatFun sharing the prime p), built entirely mod p, of length
    ``max_count``.  Returns ``(t, polys)`` with polys a primitive integer
    Poly vector of length t+1 and sum(polys[k] * column_k) = 0, or None when
    the columns are independent (certified by a full-rank evaluation).
    """
    if primeset is None:
        primeset = PrimeSet(CONV_PRIME_BOUND)
    per_prime = {}
    batch = initial_batch
    rounds = 0
    while True:
        rounds += 1
        if rounds > 14:
            raise ReconstructionFailed("dependency reconstruction did not stabilize")
        for p in primeset.take(batch):
            try:
                cols = build_columns(p)
                result = _prime_dependency(cols, p)
            except (ZeroDivisionError, DependencyUnlucky) as exc:
                primeset.mark_unlucky(p, str(exc))
                continue
            if result is None:
                return None  # full rank at an evaluation point: independent
            per_prime[p] = result
        batch *= 2
        if not per_prime:
            continue
        # consensus on (t, degree profile)
        key = min((k for k, _ in per_prime.values()), default=None)
        group = {p: v for p, (k, v) in per_prime.items() if k == key}
        if len(group) < 1:
            continue
        profile = None
        for p, vecs in group.items():
            prof = tuple(len(g) for g in vecs)
            if profile is None or prof > profile:
                profile = prof
        aligned = {p: v for p, v in group.items()
                   if tuple(len(g) for g in v) == profile}
        try:
            polys = _lift_poly_vector(aligned, profile)
        except ReconstructionFailed:
            continue
        if _verify_dependency(build_columns, polys, key, primeset, verify_primes):
            return key, polys
        for p in list(per_prime):
            primeset.mark_unlucky(p, "dependency verification failed")
            del per_prime[p]


def _prime_dependency(cols, p):
    """(t, gamma coefficient arrays) for the first dependent prefix mod p."""
    dim = len(cols[0])
    # incremental rank at a reference point certifies (in)dependence
    t = _first_dependent_prefix(cols, p, dim)
    if t is None:
        return None
    gammas = _interpolate_kernel(cols[: t + 1], p, dim)
    # clear denominators: gamma_j = n_j/d_j with gamma_t = 1
    lcm = np.ones(1, dtype=np.int64)
    for num, den in gammas:
        g = zpoly.zgcd(lcm, den, p)
        lcm = zpoly.zmul(zpoly.zdivmod(lcm, g, p)[0], den, p)
    polys = []
    for num, den in gammas:
        q = zpoly.zdivmod(lcm, den, p)[0]
        polys.append(zpoly.zmul(num, q, p))
    # canonical scaling mod p: divide by gcd of all entries, monic last entry
    g = zpoly.ZERO
    for q in polys:
        g = zpoly.zgcd(g, q, p)
    if len(g) > 1:
        polys = [zpoly.zdivmod(q, g, p)[0] for q in polys]
    lead = pow(int(polys[-1][-1]), -1, p)
    return t, [q * lead % p for q in polys]


def _eval_columns_at(cols, p, point):
    """Scalar matrix (dim x ncols) of column values at one point."""
    dim = len(cols[0])
    out = np.zeros((dim, len(cols)), dtype=np.int64)
    for j, col in enumerate(cols):
        for i, entry in enumerate(col):
            nv = zpoly.zeval_many(entry.num, np.array([point], dtype=np.int64), p)[0]
            dv = zpoly.zeval_many(entry.den, np.array([point], dtype=np.int64), p)[0]
            if dv == 0:
                raise DependencyUnlucky(f"pole at evaluation point {point}")
            out[i, j] = nv * pow(int(dv), -1, p) % p
    return out


def _first_dependent_prefix(cols, p, dim):
    """First t with cols[0..t] dependent, agreed at two evaluation points."""
    answers = []
    point = p - 3
    trials = 0
    while len(answers) < 2:
        trials += 1
        if trials > 24:
            raise DependencyUnlucky("no usable evaluation points")
        try:
            mat = _eval_columns_at(cols, p, point)
        except DependencyUnlucky:
            point -= 1
            continue
        answers.append(_incremental_rank_first_dependency(mat, p))
        point -= 1
    # a degenerate point can only depress rank (spurious early dependency),
    # never hide a true one, so full rank anywhere certifies independence
    # and otherwise the larger first-dependency index wins
    a, b = answers
    if a is None or b is None:
        return None
    return max(a, b)


def _incremental_rank_first_dependency(mat, p):
    """First column index dependent on the previous columns, or None."""
    dim, ncols = mat.shape
    basis = np.zeros((0, dim), dtype=np.int64)
    pivots = []
    for j in range(ncols):
        v = mat[:, j].copy()
        for k, pc in enumerate(pivots):
            c = v[pc]
            if c:
                v = (v - c * basis[k]) % p
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return j
        pc = int(nz[0])
        v = v * pow(int(v[pc]), -1, p) % p
        basis = np.vstack([basis, v])
        pivots.append(pc)
    return None


class _PointEvaluator:
    """Caches entry evaluations of a column matrix at 1, 2, 3, ... mod p."""

    def __init__(self, cols, p, dim):
        self.cols = cols
        self.p = p
        self.dim = dim
        self.xs = np.zeros(0, dtype=np.int64)
        self.values = np.zeros((0, dim, len(cols)), dtype=np.int64)
        self.usable = np.zeros(0, dtype=bool)
        self.next_point = 1

    def get(self, total):
        """(xs, values) for the first `total` pole-free points."""
        while int(np.count_nonzero(self.usable)) < total:
            want = max(total - int(np.count_nonzero(self.usable)), 32)
            if self.next_point + want >= self.p:
                raise DependencyUnlucky("ran out of evaluation points mod p")
            xs = np.arange(self.next_point, self.next_point + want, dtype=np.int64)
            self.next_point += want
            block = np.zeros((want, self.dim, len(self.cols)), dtype=np.int64)
            usable = np.ones(want, dtype=bool)
            for j, col in enumerate(self.cols):
                for i, entry in enumerate(col):
                    nv = zpoly.zeval_many(entry.num, xs, self.p)
                    dv = zpoly.zeval_many(entry.den, xs, self.p)
                    bad = dv == 0
                    if bad.any():
                        usable &= ~bad
                        dv = np.where(bad, 1, dv)
                    block[:, i, j] = nv * _pow_inv_many(dv, self.p) % self.p
            self.xs = np.concatenate([self.xs, xs])
            self.values = np.concatenate([self.values, block])
            self.usable = np.concatenate([self.usable, usable])
        keep = np.nonzero(self.usable)[0][:total]
        return self.xs[keep], self.values[keep]


def _interpolate_kernel(cols, p, dim):
    """Kernel vector of the dim x (t+1) matrix over F_p(x), gamma_t = 1.

    Returns a list of (num, den) arrays per coordinate (the last is (1,1)).
    The number of evaluation points grows from below until the recovered
    rational functions survive a held-out check, so typical degrees stay
    cheap and the worst case is still bounded.
    """
    t = len(cols) - 1
    max_deg = max(max(e.max_degree() for e in col) for col in cols)
    bound = 2 * (t + 1) * (max_deg + 1) + 32
    evaluator = _PointEvaluator(cols, p, dim)
    n_points = 128
    while True:
        try:
            return _interpolate_kernel_at(evaluator, p, t, n_points)
        except DependencyUnlucky:
            if n_points >= bound:
                raise
            n_points = min(2 * n_points, bound)


def _interpolate_kernel_at(evaluator, p, t, n_points):
    holdout = 12
    xs, values = evaluator.get(n_points + holdout)
    # values: (npoints, dim, t+1); solve M gamma' = -last column, gamma_t = 1
    gamma_vals, good = _batch_solve(values, p)
    xs = xs[good]
    gamma_vals = gamma_vals[good]
    if len(xs) < n_points // 2 + holdout:
        raise DependencyUnlucky("too many degenerate evaluation points")
    fit_xs, fit_vals = xs[:-holdout], gamma_vals[:-holdout]
    test_xs, test_vals = xs[-holdout:], gamma_vals[-holdout:]
    out = []
    num_bound = (len(fit_xs) - 1) // 2
    modpoly = _points_modulus(fit_xs, p)
    for coord in range(t):
        f = zpoly.znewton_interp(fit_xs, fit_vals[:, coord], p)
        rec = zpoly.zeea_ratrecon(modpoly, f, p, num_bound)
        if rec is None:
            raise DependencyUnlucky("rational recovery failed")
        num, den = rec
        nv = zpoly.zeval_many(num, test_xs, p)
        dv = zpoly.zeval_many(den, test_xs, p)
        if np.any(dv == 0) or np.any((nv - dv * test_vals[:, coord]) % p != 0):
            raise DependencyUnlucky("holdout mismatch")
        out.append((num, den))
    out.append((np.ones(1, dtype=np.int64), np.ones(1, dtype=np.int64)))
    return out


def _points_modulus(xs, p):
    """prod (x - a) over the fit points, by balanced products."""
    polys = [np.array([(-int(a)) % p, 1], dtype=np.int64) for a in xs]
    while len(polys) > 1:
        nxt = []
        for i in range(0, len(polys) - 1, 2):
            nxt.append(zpoly.zmul(polys[i], polys[i + 1], p))
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


def _pow_inv_many(vals, p):
    return np.array([pow(int(v), -1, p) for v in vals], dtype=np.int64)


def _batch_solve(values, p):
    """Solve M(a) gamma = 0 with gamma_t = 1 for every point a at once.

    values has shape (K, dim, t+1).  Returns (gamma values (K, t), good mask).
    Points whose elimination structure differs from the reference point are
    masked out.
    """
    K, dim, t1 = values.shape
    t = t1 - 1
    work = values.copy()
    good = np.ones(K, dtype=bool)
    # reference elimination to fix a row order
    ref_idx = 0
    order = _reference_row_order(work[ref_idx], p, t)
    if order is None:
        # reference point degenerate; try a few more
        for ref_idx in range(1, min(K, 8)):
            order = _reference_row_order(work[ref_idx], p, t)
            if order is not None:
                break
        if order is None:
            raise DependencyUnlucky("could not find reference elimination order")
    work = work[:, order, :]
    for i in range(t):
        piv = work[:, i, i].copy()
        good &= piv != 0
        piv_safe = np.where(piv == 0, 1, piv)
        inv = _pow_inv_many(piv_safe, p)
        work[:, i, :] = work[:, i, :] * inv[:, None] % p
        for r in range(dim):
            if r == i:
                continue
            f = work[:, r, i].copy()
            nz = f != 0
            if nz.any():
                work[nz, r, :] = (work[nz, r, :] - f[nz, None] * work[nz, i, :]) % p
    # consistency: rows t..dim-1 must vanish entirely
    if dim > t:
        residual = work[:, t:, :].reshape(K, -1)
        good &= ~np.any(residual != 0, axis=1)
    gammas = (-work[:, :t, t]) % p
    return gammas, good


def _reference_row_order(mat, p, t):
    """Row permutation putting pivots of the first t columns on the diagonal."""
    dim = mat.shape[0]
    work = mat.copy() % p
    order = list(range(dim))
    for i in range(t):
        pivot = None
        for r in range(i, dim):
            if work[r, i] != 0:
                pivot = r
                break
        if pivot is None:
            return None
        if pivot != i:
            work[[i, pivot]] = work[[pivot, i]]
            order[i], order[pivot] = order[pivot], order[i]
        inv = pow(int(work[i, i]), -1, p)
        work[i] = work[i] * inv % p
        for r in range(dim):
            if r != i and work[r, i]:
                work[r] = (work[r] - work[r, i] * work[i]) % p
    return order


def _lift_poly_vector(aligned, profile):
    """CRT + rational reconstruction of per-prime poly vectors to Q polys."""
    primes = sorted(aligned)
    polys = []
    for idx, length in enumerate(profile):
        coeffs = []
        for k in range(length):
            residues = [(int(aligned[p][idx][k]) if k < len(aligned[p][idx]) else 0, p)
                        for p in primes]
            value, modulus = crt_combine(residues)
            try:
                coeffs.append(rational_reconstruct(value, modulus))
            except Exception as exc:
                raise ReconstructionFailed(str(exc)) from exc
        polys.append(Poly(coeffs))
    return normalize_poly_vector(polys)


def _verify_dependency(build_columns, polys, t, primeset, count):
    """Check sum polys[k]*col_k = 0 at `count` fresh primes."""
    for p in primeset.take(count):
        try:
            cols = build_columns(p)
        except ZeroDivisionError:
            primeset.mark_unlucky(p, "verification build failed")
            continue
        dim = len(cols[0])
        coeffs = [zpoly.ZpRatFun.from_poly(
            zpoly.from_ints([int(c) for c in q.coeffs], p), p) for q in polys]
        for i in range(dim):
            acc = zpoly.ZpRatFun.from_poly(zpoly.ZERO, p)
            for k in range(t + 1):
                acc = acc + coeffs[k] * cols[k][i]
            if not acc.is_zero():
                return False
    return True
