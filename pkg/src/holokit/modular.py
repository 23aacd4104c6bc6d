"""Prime management, Chinese remaindering and rational reconstruction.

The modular fast path reduces a rational linear system modulo a batch of
word-size primes, solves each image independently, recombines by CRT and
lifts back to Q by rational reconstruction.  Two prime pools are maintained:

* the default pool sits just below 2^31, so a product of two residues fits a
  signed 64-bit word (the elimination kernels reduce after every product);
* a smaller pool below 2^25 serves the vectorized polynomial paths, where a
  convolution may accumulate a few thousand unreduced products in int64.

Primes found to be unlucky (a pivot or leading object vanishes mod p) are
recorded in the :class:`PrimeSet` skip log and never reused.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DuplicatePrime, NoReconstruction, UnluckyPrimeExhaustion
from .poly import _is_prime

WORD_PRIME_BOUND = 1 << 31
CONV_PRIME_BOUND = 1 << 25

DEFAULT_BATCH = 10
MAX_PRIMES = 4096


def _primes_below(bound):
    """Deterministic descending stream of primes just below ``bound``."""
    n = bound - 1
    while n > 2:
        if _is_prime(n):
            yield n
        n -= 1


class PrimeSet:
    """A working set of distinct word-size primes plus a skip log.

    ``take(k)`` hands out the next ``k`` fresh primes from the pool, skipping
    anything already marked unlucky.  The pool is deterministic, so repeated
    runs use identical primes.
    """

    def __init__(self, bound=WORD_PRIME_BOUND):
        self.bound = bound
        self._stream = _primes_below(bound)
        self.primes = []
        self.skipped = []

    def take(self, count):
        fresh = []
        while len(fresh) < count:
            p = next(self._stream)
            if len(self.primes) + len(self.skipped) >= MAX_PRIMES:
                raise UnluckyPrimeExhaustion(
                    f"exceeded {MAX_PRIMES} primes; input looks degenerate")
            self.primes.append(p)
            fresh.append(p)
        return fresh

    def mark_unlucky(self, p, reason=""):
        if p in self.primes:
            self.primes.remove(p)
        self.skipped.append((p, reason))

    def as_report(self):
        return {
            "used": list(self.primes),
            "skipped": [{"prime": p, "reason": r} for p, r in self.skipped],
        }


def crt_combine(residues):
    """Combine ``[(value, prime), ...]`` into the representative mod prod(p).

    Returns ``(value, modulus)`` with ``0 <= value < modulus`` congruent to
    every given residue.  Primes must be pairwise distinct.
    """
    seen = set()
    for _, p in residues:
        if p in seen:
            raise DuplicatePrime(f"prime {p} appears twice")
        seen.add(p)
    value, modulus = 0, 1
    for r, p in residues:
        r %= p
        # value + modulus * t == r (mod p)
        t = (r - value) * pow(modulus % p, -1, p) % p
        value += modulus * t
        modulus *= p
    return value, modulus


def rational_reconstruct(value: int, modulus: int) -> Fraction:
    """Lift ``value`` mod ``modulus`` to p/q with ``|p|, q <= sqrt(M/2)``.

    Uses the half-extended Euclidean algorithm; raises
    :class:`NoReconstruction` when no fraction within the bound exists
    (the caller should then add more primes).
    """
    if not 0 <= value < modulus:
        raise ValueError("need 0 <= value < modulus")
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, value
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or math.gcd(r1, t1) != 1:
        raise NoReconstruction(f"no fraction below bound {bound}")
    if t1 < 0:
        r1, t1 = -r1, -t1
    if math.gcd(t1, modulus) != 1:
        raise NoReconstruction("denominator shares a factor with the modulus")
    return Fraction(r1, t1)


def reduce_fraction_mod(value: Fraction, p: int) -> int:
    """Image of a rational in F_p; ZeroDivisionError if the denominator drops."""
    den = value.denominator % p
    if den == 0:
        raise ZeroDivisionError(f"denominator of {value} vanishes mod {p}")
    return value.numerator * pow(den, -1, p) % p
