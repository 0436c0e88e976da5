"""Exact arithmetic for rationals in (0,1]: Gauss-map orbits, continued
fractions, the mirror involution, and enumeration of the sample spaces
Omega_Q = {a/q : 1 <= a <= q <= Q, gcd(a,q) = 1}.

Everything here is pure and exact (Python integers).  The statistical sweep
engine has its own machine-width kernels; this module is the reference
implementation those kernels are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence


@dataclass(frozen=True)
class Rational:
    """Reduced fraction num/den in (0,1]."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if not (0 < self.num <= self.den):
            raise ValueError("value must lie in (0,1]")
        if math.gcd(self.num, self.den) != 1:
            raise ValueError("fraction must be reduced")

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


@dataclass(frozen=True)
class ContinuedFraction:
    """Digits a_1..a_r of x = [0; a_1, ..., a_r]."""

    coeffs: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class Orbit:
    """Gauss-map iterates x, T(x), ..., T^{r-1}(x); the terminal 0 is implied."""

    points: tuple[Rational, ...]

    def __len__(self) -> int:
        return len(self.points)


def gauss_step(x: Rational) -> Rational | None:
    """One Gauss-map step T(a/q) = (q mod a)/a, or None at the fixed endpoint."""
    r = x.den % x.num
    if r == 0:
        return None
    return Rational(r, x.num)


def cf_expand(x: Rational) -> ContinuedFraction:
    """Continued-fraction digits of x via the Gauss map (integer Euclid)."""
    a, q = x.num, x.den
    coeffs = []
    while a != 0:
        coeffs.append(q // a)
        a, q = q % a, a
    return ContinuedFraction(tuple(coeffs))


def cf_value(cf: ContinuedFraction) -> Rational:
    """Exact value of a canonical digit word; inverse of cf_expand.

    Canonical means all digits >= 1 and the last digit >= 2, except for the
    word (1,) which denotes x = 1.
    """
    coeffs = cf.coeffs
    if not coeffs:
        raise ValueError("empty coefficient list")
    if any(a < 1 for a in coeffs):
        raise ValueError("digits must be positive")
    if len(coeffs) > 1 and coeffs[-1] < 2:
        raise ValueError("final digit must be >= 2 (non-canonical word)")
    num, den = _continuant_value(coeffs)
    return Rational(num, den)


def _continuant_value(coeffs: Sequence[int]) -> tuple[int, int]:
    # Backward fold: [0; a_1, ..., a_r] = 1/(a_1 + 1/(a_2 + ...)).
    num, den = 1, coeffs[-1]
    for a in reversed(coeffs[:-1]):
        num, den = den, a * den + num
    return num, den


def gauss_orbit(x: Rational) -> Orbit:
    """Exact orbit (x, T(x), ..., T^{r-1}(x)); length r(x)."""
    points = [x]
    while True:
        nxt = gauss_step(points[-1])
        if nxt is None:
            return Orbit(tuple(points))
        points.append(nxt)


def orbit_depth(x: Rational) -> int:
    """r(x) without materializing the orbit."""
    a, q, r = x.num, x.den, 0
    while a != 0:
        a, q = q % a, a
        r += 1
    return r


def mirror(x: Rational) -> Rational:
    """Mirror element: the rational with reversed digit word, reduced mod 1.

    Defined on (0,1) only; the digit reversal of x = 1 is ambiguous and
    rejected.  Preserves the denominator.  When the depth r(x) is odd, the
    mirror numerator is the inverse of num(x) mod den(x) (it is minus that
    inverse when r(x) is even).

    Word reversal is an involution on (0,1/2] (there both x and its mirror
    have first digit >= 2).  On (1/2,1) the first digit is 1, reversal
    shortens the canonical word by one, and mirror(mirror(x)) = 1 - x.
    """
    if x.num == x.den:
        raise ValueError("mirror is undefined at x = 1")
    coeffs = cf_expand(x).coeffs[::-1]
    # The reversed word starts with a_r >= 2, so its value already lies in
    # (0,1); it may end with digit 1, which _continuant_value accepts.
    num, den = _continuant_value(coeffs)
    return Rational(num % den if num != den else den, den)


def totient_sieve(Q: int) -> list[int]:
    """phi(0..Q) via a smallest-prime-factor style linear sieve."""
    phi = list(range(Q + 1))
    for p in range(2, Q + 1):
        if phi[p] == p:  # p prime
            for k in range(p, Q + 1, p):
                phi[k] -= phi[k] // p
    return phi


def omega_count(Q: int) -> int:
    """|Omega_Q| = sum of phi(q) for q <= Q."""
    return sum(totient_sieve(Q)[1:])


def smallest_prime_factors(Q: int) -> list[int]:
    """spf[n] = smallest prime factor of n (spf[1] = 1), for n <= Q."""
    spf = list(range(Q + 1))
    i = 2
    while i * i <= Q:
        if spf[i] == i:
            for k in range(i * i, Q + 1, i):
                if spf[k] == k:
                    spf[k] = i
        i += 1
    return spf


def distinct_primes(q: int, spf: Sequence[int]) -> list[int]:
    primes = []
    while q > 1:
        p = spf[q]
        primes.append(p)
        while q % p == 0:
            q //= p
    return primes


def enumerate_omega(Q: int, q_lo: int = 1, q_hi: int | None = None) -> Iterator[Rational]:
    """Yield every reduced a/q with q_lo <= q <= min(q_hi, Q), denominator
    ascending then numerator ascending.

    The (q_lo, q_hi) window makes the stream partitionable into disjoint
    denominator ranges for parallel sweeps.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    q_hi = Q if q_hi is None else min(q_hi, Q)
    spf = smallest_prime_factors(q_hi)
    for q in range(max(1, q_lo), q_hi + 1):
        if q == 1:
            yield Rational(1, 1)
            continue
        primes = distinct_primes(q, spf)
        for a in range(1, q):
            for p in primes:
                if a % p == 0:
                    break
            else:
                yield Rational(a, q)


def denominator_blocks(Q: int, n_blocks: int) -> list[tuple[int, int]]:
    """Split 1..Q into contiguous denominator ranges with roughly equal
    sweep work (work per q grows ~ q log q; q^2 cumulative is the proxy).

    The block layout depends only on (Q, n_blocks), never on the worker
    count, which is what makes parallel sweeps deterministic.
    """
    n_blocks = max(1, min(n_blocks, Q))
    total = Q * (Q + 1) * (2 * Q + 1) // 6  # sum of q^2
    blocks = []
    lo = 1
    acc = 0
    target_idx = 1
    for q in range(1, Q + 1):
        acc += q * q
        if acc >= target_idx * total // n_blocks and lo <= q:
            blocks.append((lo, q))
            lo = q + 1
            target_idx += 1
    if lo <= Q:
        blocks.append((lo, Q))
    return blocks
