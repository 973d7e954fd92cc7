"""Elementary multiplicative number theory.

Kronecker symbols, a smallest-prime-factor sieve and the divisor sums
built on top of it. Everything here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for any integer D and n >= 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1 if D in (1, -1) else 0
    if D % 2 == 0 and n % 2 == 0:
        return 0
    # strip powers of two from n; (D/2) = 0 for even D, else depends on D mod 8
    v = (n & -n).bit_length() - 1
    n >>= v
    sign = 1
    if v % 2 == 1 and D % 8 in (3, 5):
        sign = -sign
    if n == 1:
        return sign
    # n odd: the Jacobi symbol only sees D mod n
    return sign * _jacobi(D % n, n)


def _jacobi(a: int, n: int) -> int:
    # n odd positive, 0 <= a < n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class FactorTable:
    """Smallest prime factor for every 1 <= n <= limit.

    ``spf[n]`` is the least prime dividing n for n >= 2; ``spf[0]`` and
    ``spf[1]`` are 0 and 1 respectively and carry no meaning.
    """

    limit: int
    spf: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "FactorTable":
        if limit < 1:
            raise ValueError("limit must be >= 1")
        spf = np.zeros(limit + 1, dtype=np.int64)
        for p in range(2, isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        unset = spf == 0
        spf[unset] = np.arange(limit + 1, dtype=np.int64)[unset]
        spf.setflags(write=False)
        return cls(limit, spf)

    def is_prime(self, n: int) -> bool:
        return n >= 2 and int(self.spf[n]) == n

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return idx[(idx >= 2) & (self.spf == idx)]


def factorize(n: int, table: FactorTable) -> list[tuple[int, int]]:
    """Prime factorization of n as ``[(p, e), ...]`` with p increasing."""
    if n < 1 or n > table.limit:
        raise IndexError(f"n={n} outside sieve range 1..{table.limit}")
    out: list[tuple[int, int]] = []
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def divisors(n: int, table: FactorTable) -> list[int]:
    ds = [1]
    for p, e in factorize(n, table):
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return sorted(ds)


def divisor_count(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    count = 0
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            count += 1 if d * d == n else 2
    return count


def sigma(k: int, n: int) -> int:
    """Sum of k-th powers of the divisors of n, exact."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 0
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            total += d**k
            e = n // d
            if e != d:
                total += e**k
    return total


def character_divisor_sum(D: int, n: int) -> int:
    """Sum of (D/d) over the positive divisors d of n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 0
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            total += kronecker(D, d)
            e = n // d
            if e != d:
                total += kronecker(D, e)
    return total


# --- table versions over 1..X, used by the series builders ---


def divisor_count_table(X: int) -> np.ndarray:
    d = np.zeros(X + 1, dtype=np.int64)
    for m in range(1, X + 1):
        d[m::m] += 1
    return d


def sigma_table(k: int, X: int) -> list[int]:
    """[sigma_k(0)=0, sigma_k(1), ..., sigma_k(X)] as Python ints."""
    s = [0] * (X + 1)
    for d in range(1, X + 1):
        dk = d**k
        for m in range(d, X + 1, d):
            s[m] += dk
    return s


def kronecker_table(D: int, X: int, table: FactorTable) -> np.ndarray:
    """chi_D(n) for n = 0..X, assembled by complete multiplicativity."""
    if table.limit < X:
        raise IndexError("factor table too small")
    chi = np.zeros(X + 1, dtype=np.int64)
    chi[0] = kronecker(D, 0)
    if X >= 1:
        chi[1] = 1
    spf = table.spf
    cache: dict[int, int] = {}
    for n in range(2, X + 1):
        p = int(spf[n])
        cp = cache.get(p)
        if cp is None:
            cp = cache[p] = kronecker(D, p)
        chi[n] = cp * chi[n // p]
    return chi


def character_divisor_sum_table(D: int, X: int, table: FactorTable) -> np.ndarray:
    """sum_{d | n} chi_D(d) for n = 0..X (entry 0 is 0)."""
    chi = kronecker_table(D, X, table)
    out = np.zeros(X + 1, dtype=np.int64)
    for d in range(1, X + 1):
        if chi[d]:
            out[d::d] += chi[d]
    return out
