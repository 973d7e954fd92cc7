"""Positive definite binary quadratic forms.

Reduction and class numbers by enumeration, representation counts by
lattice enumeration and by the divisor-sum formula, theta coefficients.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np

from heckeqf.arith import FactorTable, character_divisor_sum, character_divisor_sum_table

# discriminants of class number one (fundamental first, then non-fundamental)
CLASS_NUMBER_ONE = (-3, -4, -7, -8, -11, -19, -43, -67, -163, -12, -16, -27, -28)


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.discriminant >= 0:
            raise ValueError(f"{self} is not positive definite")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not abs(b) <= a <= c:
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x1: int, x2: int) -> int:
        return self.a * x1 * x1 + self.b * x1 * x2 + self.c * x2 * x2

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def _check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)")


def reduced_forms(D: int) -> list[QuadForm]:
    """All primitive reduced forms of discriminant D, sorted by (a, b)."""
    _check_discriminant(D)
    forms = []
    for a in range(1, isqrt(-D // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
    return sorted(forms)


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def principal_form(D: int) -> QuadForm:
    """The reduced form representing 1 (the unique one when h(D) = 1)."""
    _check_discriminant(D)
    if D % 4 == 0:
        return QuadForm(1, 0, -D // 4)
    return QuadForm(1, 1, (1 - D) // 4)


def units_count(D: int) -> int:
    """w_D: 6 for D = -3, 4 for D = -4, 2 otherwise."""
    return {-3: 6, -4: 4}.get(D, 2)


def r_enumerate(Q: QuadForm, n: int) -> int:
    """Number of (x1, x2) in Z^2 with Q(x1, x2) = n, by direct enumeration."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1
    a, b, c = Q.a, Q.b, Q.c
    D = Q.discriminant
    bound = isqrt(4 * a * n // -D)
    x2 = np.arange(-bound, bound + 1, dtype=np.int64)
    # a x1^2 + b x2 x1 + (c x2^2 - n) = 0 has discriminant D x2^2 + 4 a n
    disc = D * x2 * x2 + 4 * a * n
    ok = disc >= 0
    x2, disc = x2[ok], disc[ok]
    s = np.rint(np.sqrt(disc.astype(np.float64))).astype(np.int64)
    # correct the float root by one in either direction
    s = np.where(s * s > disc, s - 1, s)
    s = np.where((s + 1) * (s + 1) <= disc, s + 1, s)
    square = s * s == disc
    x2, s = x2[square], s[square]
    count = 0
    for root_sign in (1, -1):
        num = -b * x2 + root_sign * s
        hit = num % (2 * a) == 0
        if root_sign == -1:
            hit &= s != 0  # a double root is counted once
        count += int(np.count_nonzero(hit))
    return count


def r_formula(D: int, n: int) -> int:
    """w_D * sum_{d | n} chi_D(d), for the class-number-one discriminants."""
    if D not in CLASS_NUMBER_ONE:
        _check_discriminant(D)
        raise ValueError(f"r_formula needs h(D) = 1; D = {D} has h = {class_number(D)}")
    if n < 1:
        raise ValueError("n must be >= 1")
    return units_count(D) * character_divisor_sum(D, n)


def r_formula_table(D: int, X: int, table: FactorTable) -> np.ndarray:
    """r_formula(D, n) for n = 0..X; entry 0 is set to 1 (the zero vector)."""
    if D not in CLASS_NUMBER_ONE:
        raise ValueError(f"r_formula needs h(D) = 1; D = {D} is not in the registry")
    out = units_count(D) * character_divisor_sum_table(D, X, table)
    out[0] = 1
    return out


def _row_bounds(Q: QuadForm, X: int, x2: int) -> tuple[int, int] | None:
    """Range of x1 with Q(x1, x2) <= X, exact."""
    a, b, c = Q.a, Q.b, Q.c
    disc = Q.discriminant * x2 * x2 + 4 * a * X
    if disc < 0:
        return None
    s = isqrt(disc)
    lo = -((b * x2 + s) // (2 * a))  # ceil((-b x2 - s) / 2a)
    hi = (-b * x2 + s) // (2 * a)
    # isqrt floors, so these are already the extreme integers inside
    return (lo, hi) if lo <= hi else None


def lattice_rows(Q: QuadForm, X: int):
    """Yield (x2, values) with values = Q(x1, x2) for every x1 with Q <= X."""
    bound = isqrt(4 * Q.a * X // -Q.discriminant)
    for x2 in range(-bound, bound + 1):
        rng = _row_bounds(Q, X, x2)
        if rng is None:
            continue
        x1 = np.arange(rng[0], rng[1] + 1, dtype=np.int64)
        yield x2, Q.a * x1 * x1 + Q.b * x2 * x1 + Q.c * x2 * x2


def theta_coefficients(Q: QuadForm, X: int, workers: int = 1) -> np.ndarray:
    """r_Q(0..X) by one sweep over the lattice points with Q(x) <= X."""
    if X < 0:
        raise ValueError("X must be nonnegative")
    bound = isqrt(4 * Q.a * X // -Q.discriminant)
    rows = list(range(-bound, bound + 1))

    def sweep(chunk):
        counts = np.zeros(X + 1, dtype=np.int64)
        for x2 in chunk:
            rng = _row_bounds(Q, X, x2)
            if rng is None:
                continue
            x1 = np.arange(rng[0], rng[1] + 1, dtype=np.int64)
            vals = Q.a * x1 * x1 + Q.b * x2 * x1 + Q.c * x2 * x2
            counts += np.bincount(vals, minlength=X + 1)
        return counts

    if workers <= 1 or len(rows) < 2:
        return sweep(rows)
    chunks = [rows[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(sweep, chunks))
    return np.sum(parts, axis=0)


def registry() -> list[dict]:
    """One record per class-number-one discriminant."""
    out = []
    for D in CLASS_NUMBER_ONE:
        forms = reduced_forms(D)
        (Q,) = forms
        out.append({"D": D, "a": Q.a, "b": Q.b, "c": Q.c, "w_D": units_count(D), "h": len(forms)})
    return out


def registry_json() -> str:
    return json.dumps(registry(), indent=2)
